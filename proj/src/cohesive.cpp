#include "debond/cohesive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace debond {

// ---------------------------------------------------------------------------
// TimeGrid
// ---------------------------------------------------------------------------

TimeGrid TimeGrid::uniform(double horizon, int steps) {
    if (steps < 1 || horizon <= 0.0) throw ConfigError("time grid needs steps >= 1 and T > 0");
    TimeGrid g;
    g.t.resize(steps + 1);
    for (int k = 0; k <= steps; ++k) g.t[k] = horizon * k / steps;
    g.t.front() = 0.0;
    g.t.back() = horizon;
    return g;
}

double TimeGrid::fineness() const {
    double f = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) f = std::max(f, t[k] - t[k - 1]);
    return f;
}

void TimeGrid::validate() const {
    if (t.size() < 2) throw ConfigError("time grid needs at least two points");
    if (t.front() != 0.0) throw ConfigError("time grid must start at 0");
    for (std::size_t k = 1; k < t.size(); ++k)
        if (t[k] <= t[k - 1]) throw ConfigError("time grid must be strictly increasing");
}

// ---------------------------------------------------------------------------
// Step objective
// ---------------------------------------------------------------------------

double step_objective(const Mesh& mesh, const DirichletForm& form, const CohesiveDensity& density,
                      double eps, const NodeField& gamma_prev, const NodeField& v) {
    double pot = 0.0;
    for (int i = 0; i < mesh.node_count(); ++i)
        pot += mesh.weight[i] * density.eval(i, std::abs(v[i]) / eps, gamma_prev[i] / eps);
    return dirichlet_energy(form, v) + pot;
}

double CohesiveTrace::max_abs_residual() const {
    double r = 0.0;
    for (const auto& e : ledger) r = std::max(r, std::abs(e.residual));
    return r;
}

// ---------------------------------------------------------------------------
// Nodal line minimization
// ---------------------------------------------------------------------------

namespace {

struct NodalProblem {
    // q(s) = 0.5*kii*s^2 + b*s + weight*Phi(node, s/eps, z_resc)
    const CohesiveDensity* density;
    int node;
    double kii, b, weight, eps, z_resc;

    double operator()(double s) const {
        return 0.5 * kii * s * s + b * s + weight * density->eval(node, s / eps, z_resc);
    }
};

/// Golden-section refinement returning the best point actually evaluated.
double golden_refine(const NodalProblem& q, double lo, double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = q(x1), f2 = q(x2);
    double best_s = f1 <= f2 ? x1 : x2;
    double best_v = std::min(f1, f2);
    for (int it = 0; it < 90 && (b - a) > 1e-14 * (1.0 + b); ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = q(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = q(x2);
        }
        if (f1 < best_v) {
            best_v = f1;
            best_s = x1;
        }
        if (f2 < best_v) {
            best_v = f2;
            best_s = x2;
        }
    }
    return best_s;
}

/// Global minimizer of q over [0, s_hi]: probe the piecewise structure (the
/// history seam and the rescaled transition scale), then refine each probe
/// basin by golden section.
double nodal_argmin(const NodalProblem& q, double s_hi) {
    if (s_hi <= 0.0) return 0.0;
    const double seam = q.z_resc * q.eps;

    std::vector<double> probes;
    probes.reserve(48);
    probes.push_back(0.0);
    probes.push_back(s_hi);
    for (int j = 0; j <= 16; ++j) probes.push_back(s_hi * j / 16.0);
    if (seam > 0.0 && seam < s_hi) {
        probes.push_back(seam);
        for (int j = -2; j <= 6; ++j) {
            const double step = q.eps * std::ldexp(1.0, j);
            if (seam + step < s_hi) probes.push_back(seam + step);
            if (seam - step > 0.0) probes.push_back(seam - step);
        }
    } else {
        for (int j = -2; j <= 6; ++j) {
            const double step = q.eps * std::ldexp(1.0, j);
            if (step < s_hi) probes.push_back(step);
        }
    }
    // Exact vertex of the quadratic branch when the family provides one.
    {
        double c2 = 0.0, c1 = 0.0;
        const double touch = seam > 0.0 ? std::min(seam, s_hi) : 0.0;
        if (q.density->quadratic_majorant(q.node, q.eps, q.z_resc, touch, c2, c1)) {
            const double denom = q.kii + 2.0 * q.weight * c2;
            if (denom > 0.0) {
                const double vertex = -(q.b + q.weight * c1) / denom;
                if (vertex > 0.0 && vertex < s_hi) probes.push_back(vertex);
            }
        }
    }
    std::sort(probes.begin(), probes.end());
    probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

    std::vector<double> values(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) values[i] = q(probes[i]);

    // Collect probe-local minima, refine the best few basins.
    std::vector<std::size_t> basins;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const bool left_ok = (i == 0) || values[i] <= values[i - 1];
        const bool right_ok = (i + 1 == probes.size()) || values[i] <= values[i + 1];
        if (left_ok && right_ok) basins.push_back(i);
    }
    std::sort(basins.begin(), basins.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    if (basins.size() > 3) basins.resize(3);

    double best_s = probes.front();
    double best_v = values.front();
    for (std::size_t i = 0; i < probes.size(); ++i)
        if (values[i] < best_v) {
            best_v = values[i];
            best_s = probes[i];
        }
    for (std::size_t bi : basins) {
        const double lo = bi == 0 ? probes[0] : probes[bi - 1];
        const double hi = bi + 1 == probes.size() ? probes.back() : probes[bi + 1];
        if (hi <= lo) continue;
        const double s = golden_refine(q, lo, hi);
        const double v = q(s);
        if (v < best_v) {
            best_v = v;
            best_s = s;
        }
    }
    return best_s;
}

struct WorkSpace {
    std::vector<int> free_nodes;
    std::vector<int> free_index;
};

WorkSpace make_workspace(const Mesh& mesh) {
    WorkSpace ws;
    ws.free_index.assign(mesh.node_count(), -1);
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (!mesh.gamma_nodes[i]) {
            ws.free_index[i] = static_cast<int>(ws.free_nodes.size());
            ws.free_nodes.push_back(i);
        }
    }
    return ws;
}

/// One cyclic exact-line-minimization sweep; returns the objective decrease.
double coordinate_sweep(const Mesh& mesh, const DirichletForm& form,
                        const CohesiveDensity& density, double eps, const NodeField& gamma_prev,
                        double value_cap, const WorkSpace& ws, NodeField& v) {
    double improvement = 0.0;
    for (int i : ws.free_nodes) {
        NodalProblem q{&density, i,          form.K.diagonal(i), form.K.row_dot_offdiag(i, v),
                       mesh.weight[i], eps, gamma_prev[i] / eps};
        const double s_hi = std::min(std::max(0.0, -q.b / q.kii), value_cap);
        const double old_s = v[i];
        const double old_q = q(old_s);
        const double new_s = nodal_argmin(q, s_hi);
        const double new_q = q(new_s);
        // Ignore refinement-noise moves so the sweep criterion can fire.
        if (new_q < old_q - 1e-16 * (1.0 + std::abs(old_q))) {
            v[i] = new_s;
            improvement += old_q - new_q;
        }
    }
    return improvement;
}

/// Majorization step: replace the nodal potentials by convex quadratic
/// majorants touching at the current iterate and solve the resulting bound-
/// constrained quadratic by an active-set reduced solve. Returns true and
/// updates (v, J) only on strict objective decrease.
bool majorization_step(const Mesh& mesh, const DirichletForm& form,
                       const CohesiveDensity& density, double eps, const NodeField& gamma_prev,
                       const WorkSpace& ws, const SolverOptions& solver, NodeField& v, double& J,
                       double min_progress) {
    const int nf = static_cast<int>(ws.free_nodes.size());
    std::vector<double> c2(nf, 0.0), c1(nf, 0.0);
    for (int f = 0; f < nf; ++f) {
        const int i = ws.free_nodes[f];
        double a2 = 0.0, a1 = 0.0;
        if (!density.quadratic_majorant(i, eps, gamma_prev[i] / eps, v[i], a2, a1)) return false;
        c2[f] = mesh.weight[i] * a2;
        c1[f] = mesh.weight[i] * a1;
    }

    // Initial active (unpinned) guess: positive nodes plus nodes pushed up.
    std::vector<char> pinned(nf, 0);
    for (int f = 0; f < nf; ++f) {
        const int i = ws.free_nodes[f];
        const double grad0 = form.K.row_dot_offdiag(i, v) + c1[f];
        pinned[f] = (v[i] <= 0.0 && grad0 >= 0.0) ? 1 : 0;
    }

    NodeField trial = v;
    for (int round = 0; round < 12; ++round) {
        ReducedSystem sys;
        sys.K = &form.K;
        sys.free_index_of_node.assign(mesh.node_count(), -1);
        std::vector<double> shift;
        std::vector<int> sub_to_free;
        for (int f = 0; f < nf; ++f) {
            const int i = ws.free_nodes[f];
            if (pinned[f]) {
                trial[i] = 0.0;
                continue;
            }
            sys.free_index_of_node[i] = static_cast<int>(sys.free_nodes.size());
            sys.free_nodes.push_back(i);
            shift.push_back(2.0 * c2[f]);
            sub_to_free.push_back(f);
        }
        if (sys.free_nodes.empty()) break;
        sys.diag_shift = &shift;

        const int ns = static_cast<int>(sys.free_nodes.size());
        std::vector<double> rhs(ns, 0.0), x(ns, 0.0);
        for (int s = 0; s < ns; ++s) {
            const int r = sys.free_nodes[s];
            double acc = 0.0;
            for (int k = form.K.ptr[r]; k < form.K.ptr[r + 1]; ++k) {
                const int c = form.K.col[k];
                if (sys.free_index_of_node[c] < 0) acc += form.K.val[k] * trial[c];
            }
            rhs[s] = -acc - c1[sub_to_free[s]];
            x[s] = trial[r];
        }
        try {
            pcg_solve(sys, rhs, x, solver, nullptr);
        } catch (const SolverError&) {
            return false;  // surrogate solve stalled; sweeps take over
        }
        bool repinned = false;
        for (int s = 0; s < ns; ++s) {
            if (x[s] < 0.0) {
                pinned[sub_to_free[s]] = 1;
                repinned = true;
            } else {
                trial[sys.free_nodes[s]] = x[s];
            }
        }
        if (!repinned) break;
    }

    const double J_trial =
        step_objective(mesh, form, density, eps, gamma_prev, trial);
    if (J_trial < J - min_progress) {
        v = std::move(trial);
        J = J_trial;
        return true;
    }
    return false;
}

/// Newton polish of the smooth tail: with the branch pattern and active set
/// frozen at the current iterate, the stationarity system is smooth and its
/// Hessian is the stiffness plus the nodal curvature. A few damped iterations
/// finish what the alternating phases leave behind. Accepts only on descent.
bool newton_polish(const Mesh& mesh, const DirichletForm& form, const CohesiveDensity& density,
                   double eps, const NodeField& gamma_prev, const WorkSpace& ws,
                   const SolverOptions& solver, NodeField& v, double& J) {
    const int nf = static_cast<int>(ws.free_nodes.size());
    bool improved = false;
    for (int iter = 0; iter < 8; ++iter) {
        ReducedSystem sys;
        sys.K = &form.K;
        sys.free_index_of_node.assign(mesh.node_count(), -1);
        std::vector<double> shift, grad;
        for (int f = 0; f < nf; ++f) {
            const int i = ws.free_nodes[f];
            double d1 = 0.0, d2 = 0.0;
            if (!density.opening_derivatives(i, v[i] / eps, gamma_prev[i] / eps, d1, d2))
                return improved;
            const double g = form.K.row_dot_offdiag(i, v) + form.K.diagonal(i) * v[i] +
                             mesh.weight[i] * d1 / eps;
            if (v[i] <= 0.0 && g >= 0.0) continue;  // pinned by complementarity
            // Floor the curvature so saturation cannot break definiteness.
            const double curv =
                std::max(mesh.weight[i] * d2 / (eps * eps), -0.5 * form.K.diagonal(i));
            sys.free_index_of_node[i] = static_cast<int>(sys.free_nodes.size());
            sys.free_nodes.push_back(i);
            shift.push_back(curv);
            grad.push_back(g);
        }
        if (sys.free_nodes.empty()) return improved;
        sys.diag_shift = &shift;

        const int ns = static_cast<int>(sys.free_nodes.size());
        std::vector<double> rhs(ns), delta(ns, 0.0);
        double gnorm = 0.0;
        for (int s = 0; s < ns; ++s) {
            rhs[s] = -grad[s];
            gnorm += grad[s] * grad[s];
        }
        if (gnorm <= 1e-30 * (1.0 + J * J)) return improved;
        try {
            pcg_solve(sys, rhs, delta, solver, nullptr);
        } catch (const SolverError&) {
            return improved;
        }
        bool accepted = false;
        for (double alpha : {1.0, 0.5, 0.25, 0.0625}) {
            NodeField trial = v;
            for (int s = 0; s < ns; ++s)
                trial[sys.free_nodes[s]] =
                    std::max(0.0, v[sys.free_nodes[s]] + alpha * delta[s]);
            const double J_trial = step_objective(mesh, form, density, eps, gamma_prev, trial);
            if (J_trial < J - 1e-16 * (1.0 + std::abs(J))) {
                v = std::move(trial);
                J = J_trial;
                accepted = true;
                improved = true;
                break;
            }
        }
        if (!accepted) return improved;
    }
    return improved;
}

struct DescentResult {
    NodeField v;
    double objective = 0.0;
    bool converged = false;
    int sweeps = 0;
};

DescentResult descend(const Mesh& mesh, const DirichletForm& form, const CohesiveDensity& density,
                      double eps, const NodeField& gamma_prev, double value_cap,
                      const CohesiveParams& params, const WorkSpace& ws, NodeField v) {
    DescentResult res;
    double J = step_objective(mesh, form, density, eps, gamma_prev, v);
    // The surrogate solve looses the inner tolerances: descent is certified by
    // the objective test and final stationarity comes from the exact sweeps.
    SolverOptions inner = params.solver;
    inner.rtol = std::max(inner.rtol, 1e-8);
    inner.atol = std::max(inner.atol, 1e-8);
    // Each accepted surrogate call must descend by the sweep tolerance, so the
    // alternation terminates; the per-round cap only bounds the round cost.
    auto mm_round = [&](int calls) {
        bool any = false;
        while (calls-- > 0 &&
               majorization_step(mesh, form, density, eps, gamma_prev, ws, inner, v, J,
                                 params.sweep_tol * (1.0 + std::abs(J)))) {
            any = true;
        }
        return any;
    };
    // The three phases complement each other: the majorization solve makes the
    // large admissible jumps, exact nodal sweeps open fresh nodes through the
    // nonconvex saturation, and the Newton polish finishes the smooth tail.
    while (res.sweeps < params.sweep_cap) {
        if (params.majorization) {
            mm_round(4);
            newton_polish(mesh, form, density, eps, gamma_prev, ws, inner, v, J);
        }
        const double imp = coordinate_sweep(mesh, form, density, eps, gamma_prev, value_cap, ws, v);
        ++res.sweeps;
        J -= imp;
        if (imp < params.sweep_tol * (1.0 + std::abs(J))) {
            if (params.majorization && mm_round(4)) continue;  // surrogate still moved
            res.converged = true;
            break;
        }
    }
    res.objective = step_objective(mesh, form, density, eps, gamma_prev, v);
    res.v = std::move(v);
    return res;
}

NodeSet threshold_set(const Mesh& mesh, const NodeField& gamma, double threshold) {
    NodeSet s = mesh.a0_nodes;
    for (int i = 0; i < mesh.node_count(); ++i)
        if (gamma[i] >= threshold) s[i] = 1;
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// incremental_minimize
// ---------------------------------------------------------------------------

NodeField incremental_minimize(const Mesh& mesh, const DirichletForm& form,
                               const CohesiveDensity& density, double eps,
                               const NodeField& gamma_prev, double boundary_value,
                               const NodeField& g_profile, const CohesiveParams& params,
                               const StepContext& context, MinimizeDiag* diag) {
    if (eps <= 0.0) throw DomainError("rescaling parameter must be positive");
    if (boundary_value < 0.0) throw DomainError("boundary value must be nonnegative");
    const WorkSpace ws = make_workspace(mesh);

    auto impose_trace = [&](NodeField& v) {
        for (int i = 0; i < mesh.node_count(); ++i) {
            if (mesh.gamma_nodes[i]) v[i] = boundary_value * g_profile[i];
            else if (v[i] < 0.0) v[i] = 0.0;
        }
    };

    NodeField gamma_field(mesh.node_count());
    for (int i = 0; i < mesh.node_count(); ++i) gamma_field[i] = boundary_value * g_profile[i];

    std::vector<std::pair<std::string, NodeField>> candidates;
    if (context.previous_u) {
        NodeField shifted = *context.previous_u;
        const double dlam = boundary_value - context.previous_boundary_value;
        for (int i = 0; i < mesh.node_count(); ++i) shifted[i] += dlam * g_profile[i];
        candidates.emplace_back("previous-shifted", std::move(shifted));
    }
    if (params.restarts || candidates.empty()) {
        NodeField lift(mesh.node_count());
        for (int i = 0; i < mesh.node_count(); ++i) lift[i] = boundary_value * g_profile[i];
        candidates.emplace_back("boundary-lift", std::move(lift));
    }
    if (params.restarts) {
        const double h = mesh.dimension == 2 ? std::min(mesh.dx, mesh.dy) : mesh.dx;
        const int eps_cells = std::max(1, static_cast<int>(std::lround(eps / h)));
        const double threshold = eps * std::pow(eps, -params.delta_exponent);
        const NodeSet base = threshold_set(mesh, gamma_prev, threshold);
        candidates.emplace_back("threshold-set",
                                harmonic_extension(mesh, form, base, gamma_field, params.solver));
        candidates.emplace_back(
            "dilated-front",
            harmonic_extension(mesh, form, dilate(mesh, base, eps_cells), gamma_field,
                               params.solver));
        candidates.emplace_back(
            "strip", harmonic_extension(mesh, form, mesh.a0_nodes, gamma_field, params.solver));
        // Desk-scale instances are audited against an exhaustive oracle; a
        // coarse ladder of flat openings covers the detached basins there.
        if (static_cast<int>(ws.free_nodes.size()) <= 8) {
            for (double level : {0.25, 0.5, 0.75, 1.0}) {
                NodeField flat(mesh.node_count(), level * boundary_value);
                candidates.emplace_back("level-" + std::to_string(level).substr(0, 4),
                                        std::move(flat));
            }
        }
    }

    std::optional<DescentResult> best;
    std::string best_name;
    bool any_converged = false;
    for (auto& [name, field] : candidates) {
        impose_trace(field);
        DescentResult r = descend(mesh, form, density, eps, gamma_prev, boundary_value, params, ws,
                                  std::move(field));
        impose_trace(r.v);
        any_converged = any_converged || r.converged;
        bool take = false;
        if (!best) {
            take = true;
        } else {
            const double tie = 1e-15 * (1.0 + std::abs(best->objective));
            if (r.objective < best->objective - tie) {
                take = true;
            } else if (std::abs(r.objective - best->objective) <= tie && context.previous_u) {
                const double d_new =
                    field_distances(mesh, form, r.v, *context.previous_u).h1;
                const double d_old =
                    field_distances(mesh, form, best->v, *context.previous_u).h1;
                take = d_new < d_old;
            }
        }
        if (take) {
            best = std::move(r);
            best_name = name;
        }
    }

    if (diag) {
        diag->objective = best->objective;
        diag->sweeps = best->sweeps;
        diag->candidates = static_cast<int>(candidates.size());
        diag->winner = best_name;
    }
    if (!any_converged)
        throw NonconvergenceError("no step-minimization candidate met the sweep criterion",
                                  best->v, best->objective);
    return std::move(best->v);
}

NodeField gamma_update(const NodeField& gamma_prev, const NodeField& u) {
    NodeField out(gamma_prev.size());
    for (std::size_t i = 0; i < gamma_prev.size(); ++i)
        out[i] = std::max(gamma_prev[i], std::abs(u[i]));
    return out;
}

CohesiveState rest_state(const Mesh& mesh, double eps) {
    CohesiveState s;
    s.t = 0.0;
    s.eps = eps;
    s.u.assign(mesh.node_count(), 0.0);
    s.gamma.assign(mesh.node_count(), 0.0);
    return s;
}

// ---------------------------------------------------------------------------
// evolve_cohesive
// ---------------------------------------------------------------------------

CohesiveTrace evolve_cohesive(const Mesh& mesh, const DirichletForm& form,
                              const CohesiveDensity& density, double eps, const Loading& loading,
                              const TimeGrid& grid, const CohesiveState& initial,
                              const CohesiveParams& params) {
    grid.validate();
    loading.validate(mesh);
    if (std::abs(grid.t.back() - loading.horizon()) > 1e-12)
        throw ConfigError("time grid horizon must match the loading horizon");

    const double M = loading.ceiling;
    CohesiveTrace trace;
    trace.states.reserve(grid.t.size());
    trace.ledger.reserve(grid.t.size());

    // Initial state checks: compatibility and ordering.
    CohesiveState state = initial;
    state.t = 0.0;
    state.eps = eps;
    const double lam0 = loading.lambda(0.0);
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (mesh.gamma_nodes[i] && std::abs(state.u[i] - lam0 * loading.g[i]) > 1e-12)
            throw ConfigError("initial displacement does not match the loading trace at t = 0");
        if (state.u[i] < 0.0 || state.gamma[i] < state.u[i])
            throw ConfigError("initial state must satisfy gamma >= u >= 0");
        if (mesh.gamma_nodes[i]) state.u[i] = lam0 * loading.g[i];
    }

    double e0 = dirichlet_energy(form, state.u);
    double p0 = 0.0;
    for (int i = 0; i < mesh.node_count(); ++i)
        p0 += mesh.weight[i] * density.eval(i, state.u[i] / eps, state.gamma[i] / eps);

    LedgerEntry first;
    first.t = 0.0;
    first.elastic = e0;
    first.potential = p0;
    first.gamma_max = *std::max_element(state.gamma.begin(), state.gamma.end());
    trace.ledger.push_back(first);
    trace.states.push_back(state);

    double work_cum = 0.0, work_cum_trap = 0.0;
    for (std::size_t k = 1; k < grid.t.size(); ++k) {
        const double t = grid.t[k];
        const double lam_prev = loading.lambda(grid.t[k - 1]);
        const double lam = loading.lambda(t);
        const NodeField& u_prev = trace.states.back().u;
        const NodeField& gamma_prev = trace.states.back().gamma;

        StepContext ctx;
        ctx.previous_u = &u_prev;
        ctx.previous_gamma = &gamma_prev;
        ctx.previous_boundary_value = lam_prev;

        NodeField u = incremental_minimize(mesh, form, density, eps, gamma_prev, lam, loading.g,
                                           params, ctx);
        NodeField gamma = gamma_update(gamma_prev, u);

        // Hard invariants; a violation aborts the run.
        for (int i = 0; i < mesh.node_count(); ++i) {
            if (u[i] < 0.0)
                throw ConsistencyError("negative displacement", static_cast<int>(k));
            if (u[i] > M + 1e-9)
                throw ConsistencyError("displacement above the loading ceiling",
                                       static_cast<int>(k));
            if (mesh.gamma_nodes[i] && u[i] != lam * loading.g[i])
                throw ConsistencyError("trace mismatch on the loaded boundary",
                                       static_cast<int>(k));
            if (gamma[i] < gamma_prev[i] || gamma[i] < u[i])
                throw ConsistencyError("history variable decreased", static_cast<int>(k));
        }

        const double dlam = lam - lam_prev;
        const double w_inc = dlam * bilinear(form, loading.g, u_prev);
        const double w_inc_trap = dlam * 0.5 * (bilinear(form, loading.g, u_prev) +
                                                bilinear(form, loading.g, u));
        work_cum += w_inc;
        work_cum_trap += w_inc_trap;

        double pot = 0.0;
        for (int i = 0; i < mesh.node_count(); ++i)
            pot += mesh.weight[i] * density.eval(i, u[i] / eps, gamma[i] / eps);

        LedgerEntry entry;
        entry.t = t;
        entry.elastic = dirichlet_energy(form, u);
        entry.potential = pot;
        entry.work_increment = w_inc;
        entry.work_cum = work_cum;
        entry.work_cum_trapezoid = work_cum_trap;
        entry.residual = (entry.elastic + pot) - (e0 + p0) - work_cum;
        entry.gamma_max = *std::max_element(gamma.begin(), gamma.end());
        trace.ledger.push_back(entry);

        CohesiveState next;
        next.t = t;
        next.eps = eps;
        next.u = std::move(u);
        next.gamma = std::move(gamma);
        trace.states.push_back(std::move(next));
    }
    return trace;
}

// ---------------------------------------------------------------------------
// stability_audit
// ---------------------------------------------------------------------------

bool StabilityReport::all_pass() const {
    return std::all_of(findings.begin(), findings.end(),
                       [](const StabilityFinding& f) { return f.pass; });
}

StabilityReport stability_audit(const Mesh& mesh, const DirichletForm& form,
                                const CohesiveDensity& density, double eps,
                                const CohesiveState& state, const Loading& loading,
                                const CohesiveParams& params) {
    const double lam = loading.lambda(state.t);
    StabilityReport report;
    report.objective = step_objective(mesh, form, density, eps, state.gamma, state.u);
    report.tolerance = 1e-9 * (1.0 + std::abs(report.objective));

    NodeField trace_field(mesh.node_count());
    for (int i = 0; i < mesh.node_count(); ++i) trace_field[i] = lam * loading.g[i];

    auto add = [&](const std::string& name, NodeField v) {
        for (int i = 0; i < mesh.node_count(); ++i)
            if (mesh.gamma_nodes[i]) v[i] = trace_field[i];
        const double jv = step_objective(mesh, form, density, eps, state.gamma, v);
        StabilityFinding f;
        f.competitor = name;
        f.objective_gap = report.objective - jv;
        f.pass = f.objective_gap <= report.tolerance;
        report.findings.push_back(std::move(f));
    };

    // Scaled boundary lifts.
    for (double alpha : {0.5, 1.0, 2.0}) {
        NodeField v(mesh.node_count());
        for (int i = 0; i < mesh.node_count(); ++i) v[i] = alpha * lam * loading.g[i];
        add("lift-x" + std::to_string(alpha).substr(0, 4), std::move(v));
    }

    // Harmonic extensions on the strip and on dilated threshold sets.
    const double threshold = eps * std::pow(eps, -params.delta_exponent);
    NodeSet s = mesh.a0_nodes;
    for (int i = 0; i < mesh.node_count(); ++i)
        if (state.gamma[i] >= threshold) s[i] = 1;
    add("strip-extension",
        harmonic_extension(mesh, form, mesh.a0_nodes, trace_field, params.solver));
    add("threshold-extension", harmonic_extension(mesh, form, s, trace_field, params.solver));
    for (int r : {1, 2, 4})
        add("dilated-extension-" + std::to_string(r),
            harmonic_extension(mesh, form, dilate(mesh, s, r), trace_field, params.solver));

    // Sharp-limit displacement (1D closed-form front).
    if (mesh.dimension == 1) {
        double kappa_min = std::numeric_limits<double>::infinity();
        for (int i = 0; i < mesh.node_count(); ++i)
            if (!mesh.in_a0(i)) kappa_min = std::min(kappa_min, density.kappa_phi(i));
        if (std::isfinite(kappa_min) && kappa_min > 0.0) {
            const double l0 = front_position_1d(mesh, mesh.a0_nodes);
            const double lb =
                std::min(std::max(l0, lam / std::sqrt(2.0 * kappa_min)), mesh.lengths[0]);
            NodeSet b = mesh.a0_nodes;
            for (int i = 0; i < mesh.node_count(); ++i)
                if (mesh.xs[i] <= lb) b[i] = 1;
            add("sharp-limit",
                harmonic_extension(mesh, form, b, trace_field, params.solver));
        }
    }

    // Truncations of the state.
    const double umax = *std::max_element(state.u.begin(), state.u.end());
    for (double frac : {0.25, 0.5, 0.75}) {
        NodeField v = state.u;
        for (auto& x : v) x = std::min(x, frac * umax);
        add("truncation-" + std::to_string(frac).substr(0, 4), std::move(v));
    }

    // Interior bump perturbations of the positive part.
    constexpr double pi = 3.14159265358979323846;
    NodeField bump(mesh.node_count());
    for (int i = 0; i < mesh.node_count(); ++i) {
        const double sx = std::sin(pi * mesh.xs[i] / mesh.lengths[0]);
        double val = sx * sx;
        if (mesh.dimension == 2) {
            const double sy = std::sin(pi * mesh.ys[i] / mesh.lengths[1]);
            val *= sy * sy;
        }
        bump[i] = val;
    }
    for (double sign : {1.0, -1.0}) {
        NodeField v = state.u;
        for (int i = 0; i < mesh.node_count(); ++i)
            v[i] = std::max(v[i], 0.0) + sign * 0.1 * std::max(umax, 1e-3) * bump[i];
        add(sign > 0 ? "bump-up" : "bump-down", std::move(v));
    }

    return report;
}

// ---------------------------------------------------------------------------
// brute_force_step_oracle
// ---------------------------------------------------------------------------

std::pair<NodeField, double> brute_force_step_oracle(const Mesh& tiny_mesh,
                                                     const DirichletForm& form,
                                                     const CohesiveDensity& density, double eps,
                                                     const NodeField& gamma_prev,
                                                     double boundary_value,
                                                     const std::vector<double>& value_grid) {
    const int n = tiny_mesh.node_count();
    std::vector<int> free_nodes;
    for (int i = 0; i < n; ++i)
        if (!tiny_mesh.gamma_nodes[i]) free_nodes.push_back(i);
    const int nf = static_cast<int>(free_nodes.size());
    const int levels = static_cast<int>(value_grid.size());
    if (nf > 6) throw RefusalError("oracle instances are limited to 6 free nodes");
    if (levels > 101 || levels < 2)
        throw RefusalError("oracle value grids are limited to 2..101 levels");

    NodeField base(n, 0.0);
    for (int i = 0; i < n; ++i)
        if (tiny_mesh.gamma_nodes[i]) base[i] = boundary_value;

    // Per-node potential tables (z is frozen, so Phi is a 1D table per node).
    std::vector<std::vector<double>> pot(n);
    for (int i = 0; i < n; ++i) {
        if (tiny_mesh.gamma_nodes[i]) continue;
        pot[i].resize(levels);
        for (int l = 0; l < levels; ++l)
            pot[i][l] = tiny_mesh.weight[i] *
                        density.eval(i, value_grid[l] / eps, gamma_prev[i] / eps);
    }
    double fixed_pot = 0.0;
    for (int i = 0; i < n; ++i)
        if (tiny_mesh.gamma_nodes[i])
            fixed_pot += tiny_mesh.weight[i] *
                         density.eval(i, base[i] / eps, gamma_prev[i] / eps);

    double enum_count = 1.0;
    for (int f = 0; f < nf; ++f) enum_count *= levels;

    if (enum_count <= 4.0e6) {
        // Plain product enumeration in lexicographic order; strict improvement
        // keeps the lexicographically smallest optimum.
        std::vector<int> idx(nf, 0);
        NodeField v = base;
        for (int f = 0; f < nf; ++f) v[free_nodes[f]] = value_grid[0];
        NodeField best_v = v;
        double best_j = std::numeric_limits<double>::infinity();
        while (true) {
            double j = dirichlet_energy(form, v) + fixed_pot;
            for (int f = 0; f < nf; ++f) j += pot[free_nodes[f]][idx[f]];
            if (j < best_j) {
                best_j = j;
                best_v = v;
            }
            int pos = nf - 1;
            while (pos >= 0) {
                if (++idx[pos] < levels) {
                    v[free_nodes[pos]] = value_grid[idx[pos]];
                    break;
                }
                idx[pos] = 0;
                v[free_nodes[pos]] = value_grid[0];
                --pos;
            }
            if (pos < 0) break;
        }
        return {best_v, best_j};
    }

    if (tiny_mesh.dimension != 1)
        throw RefusalError("oracle instance too large for product enumeration");

    // Chain dynamic program over the 1D path; identical optimum, identical
    // lexicographic tie-break (smallest value chosen first at each node).
    std::vector<std::vector<double>> allowed(n);
    for (int i = 0; i < n; ++i)
        allowed[i] = tiny_mesh.gamma_nodes[i] ? std::vector<double>{base[i]} : value_grid;

    auto nodal = [&](int i, std::size_t l) {
        if (tiny_mesh.gamma_nodes[i])
            return tiny_mesh.weight[i] * density.eval(i, base[i] / eps, gamma_prev[i] / eps);
        return pot[i][l];
    };
    // Half edge energy between chain neighbors (uniform 1D element weight).
    const double half_w = 0.5 / tiny_mesh.dx;

    std::vector<std::vector<double>> cost(n);
    for (int i = n - 1; i >= 0; --i) {
        cost[i].assign(allowed[i].size(), 0.0);
        for (std::size_t l = 0; l < allowed[i].size(); ++l) {
            double c = nodal(i, l);
            if (i + 1 < n) {
                double bestnext = std::numeric_limits<double>::infinity();
                for (std::size_t m = 0; m < allowed[i + 1].size(); ++m) {
                    const double d = allowed[i][l] - allowed[i + 1][m];
                    const double cand = half_w * d * d + cost[i + 1][m];
                    if (cand < bestnext) bestnext = cand;
                }
                c += bestnext;
            }
            cost[i][l] = c;
        }
    }
    NodeField best_v(n, 0.0);
    double best_j = std::numeric_limits<double>::infinity();
    std::size_t pick = 0;
    for (std::size_t l = 0; l < allowed[0].size(); ++l)
        if (cost[0][l] < best_j) {
            best_j = cost[0][l];
            pick = l;
        }
    best_v[0] = allowed[0][pick];
    for (int i = 1; i < n; ++i) {
        double best_here = std::numeric_limits<double>::infinity();
        std::size_t next_pick = 0;
        for (std::size_t m = 0; m < allowed[i].size(); ++m) {
            const double d = best_v[i - 1] - allowed[i][m];
            const double cand = half_w * d * d + cost[i][m];
            if (cand < best_here) {
                best_here = cand;
                next_pick = m;
            }
        }
        best_v[i] = allowed[i][next_pick];
    }
    return {best_v, best_j};
}

}  // namespace debond
