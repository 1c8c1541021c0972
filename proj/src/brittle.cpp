#include "debond/brittle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace debond {

double BrittleTrace::max_abs_residual() const {
    double r = 0.0;
    for (const auto& e : ledger) r = std::max(r, std::abs(e.residual));
    return r;
}

std::pair<double, NodeField> shape_energy(const Mesh& mesh, const DirichletForm& form,
                                          const NodeSet& set_a, const NodeField& gamma_values) {
    NodeField h = harmonic_extension(mesh, form, set_a, gamma_values);
    return {dirichlet_energy(form, h), std::move(h)};
}

double brittle_step_1d(double l_prev, double w_value, double kappa_const, double domain_length) {
    const double stationary = w_value / std::sqrt(2.0 * kappa_const);
    return std::min(std::max(l_prev, stationary), domain_length);
}

namespace {

int last_included_index_1d(const NodeSet& s) {
    int last = -1;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i]) last = static_cast<int>(i);
    return last;
}

NodeSet prefix_set(int node_count, int last_index) {
    NodeSet s(node_count, 0);
    for (int i = 0; i <= last_index && i < node_count; ++i) s[i] = 1;
    return s;
}

/// Unit-trace shape energies per 1D front index, lazily filled and warm
/// started; the solve is linear in the trace so energies scale by lambda^2.
struct FrontEnergyCache {
    std::vector<double> energy;      // NaN until computed
    std::vector<NodeField> unit_h;   // unit-trace extension per front
};

double front_energy(const Mesh& mesh, const DirichletForm& form, const SolverOptions& solver,
                    FrontEnergyCache* cache, int front_idx, const NodeField& unit_trace,
                    NodeField* h_out) {
    if (cache) {
        if (cache->energy.empty()) {
            cache->energy.assign(mesh.node_count(), std::numeric_limits<double>::quiet_NaN());
            cache->unit_h.assign(mesh.node_count(), {});
        }
        if (!std::isnan(cache->energy[front_idx])) {
            if (h_out) *h_out = cache->unit_h[front_idx];
            return cache->energy[front_idx];
        }
    }
    const NodeSet set = prefix_set(mesh.node_count(), front_idx);
    const NodeField* guess = nullptr;
    if (cache && front_idx > 0 && !cache->unit_h[front_idx - 1].empty())
        guess = &cache->unit_h[front_idx - 1];
    NodeField h = harmonic_extension(mesh, form, set, unit_trace, solver, nullptr, guess);
    const double e = dirichlet_energy(form, h);
    if (cache) {
        cache->energy[front_idx] = e;
        cache->unit_h[front_idx] = h;
    }
    if (h_out) *h_out = std::move(h);
    return e;
}

NodeSet step_exact_1d(const Mesh& mesh, const DirichletForm& form, const NodeField& kappa,
                      const NodeSet& a_prev, double lambda, const NodeField& unit_trace,
                      const SolverOptions& solver, FrontEnergyCache* cache) {
    const int n = mesh.node_count();
    const int start = last_included_index_1d(a_prev);

    // The scan covers genuine fronts: the last node stays attached, so every
    // candidate keeps a pinned tail. Including the fully detached set (a
    // zero-energy configuration) would make the incremental minimization jump
    // off the quasistatic front branch as soon as the amplitude exceeds
    // sqrt(kappa/2); the tracked evolution is the locally stable one.
    const int scan_end = std::max(start, n - 2);
    double best_obj = lambda * lambda *
                      front_energy(mesh, form, solver, cache, start, unit_trace, nullptr);
    int best_idx = start;
    double cost = 0.0;  // toughness of nodes added beyond the previous front
    for (int idx = start + 1; idx <= scan_end; ++idx) {
        cost += mesh.weight[idx] * kappa[idx];
        const double e = lambda * lambda *
                         front_energy(mesh, form, solver, cache, idx, unit_trace, nullptr);
        const double obj = e + cost;
        // Strict improvement keeps the smallest front on ties.
        if (obj < best_obj - 1e-15 * (1.0 + std::abs(best_obj))) {
            best_obj = obj;
            best_idx = idx;
        }
    }
    return prefix_set(n, best_idx);
}

std::vector<int> frontier_nodes(const Mesh& mesh, const NodeSet& s) {
    std::vector<int> out;
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (s[i]) continue;
        for (int nb : mesh.neighbors[i])
            if (nb >= 0 && s[nb]) {
                out.push_back(i);
                break;
            }
    }
    return out;
}

NodeSet step_greedy_2d(const Mesh& mesh, const DirichletForm& form, const NodeField& kappa,
                       const NodeSet& a_prev, const NodeField& gamma_values,
                       const SolverOptions& solver) {
    NodeSet cur = a_prev;
    double cur_energy = shape_energy(mesh, form, cur, gamma_values).first;

    for (int round = 0; round < mesh.node_count(); ++round) {
        const auto frontier = frontier_nodes(mesh, cur);
        if (frontier.empty()) break;

        double best_delta = -1e-12;  // require a strict decrease
        NodeSet best_set;
        double best_energy = 0.0;

        // Candidate batches: each single frontier node, then the whole layer.
        for (int cand : frontier) {
            NodeSet trial = cur;
            trial[cand] = 1;
            const double e = shape_energy(mesh, form, trial, gamma_values).first;
            const double delta = e - cur_energy + mesh.weight[cand] * kappa[cand];
            if (delta < best_delta) {
                best_delta = delta;
                best_set = std::move(trial);
                best_energy = e;
            }
        }
        {
            NodeSet trial = cur;
            double tough = 0.0;
            for (int cand : frontier) {
                trial[cand] = 1;
                tough += mesh.weight[cand] * kappa[cand];
            }
            const double e = shape_energy(mesh, form, trial, gamma_values).first;
            const double delta = e - cur_energy + tough;
            if (delta < best_delta) {
                best_delta = delta;
                best_set = std::move(trial);
                best_energy = e;
            }
        }
        if (best_set.empty()) break;
        cur = std::move(best_set);
        cur_energy = best_energy;
    }
    return cur;
}

}  // namespace

NodeSet brittle_step_discrete(const Mesh& mesh, const DirichletForm& form, const NodeField& kappa,
                              const NodeSet& a_prev, const NodeField& gamma_values,
                              BrittleStrategy strategy, const SolverOptions& solver) {
    if (!set_subset(mesh.a0_nodes, a_prev))
        throw DomainError("debonded set must contain the initial strip");
    if (strategy == BrittleStrategy::Exact1D) {
        if (mesh.dimension != 1)
            throw ConfigError("the exact front scan requires a 1D mesh");
        double lambda = 0.0;
        NodeField unit_trace(mesh.node_count(), 0.0);
        for (int i = 0; i < mesh.node_count(); ++i)
            if (mesh.gamma_nodes[i]) {
                lambda = gamma_values[i];
                unit_trace[i] = 1.0;
            }
        return step_exact_1d(mesh, form, kappa, a_prev, lambda, unit_trace, solver, nullptr);
    }
    if (mesh.dimension != 2)
        throw ConfigError("the greedy frontier strategy requires a 2D mesh");
    return step_greedy_2d(mesh, form, kappa, a_prev, gamma_values, solver);
}

BrittleTrace evolve_brittle(const Mesh& mesh, const DirichletForm& form, const NodeField& kappa,
                            const Loading& loading, const TimeGrid& grid, const NodeSet& a_init,
                            const BrittleParams& params) {
    grid.validate();
    loading.validate(mesh);
    if (std::abs(grid.t.back() - loading.horizon()) > 1e-12)
        throw ConfigError("time grid horizon must match the loading horizon");
    if (a_init != mesh.a0_nodes)
        throw ConfigError("the brittle evolution starts from the initial strip");
    if (params.strategy == BrittleStrategy::Exact1D && mesh.dimension != 1)
        throw ConfigError("the exact front scan requires a 1D mesh");
    if (params.strategy == BrittleStrategy::Greedy2D && mesh.dimension != 2)
        throw ConfigError("the greedy frontier strategy requires a 2D mesh");

    NodeField unit_trace(mesh.node_count(), 0.0);
    for (int i = 0; i < mesh.node_count(); ++i)
        if (mesh.gamma_nodes[i]) unit_trace[i] = 1.0;

    FrontEnergyCache cache;
    BrittleTrace trace;

    auto displacement = [&](const NodeSet& set, double lambda) {
        if (params.strategy == BrittleStrategy::Exact1D) {
            // Unit-trace solve scaled by the amplitude (the operator is fixed).
            NodeField h;
            front_energy(mesh, form, params.solver, &cache, last_included_index_1d(set),
                         unit_trace, &h);
            for (auto& x : h) x *= lambda;
            return h;
        }
        NodeField gv(mesh.node_count(), 0.0);
        for (int i = 0; i < mesh.node_count(); ++i)
            if (mesh.gamma_nodes[i]) gv[i] = lambda;
        return harmonic_extension(mesh, form, set, gv, params.solver);
    };

    NodeSet a = a_init;
    double lam0 = loading.lambda(0.0);
    BrittleState s0;
    s0.t = 0.0;
    s0.debonded = a;
    s0.u = displacement(a, lam0);
    const double e0 = dirichlet_energy(form, s0.u);

    LedgerEntry first;
    first.t = 0.0;
    first.elastic = e0;
    first.potential = 0.0;
    first.gamma_max = mesh.dimension == 1 ? front_position_1d(mesh, a) : area_fraction(mesh, a);
    trace.ledger.push_back(first);
    trace.states.push_back(std::move(s0));

    double work_cum = 0.0, work_cum_trap = 0.0;
    for (std::size_t k = 1; k < grid.t.size(); ++k) {
        const double t = grid.t[k];
        const double lam_prev = loading.lambda(grid.t[k - 1]);
        const double lam = loading.lambda(t);
        const NodeField& u_prev = trace.states.back().u;

        NodeSet a_next;
        if (params.strategy == BrittleStrategy::Exact1D) {
            a_next = step_exact_1d(mesh, form, kappa, a, lam, unit_trace, params.solver, &cache);
        } else {
            NodeField gv(mesh.node_count(), 0.0);
            for (int i = 0; i < mesh.node_count(); ++i)
                if (mesh.gamma_nodes[i]) gv[i] = lam;
            a_next = step_greedy_2d(mesh, form, kappa, a, gv, params.solver);
        }
        if (!set_subset(a, a_next))
            throw ConsistencyError("debonded set shrank", static_cast<int>(k));
        a = std::move(a_next);

        BrittleState st;
        st.t = t;
        st.debonded = a;
        st.u = displacement(a, lam);

        const double dlam = lam - lam_prev;
        const double w_inc = dlam * bilinear(form, loading.g, u_prev);
        work_cum += w_inc;
        work_cum_trap += dlam * 0.5 * (bilinear(form, loading.g, u_prev) +
                                       bilinear(form, loading.g, st.u));

        double dissipated = 0.0;
        for (int i = 0; i < mesh.node_count(); ++i)
            if (a[i] && !mesh.a0_nodes[i]) dissipated += mesh.weight[i] * kappa[i];

        LedgerEntry entry;
        entry.t = t;
        entry.elastic = dirichlet_energy(form, st.u);
        entry.potential = dissipated;
        entry.work_increment = w_inc;
        entry.work_cum = work_cum;
        entry.work_cum_trapezoid = work_cum_trap;
        entry.residual = entry.elastic + dissipated - e0 - work_cum;
        entry.gamma_max =
            mesh.dimension == 1 ? front_position_1d(mesh, a) : area_fraction(mesh, a);
        trace.ledger.push_back(entry);
        trace.states.push_back(std::move(st));
    }
    return trace;
}

ReformulationReport reformulation_check(const Mesh& mesh, const DirichletForm& form,
                                        const NodeField& kappa, const BrittleState& state,
                                        const NodeField& gamma_values,
                                        const SolverOptions& solver) {
    ReformulationReport report;
    const double ju = dirichlet_energy(form, state.u);
    const double gap_tol = 1e-9 * (1.0 + std::abs(ju));

    auto add = [&](const std::string& name, const NodeField& v) {
        // Charge competitors for the part of their support outside the set.
        double charge = 0.0;
        for (int i = 0; i < mesh.node_count(); ++i)
            if (v[i] > 0.0 && !state.debonded[i]) charge += mesh.weight[i] * kappa[i];
        ReformulationFinding f;
        f.competitor = name;
        f.gap = ju - (dirichlet_energy(form, v) + charge);
        f.pass = f.gap <= gap_tol;
        report.findings.push_back(f);
        report.pass = report.pass && f.pass;
    };

    add("self", state.u);
    for (int r : {1, 2, 4})
        add("dilated-extension-" + std::to_string(r),
            harmonic_extension(mesh, form, dilate(mesh, state.debonded, r), gamma_values, solver));

    // The displacement must be the harmonic extension on its own set...
    NodeField h = harmonic_extension(mesh, form, state.debonded, gamma_values, solver);
    report.extension_distance = field_distances(mesh, form, state.u, h).h1;
    report.pass = report.pass && report.extension_distance <= 1e-9;

    // ... and interior-stiffness-free where it is positive.
    NodeField ku;
    form.K.apply(state.u, ku);
    double res = 0.0;
    for (int i = 0; i < mesh.node_count(); ++i)
        if (state.debonded[i] && !mesh.gamma_nodes[i] && state.u[i] > 0.0)
            res = std::max(res, std::abs(ku[i]));
    report.harmonic_residual = res;
    report.pass = report.pass && res <= 1e-8;
    return report;
}

std::vector<NodeSet> irreversible_support(const Mesh& mesh, const BrittleTrace& trace,
                                          double positivity_tol) {
    if (trace.states.empty()) throw DomainError("empty evolution trace");
    if (positivity_tol < 0.0) throw DomainError("positivity tolerance must be nonnegative");
    std::vector<NodeSet> out;
    NodeSet running = mesh.a0_nodes;
    for (const auto& st : trace.states) {
        for (int i = 0; i < mesh.node_count(); ++i)
            if (st.u[i] > positivity_tol) running[i] = 1;
        out.push_back(running);
    }
    return out;
}

StabilityReport brittle_stability_audit(const Mesh& mesh, const DirichletForm& form,
                                        const NodeField& kappa, const BrittleState& state,
                                        const NodeField& gamma_values,
                                        const SolverOptions& solver) {
    StabilityReport report;
    report.objective = dirichlet_energy(form, state.u);
    report.tolerance = 1e-9 * (1.0 + std::abs(report.objective));

    auto add = [&](const std::string& name, const NodeSet& candidate) {
        double tough = 0.0;
        for (int i = 0; i < mesh.node_count(); ++i)
            if (candidate[i] && !state.debonded[i]) tough += mesh.weight[i] * kappa[i];
        const NodeSet test = set_union(candidate, state.debonded);
        const double e = shape_energy(mesh, form, test, gamma_values).first;
        StabilityFinding f;
        f.competitor = name;
        f.objective_gap = report.objective - (e + tough);
        f.pass = f.objective_gap <= report.tolerance;
        report.findings.push_back(std::move(f));
    };

    add("self", state.debonded);
    // One extra frontier batch.
    NodeSet batch = state.debonded;
    const auto frontier = frontier_nodes(mesh, state.debonded);
    for (int i : frontier) batch[i] = 1;
    add("frontier-layer", batch);
    for (int i : frontier) {
        add("frontier-node-" + std::to_string(i), [&] {
            NodeSet s = state.debonded;
            s[i] = 1;
            return s;
        }());
        if (report.findings.size() > 24) break;  // bounded sample
    }
    for (int r : {1, 2, 4}) add("dilation-" + std::to_string(r), dilate(mesh, state.debonded, r));
    return report;
}

}  // namespace debond
