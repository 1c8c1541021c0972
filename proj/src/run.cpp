#include "debond/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include "json.hpp"

namespace debond {

namespace {

Side side_from_string(const std::string& s) {
    if (s == "left") return Side::Left;
    if (s == "right") return Side::Right;
    if (s == "bottom") return Side::Bottom;
    return Side::Top;
}

TimeGrid grid_from_config(const RunConfig& cfg) {
    if (!cfg.partition.empty()) {
        TimeGrid g;
        g.t = cfg.partition;
        g.validate();
        return g;
    }
    return TimeGrid::uniform(cfg.lambda_times.back(), cfg.steps);
}

std::vector<std::size_t> checkpoint_indices(std::size_t n_states, int wanted) {
    std::vector<std::size_t> idx;
    const int m = std::min<std::size_t>(wanted, n_states);
    for (int k = 1; k <= m; ++k)
        idx.push_back(k * (n_states - 1) / m);
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

std::size_t closest_index(const std::vector<double>& times, double t) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < times.size(); ++i)
        if (std::abs(times[i] - t) < std::abs(times[best] - t)) best = i;
    return best;
}

std::string snapshot_name(const std::string& prefix, double t) {
    std::string s = g17(t);
    for (auto& c : s)
        if (c == '.' || c == '+' || c == '-') c = '_';
    return prefix + "_t" + s + ".csv";
}

}  // namespace

Problem::Problem(const RunConfig& cfg)
    : mesh(build_mesh(cfg.dimension, cfg.lengths, cfg.nodes,
                      GammaSpec{side_from_string(cfg.gamma_side), cfg.gamma_lo, cfg.gamma_hi},
                      A0Spec{cfg.a0_depth, cfg.a0_offset})),
      form(assemble_dirichlet_form(mesh)),
      loading(make_loading(mesh, cfg.g_width, cfg.lambda_times, cfg.lambda_values)),
      density(mesh, cfg.kappa_inf, cfg.rate),
      kappa(density.kappa_phi_field(mesh.node_count())),
      grid(grid_from_config(cfg)) {
    cohesive_params.sweep_tol = cfg.sweep_tol;
    cohesive_params.sweep_cap = cfg.sweep_cap;
    cohesive_params.restarts = cfg.restarts;
    cohesive_params.majorization = cfg.majorization;
    cohesive_params.delta_exponent = cfg.delta_exponent;
    cohesive_params.solver.rtol = cfg.pcg_rtol;
    cohesive_params.solver.atol = cfg.pcg_atol;
    brittle_params.strategy =
        mesh.dimension == 1 ? BrittleStrategy::Exact1D : BrittleStrategy::Greedy2D;
    brittle_params.positivity_tol =
        cfg.positivity_tol >= 0.0 ? cfg.positivity_tol : 1e-12 * std::max(loading.ceiling, 1.0);
    brittle_params.solver = cohesive_params.solver;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json stability_to_json(const StabilityReport& r) {
    ordered_json j;
    j["objective"] = r.objective;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.all_pass();
    j["competitors"] = ordered_json::array();
    for (const auto& f : r.findings) {
        ordered_json jf;
        jf["name"] = f.competitor;
        jf["gap"] = f.objective_gap;
        jf["pass"] = f.pass;
        j["competitors"].push_back(jf);
    }
    return j;
}

ordered_json axiom_to_json(const AxiomReport& r) {
    ordered_json j;
    j["pass"] = r.all_pass();
    j["axioms"] = ordered_json::array();
    for (const auto& f : r.findings) {
        ordered_json jf;
        jf["name"] = f.axiom;
        jf["pass"] = f.pass;
        jf["worst_violation"] = f.worst;
        jf["detail"] = f.detail;
        j["axioms"].push_back(jf);
    }
    return j;
}

ordered_json reformulation_to_json(const ReformulationReport& r) {
    ordered_json j;
    j["pass"] = r.pass;
    j["extension_distance"] = r.extension_distance;
    j["harmonic_residual"] = r.harmonic_residual;
    j["competitors"] = ordered_json::array();
    for (const auto& f : r.findings) {
        ordered_json jf;
        jf["name"] = f.competitor;
        jf["gap"] = f.gap;
        jf["pass"] = f.pass;
        j["competitors"].push_back(jf);
    }
    return j;
}

void emit_cohesive_run(OutputWriter& out, const RunConfig& cfg, const Problem& p,
                       const CohesiveTrace& trace, double eps, const std::string& stem,
                       bool plots) {
    const double threshold = eps * std::pow(eps, -cfg.delta_exponent);
    out.write(stem + "_trace.csv", cohesive_trace_csv(p.mesh, trace, threshold));
    for (double t : cfg.snapshot_times) {
        const std::size_t k = closest_index(p.grid.t, t);
        out.write(snapshot_name(stem, p.grid.t[k]),
                  cohesive_snapshot_csv(p.mesh, trace.states[k]));
    }
    if (plots) {
        PlotSeries e{"elastic", {}, {}}, pot{"cohesive potential", {}, {}},
            w{"work", {}, {}}, r{"residual", {}, {}};
        for (const auto& le : trace.ledger) {
            e.x.push_back(le.t);
            e.y.push_back(le.elastic);
            pot.x.push_back(le.t);
            pot.y.push_back(le.potential);
            w.x.push_back(le.t);
            w.y.push_back(le.work_cum);
            r.x.push_back(le.t);
            r.y.push_back(le.residual);
        }
        out.write(stem + "_energies.svg",
                  svg_plot("cohesive energy ledger", "t", "energy", {e, pot, w, r}, false, false));
    }
}

void emit_brittle_run(OutputWriter& out, const RunConfig& cfg, const Problem& p,
                      const BrittleTrace& trace, const std::string& stem, bool plots) {
    out.write(stem + "_trace.csv", brittle_trace_csv(p.mesh, trace));
    for (double t : cfg.snapshot_times) {
        const std::size_t k = closest_index(p.grid.t, t);
        out.write(snapshot_name(stem, p.grid.t[k]),
                  brittle_snapshot_csv(p.mesh, trace.states[k]));
    }
    if (plots) {
        PlotSeries e{"elastic", {}, {}}, d{"dissipated", {}, {}}, w{"work", {}, {}},
            r{"residual", {}, {}};
        for (const auto& le : trace.ledger) {
            e.x.push_back(le.t);
            e.y.push_back(le.elastic);
            d.x.push_back(le.t);
            d.y.push_back(le.potential);
            w.x.push_back(le.t);
            w.y.push_back(le.work_cum);
            r.x.push_back(le.t);
            r.y.push_back(le.residual);
        }
        out.write(stem + "_energies.svg",
                  svg_plot("sharp energy ledger", "t", "energy", {e, d, w, r}, false, false));
    }
}

int verb_run_cohesive(const RunConfig& cfg, const Problem& p, OutputWriter& out,
                      RunManifest& manifest, bool plots) {
    const CohesiveTrace trace = evolve_cohesive(p.mesh, p.form, p.density, cfg.eps, p.loading,
                                                p.grid, rest_state(p.mesh, cfg.eps),
                                                p.cohesive_params);
    emit_cohesive_run(out, cfg, p, trace, cfg.eps, "cohesive", plots);
    manifest.audits.emplace_back("state-invariants", true);  // enforced in-run
    return 0;
}

int verb_run_brittle(const RunConfig& cfg, const Problem& p, OutputWriter& out,
                     RunManifest& manifest, bool plots) {
    const BrittleTrace trace = evolve_brittle(p.mesh, p.form, p.kappa, p.loading, p.grid,
                                              p.mesh.a0_nodes, p.brittle_params);
    emit_brittle_run(out, cfg, p, trace, "brittle", plots);
    manifest.audits.emplace_back("state-invariants", true);
    return 0;
}

int verb_limit_study(const RunConfig& cfg, const Problem& p, OutputWriter& out,
                     RunManifest& manifest, bool plots, int threads) {
    EpsSchedule schedule;
    schedule.eps = cfg.eps_list;
    schedule.delta_exponent = cfg.delta_exponent;
    schedule.validate();

    const BrittleTrace reference = evolve_brittle(p.mesh, p.form, p.kappa, p.loading, p.grid,
                                                  p.mesh.a0_nodes, p.brittle_params);

    std::vector<CohesiveTrace> traces(schedule.eps.size());
    std::vector<std::string> errors(schedule.eps.size());
    {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= schedule.eps.size()) break;
                try {
                    traces[i] = evolve_cohesive(p.mesh, p.form, p.density, schedule.eps[i],
                                                p.loading, p.grid, rest_state(p.mesh, schedule.eps[i]),
                                                p.cohesive_params);
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            }
        };
        const int nw = std::max(1, std::min<int>(threads, schedule.eps.size()));
        std::vector<std::thread> pool;
        for (int w = 0; w < nw - 1; ++w) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty())
            throw ConsistencyError("sharpening run eps=" + g17(schedule.eps[i]) +
                                       " failed: " + errors[i],
                                   static_cast<int>(i));

    const ConvergenceReport report = convergence_study(p.mesh, p.form, p.density, reference,
                                                       traces, schedule, cfg.delta_sensitivity);
    out.write("report.json", convergence_report_json(report));
    if (report.entries.size() >= 2) out.write("rates.csv", rate_table_csv(rate_table(report)));
    emit_brittle_run(out, cfg, p, reference, "brittle", false);
    for (std::size_t i = 0; i < traces.size(); ++i)
        out.write("cohesive_eps" + std::to_string(i) + "_trace.csv",
                  cohesive_trace_csv(p.mesh, traces[i], schedule.threshold(schedule.eps[i])));

    if (plots) {
        PlotSeries h1{"sup_t H1 error", {}, {}}, sd{"sup_t set mismatch", {}, {}},
            pg{"sup_t potential gap", {}, {}};
        for (const auto& e : report.entries) {
            h1.x.push_back(e.eps);
            h1.y.push_back(e.sup_h1);
            sd.x.push_back(e.eps);
            sd.y.push_back(e.sup_symdiff);
            pg.x.push_back(e.eps);
            pg.y.push_back(e.sup_potential_gap);
        }
        out.write("error_vs_eps.svg",
                  svg_plot("sharp-limit errors", "eps", "error", {h1, sd, pg}, true, true));

        std::vector<PlotSeries> fronts;
        PlotSeries bf{"sharp front", {}, {}};
        for (std::size_t k = 0; k < reference.states.size(); ++k) {
            bf.x.push_back(reference.states[k].t);
            bf.y.push_back(p.mesh.dimension == 1
                               ? front_position_1d(p.mesh, reference.states[k].debonded)
                               : area_fraction(p.mesh, reference.states[k].debonded));
        }
        fronts.push_back(bf);
        for (std::size_t i = 0; i < traces.size(); ++i) {
            PlotSeries cf{"eps=" + g17(schedule.eps[i]), {}, {}};
            for (std::size_t k = 0; k < traces[i].states.size(); ++k) {
                const NodeSet s = eps_debonded_set(p.mesh, traces[i].states[k].gamma,
                                                   schedule.eps[i], schedule.delta(schedule.eps[i]));
                cf.x.push_back(traces[i].states[k].t);
                cf.y.push_back(p.mesh.dimension == 1 ? front_position_1d(p.mesh, s)
                                                     : area_fraction(p.mesh, s));
            }
            fronts.push_back(std::move(cf));
        }
        out.write("fronts.svg",
                  svg_plot("debonding front overlays", "t",
                           p.mesh.dimension == 1 ? "front position" : "debonded area fraction",
                           fronts, false, false));
    }

    const bool ok =
        report.set_monotonicity_violations == 0 && report.inclusion_violations == 0;
    manifest.audits.emplace_back("set-monotonicity", report.set_monotonicity_violations == 0);
    manifest.audits.emplace_back("displacement-inclusion", report.inclusion_violations == 0);
    return ok ? 0 : 1;
}

int verb_audit(const RunConfig& cfg, const Problem& p, OutputWriter& out, RunManifest& manifest) {
    ordered_json j;
    bool all_ok = true;

    const AxiomReport axioms = axiom_audit(p.density, p.mesh);
    j["density_axioms"] = axiom_to_json(axioms);
    all_ok = all_ok && axioms.all_pass();

    const CohesiveTrace ctrace = evolve_cohesive(p.mesh, p.form, p.density, cfg.eps, p.loading,
                                                 p.grid, rest_state(p.mesh, cfg.eps),
                                                 p.cohesive_params);
    j["cohesive_stability"] = ordered_json::array();
    for (std::size_t k : checkpoint_indices(ctrace.states.size(), cfg.checkpoints)) {
        const StabilityReport r = stability_audit(p.mesh, p.form, p.density, cfg.eps,
                                                  ctrace.states[k], p.loading, p.cohesive_params);
        ordered_json je = stability_to_json(r);
        je["t"] = ctrace.states[k].t;
        j["cohesive_stability"].push_back(je);
        all_ok = all_ok && r.all_pass();
    }

    const BrittleTrace btrace = evolve_brittle(p.mesh, p.form, p.kappa, p.loading, p.grid,
                                               p.mesh.a0_nodes, p.brittle_params);
    j["brittle_stability"] = ordered_json::array();
    j["reformulation"] = ordered_json::array();
    for (std::size_t k : checkpoint_indices(btrace.states.size(), cfg.checkpoints)) {
        NodeField gv(p.mesh.node_count(), 0.0);
        const double lam = p.loading.lambda(btrace.states[k].t);
        for (int i = 0; i < p.mesh.node_count(); ++i)
            if (p.mesh.gamma_nodes[i]) gv[i] = lam * p.loading.g[i];
        const StabilityReport r = brittle_stability_audit(p.mesh, p.form, p.kappa,
                                                          btrace.states[k], gv,
                                                          p.brittle_params.solver);
        ordered_json je = stability_to_json(r);
        je["t"] = btrace.states[k].t;
        j["brittle_stability"].push_back(je);
        all_ok = all_ok && r.all_pass();

        const ReformulationReport rr = reformulation_check(p.mesh, p.form, p.kappa,
                                                           btrace.states[k], gv,
                                                           p.brittle_params.solver);
        ordered_json jr = reformulation_to_json(rr);
        jr["t"] = btrace.states[k].t;
        j["reformulation"].push_back(jr);
        all_ok = all_ok && rr.pass;
    }

    j["pass"] = all_ok;
    out.write("audit.json", j.dump(2) + "\n");
    manifest.audits.emplace_back("density-axioms", axioms.all_pass());
    manifest.audits.emplace_back("all-audits", all_ok);
    return all_ok ? 0 : 1;
}

int verb_oracle(const RunConfig& cfg, OutputWriter& out, RunManifest& manifest,
                std::uint64_t seed) {
    Rng rng(seed ^ 0x6f7261636c65ULL);
    ordered_json j;
    j["instances"] = ordered_json::array();
    bool all_ok = true;

    for (int inst = 0; inst < cfg.oracle_instances; ++inst) {
        const double eps = cfg.oracle_eps[inst % cfg.oracle_eps.size()];
        const int total_nodes = 4 + static_cast<int>(rng.next_below(4));  // 3..6 free
        Mesh tiny = build_mesh(1, {1.0}, {total_nodes}, GammaSpec{Side::Left, 0, -1},
                               A0Spec{0.26, 0.0});
        DirichletForm form = assemble_dirichlet_form(tiny);
        PsiFamily density(tiny, cfg.kappa_inf, cfg.rate);

        NodeField gamma_prev(tiny.node_count(), 0.0);
        if (rng.next_double() > 0.4)
            for (auto& gp : gamma_prev) gp = rng.next_double();
        const double boundary_value = 0.3 + 0.7 * rng.next_double();

        std::vector<double> grid(cfg.oracle_levels);
        for (int l = 0; l < cfg.oracle_levels; ++l)
            grid[l] = static_cast<double>(l) / (cfg.oracle_levels - 1);

        NodeField g_profile(tiny.node_count(), 0.0);
        for (int i = 0; i < tiny.node_count(); ++i)
            if (tiny.gamma_nodes[i]) g_profile[i] = 1.0;

        CohesiveParams params;
        MinimizeDiag diag;
        const NodeField u = incremental_minimize(tiny, form, density, eps, gamma_prev,
                                                 boundary_value, g_profile, params, {}, &diag);
        const double j_solver = step_objective(tiny, form, density, eps, gamma_prev, u);

        const auto [v_star, j_star] = brute_force_step_oracle(tiny, form, density, eps,
                                                              gamma_prev, boundary_value, grid);
        double weight_sum = 0.0;
        for (double w : tiny.weight) weight_sum += w;
        const double slack = 2.0 * density.lipschitz_y() * (grid[1] - grid[0]) * weight_sum;
        const bool pass = j_solver <= j_star + slack;
        all_ok = all_ok && pass;

        ordered_json ji;
        ji["eps"] = eps;
        ji["free_nodes"] = total_nodes - 1;
        ji["objective_solver"] = j_solver;
        ji["objective_oracle"] = j_star;
        ji["slack"] = slack;
        ji["pass"] = pass;
        j["instances"].push_back(ji);
    }
    j["pass"] = all_ok;
    out.write("oracle.json", j.dump(2) + "\n");
    manifest.audits.emplace_back("oracle-equivalence", all_ok);
    return all_ok ? 0 : 1;
}

}  // namespace

RunOutcome run_command(const std::string& verb, const RunConfig& cfg, const RunOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();

    std::string out_dir = opts.out_dir.empty() ? cfg.out_dir : opts.out_dir;
    if (const char* root = std::getenv("DEBOND_OUT_ROOT"); root && root[0] != '\0') {
        const std::filesystem::path p(out_dir);
        if (p.is_relative()) out_dir = (std::filesystem::path(root) / p).string();
    }

    RunOutcome outcome;
    outcome.out_dir = out_dir;
    OutputWriter out(out_dir);

    RunManifest manifest;
    manifest.verb = verb;
    manifest.seed = opts.seed_overridden ? opts.seed : cfg.seed;
    manifest.config_text = cfg.raw_text;

    const bool plots = opts.plots.value_or(cfg.plots);

    try {
        int rc = 0;
        if (verb == "run-cohesive") {
            Problem p(cfg);
            rc = verb_run_cohesive(cfg, p, out, manifest, plots);
        } else if (verb == "run-brittle") {
            Problem p(cfg);
            rc = verb_run_brittle(cfg, p, out, manifest, plots);
        } else if (verb == "limit-study") {
            Problem p(cfg);
            rc = verb_limit_study(cfg, p, out, manifest, plots, opts.threads);
        } else if (verb == "audit") {
            Problem p(cfg);
            rc = verb_audit(cfg, p, out, manifest);
        } else if (verb == "oracle") {
            rc = verb_oracle(cfg, out, manifest, manifest.seed);
        } else {
            throw ConfigError("unknown verb: " + verb +
                              " (expected run-cohesive, run-brittle, limit-study, audit, oracle)");
        }
        manifest.ok = rc == 0;
        outcome.exit_code = rc;
    } catch (const std::exception& e) {
        manifest.ok = false;
        outcome.exit_code = 1;
        outcome.failures.push_back(e.what());
        ordered_json jf;
        jf["verb"] = verb;
        jf["error"] = e.what();
        out.write("failure.json", jf.dump(2) + "\n");
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.finalize(manifest, wall);
    return outcome;
}

}  // namespace debond
