#include <cmath>

#include "debond/cohesive.hpp"
#include "doctest.h"

using namespace debond;

namespace {

Mesh desk_mesh(int n = 101) {
    return build_mesh(1, {1.0}, {n}, GammaSpec{Side::Left, 0, -1}, A0Spec{0.2, 0.0});
}

struct Desk {
    Mesh mesh;
    DirichletForm form;
    PsiFamily density;
    Loading loading;
    Desk(int n, double kappa = 1.0, double rate = 1.0)
        : mesh(desk_mesh(n)),
          form(assemble_dirichlet_form(mesh)),
          density(mesh, kappa, rate),
          loading(make_loading(mesh, 0.1, {0.0, 1.0}, {0.0, 1.0})) {}
};

}  // namespace

TEST_CASE("time grid") {
    const TimeGrid g = TimeGrid::uniform(1.0, 4);
    CHECK(g.t == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(g.fineness() == doctest::Approx(0.25));
    g.validate();
    CHECK_THROWS_AS(TimeGrid::uniform(0.0, 4), ConfigError);

    TimeGrid bad;
    bad.t = {0.0, 0.5, 0.5, 1.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("history update") {
    CHECK(gamma_update({0.0, 0.0}, {0.0, 0.0}) == NodeField{0.0, 0.0});
    CHECK(gamma_update({0.3, 0.1}, {0.2, 0.4}) == NodeField{0.3, 0.4});
    const NodeField g{0.3, 0.1}, u{0.2, 0.4};
    CHECK(gamma_update(gamma_update(g, u), u) == gamma_update(g, u));
    // Output dominates both inputs.
    const NodeField out = gamma_update(g, u);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(out[i] >= g[i]);
        CHECK(out[i] >= u[i]);
    }
}

TEST_CASE("zero data give the zero minimizer") {
    Desk d(41);
    NodeField gamma0(d.mesh.node_count(), 0.0);
    MinimizeDiag diag;
    const NodeField u = incremental_minimize(d.mesh, d.form, d.density, 0.1, gamma0, 0.0,
                                             d.loading.g, {}, {}, &diag);
    for (double v : u) CHECK(v == 0.0);
    CHECK(diag.objective == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("strip extension bounds the step objective") {
    Desk d(101);
    NodeField gamma0(d.mesh.node_count(), 0.0);
    MinimizeDiag diag;
    const NodeField u = incremental_minimize(d.mesh, d.form, d.density, 0.05, gamma0, 1.0,
                                             d.loading.g, {}, {}, &diag);
    // The strip candidate is a restart member with objective 1/(2*0.2) = 2.5.
    CHECK(diag.objective <= 2.5 + 1e-9);
    CHECK(u[0] == 1.0);
    for (double v : u) CHECK(v >= 0.0);
}

TEST_CASE("oracle scan is a lower envelope of the grid") {
    const Mesh tiny = build_mesh(1, {1.0}, {4}, GammaSpec{Side::Left, 0, -1}, A0Spec{0.26, 0.0});
    const DirichletForm form = assemble_dirichlet_form(tiny);
    const PsiFamily density(tiny, 1.0, 1.0);
    NodeField gamma0(4, 0.0);

    std::vector<double> grid21(21), grid41(41);
    for (int l = 0; l < 21; ++l) grid21[l] = l / 20.0;
    for (int l = 0; l < 41; ++l) grid41[l] = l / 40.0;

    const auto [v21, j21] = brute_force_step_oracle(tiny, form, density, 0.5, gamma0, 1.0, grid21);
    // Every grid assignment is at least as expensive (spot check a sample).
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        NodeField v(4, 0.0);
        v[0] = 1.0;
        for (int i = 1; i < 4; ++i) v[i] = grid21[rng.next_below(21)];
        CHECK(step_objective(tiny, form, density, 0.5, gamma0, v) >= j21 - 1e-12);
    }
    // Nested grids can only improve.
    const auto [v41, j41] = brute_force_step_oracle(tiny, form, density, 0.5, gamma0, 1.0, grid41);
    CHECK(j41 <= j21 + 1e-15);

    // Oversized instances are refused.
    const Mesh big = build_mesh(1, {1.0}, {9}, GammaSpec{Side::Left, 0, -1}, A0Spec{0.2, 0.0});
    CHECK_THROWS_AS(brute_force_step_oracle(big, assemble_dirichlet_form(big),
                                            PsiFamily(big, 1.0, 1.0), 0.5, NodeField(9, 0.0), 1.0,
                                            grid21),
                    RefusalError);
}

TEST_CASE("chain dynamic program agrees with product enumeration") {
    // 6 nodes, 5 free: small enough to enumerate, large enough to be honest.
    const Mesh tiny = build_mesh(1, {1.0}, {6}, GammaSpec{Side::Left, 0, -1}, A0Spec{0.21, 0.0});
    const DirichletForm form = assemble_dirichlet_form(tiny);
    const PsiFamily density(tiny, 1.0, 1.0);
    NodeField gamma0 = {0.0, 0.1, 0.4, 0.0, 0.2, 0.0};

    std::vector<double> grid(11);
    for (int l = 0; l < 11; ++l) grid[l] = l / 10.0;

    // 11^5 = 161051 assignments: this call enumerates.
    const auto [ve, je] = brute_force_step_oracle(tiny, form, density, 0.5, gamma0, 0.8, grid);

    // 51^5 assignments exceed the enumeration budget, so this call runs the
    // chain dynamic program; its grid refines the coarse one (l/10 = 5l/50).
    std::vector<double> grid51(51);
    for (int l = 0; l < 51; ++l) grid51[l] = l / 50.0;
    const auto [vd, jd] = brute_force_step_oracle(tiny, form, density, 0.5, gamma0, 0.8, grid51);
    CHECK(jd <= je + 1e-15);  // the fine grid contains the coarse one

    // And the DP result is itself optimal among sampled fine-grid assignments.
    Rng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        NodeField v(6, 0.0);
        v[0] = 0.8;
        for (int i = 1; i < 6; ++i) v[i] = grid51[rng.next_below(51)];
        CHECK(step_objective(tiny, form, density, 0.5, gamma0, v) >= jd - 1e-12);
    }
}

TEST_CASE("solver matches the oracle within grid slack") {
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 4 + static_cast<int>(rng.next_below(3));
        const Mesh tiny =
            build_mesh(1, {1.0}, {n}, GammaSpec{Side::Left, 0, -1}, A0Spec{0.27, 0.0});
        const DirichletForm form = assemble_dirichlet_form(tiny);
        const PsiFamily density(tiny, 1.0, 1.0);
        NodeField gamma0(n, 0.0);
        for (auto& g : gamma0) g = 0.5 * rng.next_double();
        const double bv = 0.4 + 0.6 * rng.next_double();
        const double eps = trial % 2 == 0 ? 0.5 : 0.1;

        NodeField gp(n, 0.0);
        gp[0] = 1.0;
        const NodeField u =
            incremental_minimize(tiny, form, density, eps, gamma0, bv, gp, {}, {});
        const double js = step_objective(tiny, form, density, eps, gamma0, u);

        std::vector<double> grid(51);
        for (int l = 0; l < 51; ++l) grid[l] = l / 50.0;
        const auto [vo, jo] = brute_force_step_oracle(tiny, form, density, eps, gamma0, bv, grid);

        double wsum = 0.0;
        for (double w : tiny.weight) wsum += w;
        const double slack = 2.0 * density.lipschitz_y() * (grid[1] - grid[0]) * wsum;
        CHECK(js <= jo + slack);
    }
}

TEST_CASE("idle loading keeps the rest state") {
    Desk d(41);
    Loading idle = make_loading(d.mesh, 0.1, {0.0, 1.0}, {0.0, 0.0});
    const TimeGrid grid = TimeGrid::uniform(1.0, 5);
    const CohesiveTrace trace = evolve_cohesive(d.mesh, d.form, d.density, 0.1, idle, grid,
                                                rest_state(d.mesh, 0.1));
    for (const auto& st : trace.states) {
        for (double v : st.u) CHECK(v == 0.0);
        for (double v : st.gamma) CHECK(v == 0.0);
    }
    for (const auto& e : trace.ledger) {
        CHECK(e.elastic == 0.0);
        CHECK(e.potential == 0.0);
        CHECK(e.work_cum == 0.0);
        CHECK(e.residual == 0.0);
    }
}

TEST_CASE("desk evolution invariants") {
    Desk d(101);
    const double eps = 0.1;
    const TimeGrid grid = TimeGrid::uniform(1.0, 40);
    const CohesiveTrace trace =
        evolve_cohesive(d.mesh, d.form, d.density, eps, d.loading, grid, rest_state(d.mesh, eps));
    REQUIRE(trace.states.size() == 41);

    const double M = d.loading.ceiling;
    for (std::size_t k = 1; k < trace.states.size(); ++k) {
        const auto& st = trace.states[k];
        const auto& prev = trace.states[k - 1];
        const double lam = d.loading.lambda(st.t);
        for (int i = 0; i < d.mesh.node_count(); ++i) {
            CHECK(st.u[i] >= 0.0);
            CHECK(st.u[i] <= M + 1e-9);
            CHECK(st.gamma[i] >= prev.gamma[i]);
            CHECK(st.gamma[i] >= st.u[i]);
            if (d.mesh.gamma_nodes[i]) CHECK(st.u[i] == lam * d.loading.g[i]);
        }
    }

    // History profile decays away from the loaded end at the final time.
    const auto& gamma_T = trace.states.back().gamma;
    for (int i = 1; i < d.mesh.node_count(); ++i) CHECK(gamma_T[i] <= gamma_T[i - 1] + 1e-9);

    // Surface energy with the updated history equals the frozen-history value.
    const auto& uT = trace.states.back().u;
    const auto& gT = trace.states.back().gamma;
    const auto& gP = trace.states[trace.states.size() - 2].gamma;
    for (int i = 0; i < d.mesh.node_count(); ++i)
        CHECK(d.density.eval(i, uT[i] / eps, gT[i] / eps) ==
              doctest::Approx(d.density.eval(i, uT[i] / eps, gP[i] / eps)).epsilon(1e-12));

    // The ledger residual stays small on a resolved run.
    CHECK(trace.max_abs_residual() < 0.15);
}

TEST_CASE("stability audit at the final desk state") {
    Desk d(101);
    const double eps = 0.1;
    const TimeGrid grid = TimeGrid::uniform(1.0, 25);
    const CohesiveTrace trace =
        evolve_cohesive(d.mesh, d.form, d.density, eps, d.loading, grid, rest_state(d.mesh, eps));
    const StabilityReport report =
        stability_audit(d.mesh, d.form, d.density, eps, trace.states.back(), d.loading);
    for (const auto& f : report.findings) {
        INFO(f.competitor, " gap=", f.objective_gap);
        CHECK(f.pass);
    }
}

TEST_CASE("initial state must match the loading trace") {
    Desk d(41);
    const TimeGrid grid = TimeGrid::uniform(1.0, 5);
    Loading nonzero = make_loading(d.mesh, 0.1, {0.0, 1.0}, {0.0, 1.0});
    nonzero.values = {0.5, 1.0};  // lambda(0) > 0 against a rest state
    CHECK_THROWS_AS(evolve_cohesive(d.mesh, d.form, d.density, 0.1, nonzero, grid,
                                    rest_state(d.mesh, 0.1)),
                    ConfigError);
}
