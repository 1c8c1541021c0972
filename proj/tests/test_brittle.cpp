#include <cmath>

#include "debond/brittle.hpp"
#include "doctest.h"

using namespace debond;

namespace {

Mesh desk_mesh(int n = 201) {
    return build_mesh(1, {1.0}, {n}, GammaSpec{Side::Left, 0, -1}, A0Spec{0.2, 0.0});
}

struct Desk {
    Mesh mesh;
    DirichletForm form;
    NodeField kappa;
    Loading loading;
    explicit Desk(int n)
        : mesh(desk_mesh(n)),
          form(assemble_dirichlet_form(mesh)),
          kappa(PsiFamily(mesh, 1.0, 1.0).kappa_phi_field(mesh.node_count())),
          loading(make_loading(mesh, 0.1, {0.0, 1.0}, {0.0, 1.0})) {}
};

NodeField trace_field(const Mesh& m, double lam) {
    NodeField f(m.node_count(), 0.0);
    for (int i = 0; i < m.node_count(); ++i)
        if (m.gamma_nodes[i]) f[i] = lam;
    return f;
}

}  // namespace

TEST_CASE("interval front law") {
    // Stationarity of w^2/(2l) + kappa*l: l = w / sqrt(2 kappa).
    CHECK(brittle_step_1d(0.2, 1.0, 1.0, 1.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    // Irreversibility binds when the stationary point retreats.
    CHECK(brittle_step_1d(0.5, 0.1, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    // No load, no growth.
    CHECK(brittle_step_1d(0.37, 0.0, 2.0, 1.0) == doctest::Approx(0.37).epsilon(1e-14));
    // Clamped to the domain.
    CHECK(brittle_step_1d(0.2, 5.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("shape energy") {
    Desk d(201);
    const NodeField gv = trace_field(d.mesh, 1.0);

    auto [e_all, h_all] = shape_energy(d.mesh, d.form, NodeSet(d.mesh.node_count(), 1), gv);
    CHECK(e_all == doctest::Approx(0.0).epsilon(1e-12));
    for (double v : h_all) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));

    NodeSet half(d.mesh.node_count(), 0);
    for (int i = 0; i < d.mesh.node_count(); ++i)
        if (d.mesh.xs[i] < 0.5) half[i] = 1;
    auto [e_half, h_half] = shape_energy(d.mesh, d.form, half, gv);
    CHECK(e_half == doctest::Approx(1.0).epsilon(1e-9));

    // Larger admissible class, smaller energy.
    auto [e_big, h_big] = shape_energy(d.mesh, d.form, dilate(d.mesh, half, 20), gv);
    CHECK(e_half >= e_big - 1e-12);
}

TEST_CASE("discrete front scan against the closed form") {
    Desk d(401);
    for (double lam : {0.3, 0.6, 1.0}) {
        const NodeSet next = brittle_step_discrete(d.mesh, d.form, d.kappa, d.mesh.a0_nodes,
                                                   trace_field(d.mesh, lam),
                                                   BrittleStrategy::Exact1D);
        const double front = front_position_1d(d.mesh, next);
        const double oracle = brittle_step_1d(0.2, lam, 1.0, 1.0);
        CHECK(std::abs(front - oracle) <= d.mesh.dx + 1e-12);
        CHECK(set_subset(d.mesh.a0_nodes, next));
    }

    // No load: nothing debonds.
    const NodeSet still = brittle_step_discrete(d.mesh, d.form, d.kappa, d.mesh.a0_nodes,
                                                trace_field(d.mesh, 0.0),
                                                BrittleStrategy::Exact1D);
    CHECK(still == d.mesh.a0_nodes);

    // Strategy/dimension mismatch.
    CHECK_THROWS_AS(brittle_step_discrete(d.mesh, d.form, d.kappa, d.mesh.a0_nodes,
                                          trace_field(d.mesh, 0.5), BrittleStrategy::Greedy2D),
                    ConfigError);
}

TEST_CASE("desk evolution tracks the front law") {
    Desk d(201);
    const TimeGrid grid = TimeGrid::uniform(1.0, 100);
    const BrittleTrace trace =
        evolve_brittle(d.mesh, d.form, d.kappa, d.loading, grid, d.mesh.a0_nodes);
    REQUIRE(trace.states.size() == 101);

    for (std::size_t k = 0; k < trace.states.size(); ++k) {
        const double t = trace.states[k].t;
        const double law = std::max(0.2, t / std::sqrt(2.0));
        const double front = front_position_1d(d.mesh, trace.states[k].debonded);
        CHECK(std::abs(front - law) <= d.mesh.dx + 1e-12);
        if (k > 0) CHECK(set_subset(trace.states[k - 1].debonded, trace.states[k].debonded));
    }

    // Endpoint energies against the closed-form run (2% at this resolution).
    const auto& last = trace.ledger.back();
    CHECK(last.elastic == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(0.02));
    CHECK(last.potential == doctest::Approx(1.0 / std::sqrt(2.0) - 0.2).epsilon(0.02));
    CHECK(last.work_cum == doctest::Approx(0.2 + std::sqrt(2.0) * (1.0 - 0.2 * std::sqrt(2.0)))
                               .epsilon(0.02));
    CHECK(trace.max_abs_residual() <= 0.06);

    // Positivity on the live component.
    const auto& uT = trace.states.back().u;
    const auto& aT = trace.states.back().debonded;
    int last_in = 0;
    for (int i = 0; i < d.mesh.node_count(); ++i)
        if (aT[i]) last_in = i;
    for (int i = 0; i < last_in; ++i) CHECK(uT[i] > 0.0);
}

TEST_CASE("idle loading keeps the strip") {
    Desk d(101);
    Loading idle = make_loading(d.mesh, 0.1, {0.0, 1.0}, {0.0, 0.0});
    const BrittleTrace trace = evolve_brittle(d.mesh, d.form, d.kappa, idle,
                                              TimeGrid::uniform(1.0, 5), d.mesh.a0_nodes);
    for (const auto& st : trace.states) CHECK(st.debonded == d.mesh.a0_nodes);
    for (const auto& e : trace.ledger) {
        CHECK(e.elastic == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(e.potential == 0.0);
        CHECK(e.work_cum == 0.0);
        CHECK(std::abs(e.residual) < 1e-12);
    }
}

TEST_CASE("reformulation audit of evolved states") {
    Desk d(201);
    const TimeGrid grid = TimeGrid::uniform(1.0, 40);
    const BrittleTrace trace =
        evolve_brittle(d.mesh, d.form, d.kappa, d.loading, grid, d.mesh.a0_nodes);

    const auto& st = trace.states[30];
    const NodeField gv = trace_field(d.mesh, d.loading.lambda(st.t));
    const ReformulationReport ok = reformulation_check(d.mesh, d.form, d.kappa, st, gv);
    INFO("extension_distance=", ok.extension_distance, " residual=", ok.harmonic_residual);
    CHECK(ok.pass);
    for (const auto& f : ok.findings) CHECK(f.pass);

    // Artificially shrinking the set below the positivity region breaks the
    // harmonic-extension identity.
    BrittleState broken = st;
    int last_in = 0;
    for (int i = 0; i < d.mesh.node_count(); ++i)
        if (broken.debonded[i]) last_in = i;
    for (int i = last_in - 5; i <= last_in; ++i) broken.debonded[i] = 0;
    const ReformulationReport bad = reformulation_check(d.mesh, d.form, d.kappa, broken, gv);
    CHECK(!bad.pass);
    CHECK(bad.extension_distance > 1e-9);
}

TEST_CASE("sampled stability of evolved states") {
    Desk d(201);
    const TimeGrid grid = TimeGrid::uniform(1.0, 40);
    const BrittleTrace trace =
        evolve_brittle(d.mesh, d.form, d.kappa, d.loading, grid, d.mesh.a0_nodes);
    for (std::size_t k : {std::size_t(10), std::size_t(25), std::size_t(40)}) {
        const auto& st = trace.states[k];
        const NodeField gv = trace_field(d.mesh, d.loading.lambda(st.t));
        const StabilityReport r = brittle_stability_audit(d.mesh, d.form, d.kappa, st, gv);
        for (const auto& f : r.findings) {
            INFO("t=", st.t, " ", f.competitor, " gap=", f.objective_gap);
            CHECK(f.pass);
        }
    }
}

TEST_CASE("irreversible support tracks the debonded set") {
    Desk d(201);
    const TimeGrid grid = TimeGrid::uniform(1.0, 50);
    const BrittleTrace trace =
        evolve_brittle(d.mesh, d.form, d.kappa, d.loading, grid, d.mesh.a0_nodes);
    const auto supports = irreversible_support(d.mesh, trace, 1e-12);
    REQUIRE(supports.size() == trace.states.size());
    for (std::size_t k = 0; k < supports.size(); ++k) {
        // Within one cell of the evolved set at every step.
        CHECK(symmetric_difference_measure(d.mesh, supports[k], trace.states[k].debonded) <=
              2.0 * d.mesh.dx + 1e-12);
        if (k > 0) CHECK(set_subset(supports[k - 1], supports[k]));
    }

    // All-zero trace: the support never leaves the strip.
    Loading idle = make_loading(d.mesh, 0.1, {0.0, 1.0}, {0.0, 0.0});
    const BrittleTrace quiet = evolve_brittle(d.mesh, d.form, d.kappa, idle,
                                              TimeGrid::uniform(1.0, 5), d.mesh.a0_nodes);
    for (const auto& s : irreversible_support(d.mesh, quiet, 1e-12))
        CHECK(s == d.mesh.a0_nodes);

    CHECK_THROWS_AS(irreversible_support(d.mesh, BrittleTrace{}, 1e-12), DomainError);
}

TEST_CASE("2D greedy smoke run") {
    const Mesh mesh =
        build_mesh(2, {1.0, 0.5}, {21, 11}, GammaSpec{Side::Left, 0, -1}, A0Spec{0.2, 0.0});
    const DirichletForm form = assemble_dirichlet_form(mesh);
    const NodeField kappa = PsiFamily(mesh, 1.0, 1.0).kappa_phi_field(mesh.node_count());
    const Loading loading = make_loading(mesh, 0.1, {0.0, 1.0}, {0.0, 1.0});
    BrittleParams params;
    params.strategy = BrittleStrategy::Greedy2D;

    const BrittleTrace trace = evolve_brittle(mesh, form, kappa, loading,
                                              TimeGrid::uniform(1.0, 10), mesh.a0_nodes, params);
    double prev_area = 0.0;
    for (const auto& st : trace.states) {
        const double area = area_fraction(mesh, st.debonded);
        CHECK(area >= prev_area - 1e-12);
        prev_area = area;
        CHECK(set_subset(mesh.a0_nodes, st.debonded));
    }
    // The loaded strip must grow under full load.
    CHECK(prev_area > area_fraction(mesh, mesh.a0_nodes));

    // Sampled stability at the final state.
    const auto& st = trace.states.back();
    NodeField gv(mesh.node_count(), 0.0);
    for (int i = 0; i < mesh.node_count(); ++i)
        if (mesh.gamma_nodes[i]) gv[i] = 1.0;
    const StabilityReport r = brittle_stability_audit(mesh, form, kappa, st, gv);
    for (const auto& f : r.findings) {
        INFO(f.competitor, " gap=", f.objective_gap);
        CHECK(f.pass);
    }
}
