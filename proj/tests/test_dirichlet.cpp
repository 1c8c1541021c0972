#include <cmath>

#include "debond/dirichlet.hpp"
#include "debond/mesh.hpp"
#include "debond/types.hpp"
#include "doctest.h"

using namespace debond;

namespace {

Mesh line_mesh(int n, double depth = 0.2) {
    return build_mesh(1, {1.0}, {n}, GammaSpec{Side::Left, 0, -1}, A0Spec{depth, 0.0});
}

double dense_entry(const CsrMatrix& K, int r, int c) {
    for (int k = K.ptr[r]; k < K.ptr[r + 1]; ++k)
        if (K.col[k] == c) return K.val[k];
    return 0.0;
}

}  // namespace

TEST_CASE("1D stiffness assembly against hand assembly") {
    const Mesh m = line_mesh(3, 0.4);
    const DirichletForm form = assemble_dirichlet_form(m);
    // Two linear elements of length 0.5: element matrix (1/h)[[1,-1],[-1,1]].
    const double expected[3][3] = {{2, -2, 0}, {-2, 4, -2}, {0, -2, 2}};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            CHECK(dense_entry(form.K, r, c) == doctest::Approx(expected[r][c]).epsilon(1e-14));
}

TEST_CASE("stiffness kernel and symmetry") {
    for (int dim : {1, 2}) {
        const Mesh m = dim == 1 ? line_mesh(17)
                                : build_mesh(2, {1.0, 0.5}, {9, 5},
                                             GammaSpec{Side::Left, 0, -1}, A0Spec{0.2, 0.0});
        const DirichletForm form = assemble_dirichlet_form(m);
        NodeField ones(m.node_count(), 3.7);
        CHECK(dirichlet_energy(form, ones) == doctest::Approx(0.0).epsilon(1e-14));
        // Row sums vanish (constants in the kernel).
        NodeField unit(m.node_count(), 1.0), out;
        form.K.apply(unit, out);
        for (double v : out) CHECK(std::abs(v) < 1e-12);
        // Symmetry via the bilinear form.
        NodeField a(m.node_count()), b(m.node_count());
        Rng rng(7);
        for (int i = 0; i < m.node_count(); ++i) {
            a[i] = rng.next_double();
            b[i] = rng.next_double();
        }
        CHECK(bilinear(form, a, b) == doctest::Approx(bilinear(form, b, a)).epsilon(1e-12));
    }
}

TEST_CASE("dirichlet energy of ramps") {
    const Mesh m = line_mesh(101);
    const DirichletForm form = assemble_dirichlet_form(m);

    NodeField linear(m.node_count());
    for (int i = 0; i < m.node_count(); ++i) linear[i] = m.xs[i];
    CHECK(dirichlet_energy(form, linear) == doctest::Approx(0.5).epsilon(1e-12));

    // Ramp 1 -> 0 over (0, 0.5), then zero; the kink lies on a node.
    NodeField ramp(m.node_count());
    for (int i = 0; i < m.node_count(); ++i)
        ramp[i] = m.xs[i] < 0.5 ? 1.0 - m.xs[i] / 0.5 : 0.0;
    CHECK(dirichlet_energy(form, ramp) == doctest::Approx(1.0).epsilon(1e-12));

    // Quadratic homogeneity at alpha = 3.
    NodeField scaled = ramp;
    for (auto& v : scaled) v *= 3.0;
    CHECK(dirichlet_energy(form, scaled) ==
          doctest::Approx(9.0 * dirichlet_energy(form, ramp)).epsilon(1e-12));

    CHECK(dirichlet_energy(form, NodeField(m.node_count(), 0.0)) == 0.0);
}

TEST_CASE("constrained extension solves") {
    const Mesh m = line_mesh(101);
    const DirichletForm form = assemble_dirichlet_form(m);
    NodeField trace(m.node_count(), 0.0);
    trace[0] = 0.7;

    // Full set: the constant is admissible and optimal.
    NodeField all = harmonic_extension(m, form, NodeSet(m.node_count(), 1), trace);
    for (double v : all) CHECK(v == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(dirichlet_energy(form, all) < 1e-18);

    // Half interval: exact two-point boundary solution is the linear ramp.
    NodeSet half(m.node_count(), 0);
    for (int i = 0; i < m.node_count(); ++i)
        if (m.xs[i] < 0.5) half[i] = 1;
    trace[0] = 1.0;
    NodeField h = harmonic_extension(m, form, half, trace);
    for (int i = 0; i < m.node_count(); ++i) {
        const double expect = m.xs[i] < 0.5 ? 1.0 - m.xs[i] / 0.5 : 0.0;
        CHECK(h[i] == doctest::Approx(expect).epsilon(1e-8));
    }
    CHECK(dirichlet_energy(form, h) == doctest::Approx(1.0).epsilon(1e-9));

    // Zero boundary data gives the zero field.
    NodeField zero = harmonic_extension(m, form, half, NodeField(m.node_count(), 0.0));
    for (double v : zero) CHECK(v == 0.0);
}

TEST_CASE("iteration cap raises a solver error with the residual attached") {
    const Mesh m = line_mesh(201);
    const DirichletForm form = assemble_dirichlet_form(m);
    NodeField trace(m.node_count(), 0.0);
    trace[0] = 1.0;
    SolverOptions opts;
    opts.cap_factor = 0;  // cap = 10 iterations, far too few for n = 200
    try {
        harmonic_extension(m, form, NodeSet(m.node_count(), 1), trace, opts);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.last_residual() > 0.0);
        CHECK(e.iterations() >= 10);
    }
}

TEST_CASE("maximum principle on random admissible sets") {
    const Mesh m = line_mesh(101);
    const DirichletForm form = assemble_dirichlet_form(m);
    const double M = 0.8;
    NodeField trace(m.node_count(), 0.0);
    trace[0] = M;
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        NodeSet a = m.a0_nodes;
        const int extra = static_cast<int>(rng.next_below(80));
        // Random prefix extension plus random sprinkles.
        for (int i = 0; i < m.node_count(); ++i)
            if (m.xs[i] < 0.2 + extra * m.dx) a[i] = 1;
        for (int s = 0; s < 10; ++s) a[rng.next_below(m.node_count())] = 1;
        const NodeField h = harmonic_extension(m, form, a, trace);
        for (double v : h) {
            CHECK(v >= -1e-10);
            CHECK(v <= M + 1e-10);
        }
    }
}

TEST_CASE("energy optimality under admissible perturbations") {
    const Mesh m = line_mesh(101);
    const DirichletForm form = assemble_dirichlet_form(m);
    NodeField trace(m.node_count(), 0.0);
    trace[0] = 1.0;
    NodeSet a(m.node_count(), 0);
    for (int i = 0; i < m.node_count(); ++i)
        if (m.xs[i] < 0.6) a[i] = 1;
    const NodeField h = harmonic_extension(m, form, a, trace);
    const double e = dirichlet_energy(form, h);
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        NodeField v = h;
        for (int i = 0; i < m.node_count(); ++i)
            if (a[i] && !m.gamma_nodes[i]) v[i] += 0.1 * (rng.next_double() - 0.5);
        CHECK(dirichlet_energy(form, v) >= e - 1e-9);
    }
}

TEST_CASE("shape-energy monotonicity on nested sets") {
    const Mesh m = line_mesh(101);
    const DirichletForm form = assemble_dirichlet_form(m);
    NodeField trace(m.node_count(), 0.0);
    trace[0] = 1.0;
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        NodeSet a = m.a0_nodes;
        for (int i = 0; i < m.node_count(); ++i)
            if (m.xs[i] < 0.25 + 0.3 * rng.next_double()) a[i] = 1;
        NodeSet b = dilate(m, a, 1 + static_cast<int>(rng.next_below(10)));
        const double ea = dirichlet_energy(form, harmonic_extension(m, form, a, trace));
        const double eb = dirichlet_energy(form, harmonic_extension(m, form, b, trace));
        CHECK(ea >= eb - 1e-9);
    }
}

TEST_CASE("front-quantization error vanishes linearly under refinement") {
    // The 0.5-front ramp: exact energy 1.0; off-node fronts quantize to one
    // cell, so the discrete energy is off by O(dx).
    double prev_err = 1e9;
    for (int n : {52, 103, 205, 409}) {
        const Mesh m = line_mesh(n);
        const DirichletForm form = assemble_dirichlet_form(m);
        NodeField trace(m.node_count(), 0.0);
        trace[0] = 1.0;
        NodeSet a(m.node_count(), 0);
        for (int i = 0; i < m.node_count(); ++i)
            if (m.xs[i] < 0.5) a[i] = 1;
        const double e = dirichlet_energy(form, harmonic_extension(m, form, a, trace));
        const double err = std::abs(e - 1.0);
        CHECK(err <= 3.0 * m.dx);
        CHECK(err <= prev_err + 1e-12);
        prev_err = err;
    }
}

TEST_CASE("field distances") {
    const Mesh m = line_mesh(101);
    const DirichletForm form = assemble_dirichlet_form(m);
    NodeField f(m.node_count()), g(m.node_count(), 0.0);

    for (int i = 0; i < m.node_count(); ++i) f[i] = 0.0;
    auto d0 = field_distances(m, form, f, f);
    CHECK(d0.l2 == 0.0);
    CHECK(d0.h1 == 0.0);
    CHECK(d0.sup == 0.0);

    for (int i = 0; i < m.node_count(); ++i) f[i] = -0.3;
    auto dc = field_distances(m, form, f, g);
    CHECK(dc.l2 == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(dc.sup == doctest::Approx(0.3).epsilon(1e-12));

    for (int i = 0; i < m.node_count(); ++i) f[i] = m.xs[i];
    auto dr = field_distances(m, form, f, g);
    // Oracle: int x^2 = 1/3 (lumped quadrature error O(dx^2)), int 1 = 1.
    CHECK(dr.h1 * dr.h1 == doctest::Approx(1.0 / 3.0 + 1.0).epsilon(1e-3));
    CHECK(h1_norm(m, form, f) == doctest::Approx(dr.h1).epsilon(1e-14));
}
