#include <cmath>

#include "debond/density.hpp"
#include "debond/mesh.hpp"
#include "doctest.h"
#include "support/mutants.hpp"

using namespace debond;

namespace {

Mesh desk_mesh(int n = 101) {
    return build_mesh(1, {1.0}, {n}, GammaSpec{Side::Left, 0, -1}, A0Spec{0.2, 0.0});
}

int off_strip_node(const Mesh& m) {
    for (int i = 0; i < m.node_count(); ++i)
        if (!m.in_a0(i)) return i;
    return -1;
}

}  // namespace

TEST_CASE("loading-curve evaluation") {
    const Mesh m = desk_mesh();
    const PsiFamily fam(m, 1.0, 1.0);

    auto [p0, dp0] = fam.psi(0.0);
    CHECK(p0 == 0.0);
    CHECK(dp0 == doctest::Approx(1.0).epsilon(1e-14));

    auto [p1, dp1] = fam.psi(1.0);
    CHECK(p1 == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
    CHECK(dp1 == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

    auto [pinf, dpinf] = fam.psi(60.0);
    CHECK(pinf == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dpinf > 0.0);

    CHECK_THROWS_AS(fam.psi(-0.1), DomainError);
}

TEST_CASE("density evaluation on both branches") {
    const Mesh m = desk_mesh();
    const PsiFamily fam(m, 1.0, 1.0);
    const int i = off_strip_node(m);

    CHECK(fam.eval(i, 0.0, 0.0) == 0.0);
    CHECK(fam.eval(i, 1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));

    // Unloading branch, recomputed by hand from the parabola coefficients.
    const double e2 = std::exp(-2.0);
    const double expect = e2 / 4.0 + (1.0 - e2) - e2;
    CHECK(fam.eval(i, 1.0, 2.0) == doctest::Approx(expect).epsilon(1e-14));

    // Recorded opening below the current one is ignored.
    CHECK(fam.eval(i, 2.0, 1.0) == doctest::Approx(fam.eval(i, 2.0, 2.0)).epsilon(1e-14));

    // The strip never stores surface energy.
    CHECK(fam.eval(0, 5.0, 5.0) == 0.0);

    CHECK_THROWS_AS(fam.eval(i, -1.0, 0.0), DomainError);
    CHECK_THROWS_AS(fam.eval(i, 0.0, -1.0), DomainError);
}

TEST_CASE("seam continuity of the two branches") {
    const Mesh m = desk_mesh();
    const PsiFamily fam(m, 1.3, 2.0);
    const int i = off_strip_node(m);
    for (double z : {0.1, 0.5, 1.0, 3.0, 10.0}) {
        const double below = fam.eval(i, z * (1.0 - 1e-12), z);
        const double at = fam.eval(i, z, z);
        CHECK(std::abs(below - at) <= 1e-9);
    }
}

TEST_CASE("rescaled evaluation") {
    const Mesh m = desk_mesh();
    const PsiFamily fam(m, 1.0, 1.0);
    const int i = off_strip_node(m);

    CHECK(fam.eval_rescaled(i, 0.0, 0.0, 0.3) == 0.0);
    CHECK(fam.eval_rescaled(i, 1.0, 1.0, 0.01) ==
          doctest::Approx(1.0 - std::exp(-100.0)).epsilon(1e-14));
    CHECK(fam.eval_rescaled(i, 0.7, 0.9, 1.0) ==
          doctest::Approx(fam.eval(i, 0.7, 0.9)).epsilon(1e-14));
    CHECK_THROWS_AS(fam.eval_rescaled(i, 1.0, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(fam.eval_rescaled(i, 1.0, 1.0, -1.0), DomainError);

    // Sharpening is monotone: smaller eps never decreases the density.
    for (double y : {0.2, 1.0, 3.0})
        for (double z : {0.2, 1.0, 3.0}) {
            double prev = -1.0;
            for (double eps : {1.0, 0.5, 0.25, 0.05}) {
                const double v = fam.eval_rescaled(i, y, z, eps);
                CHECK(v >= prev - 1e-14);
                prev = v;
            }
        }
}

TEST_CASE("saturation limit is a valid toughness") {
    const Mesh m = desk_mesh();
    const PsiFamily fam(m, 2.5, 1.0);
    ToughnessField t;
    t.kappa = fam.kappa_phi_field(m.node_count());
    t.validate(m);  // zero on the strip, positive elsewhere
    for (int i = 0; i < m.node_count(); ++i)
        CHECK(t.kappa[i] == (m.in_a0(i) ? 0.0 : 2.5));
}

TEST_CASE("axiom audit accepts the shipped family") {
    const Mesh m = desk_mesh();
    const PsiFamily fam(m, 1.0, 1.0);
    const AxiomReport report = axiom_audit(fam, m);
    for (const auto& f : report.findings) {
        INFO(f.axiom, " worst=", f.worst, " at ", f.detail);
        CHECK(f.pass);
    }
}

TEST_CASE("mutated densities fail exactly the intended axiom") {
    const Mesh m = desk_mesh();
    const PsiFamily fam(m, 1.0, 1.0);

    const testing::ShiftedDensity shifted(m, fam, 0.1);
    const AxiomReport rs = axiom_audit(shifted, m);
    for (const auto& f : rs.findings) {
        INFO(f.axiom);
        CHECK(f.pass == (f.axiom != "zero-at-origin"));
    }

    const testing::DipDensity dipped(m, fam);
    const AxiomReport rd = axiom_audit(dipped, m);
    for (const auto& f : rd.findings) {
        INFO(f.axiom);
        CHECK(f.pass == (f.axiom != "monotone"));
    }

    const PsiFamily violating = testing::strip_violating_density(m, 1.0, 1.0);
    const AxiomReport rv = axiom_audit(violating, m);
    for (const auto& f : rv.findings) {
        INFO(f.axiom);
        CHECK(f.pass == (f.axiom != "strip-compatibility"));
    }
}

TEST_CASE("quadratic majorant dominates and touches") {
    const Mesh m = desk_mesh();
    const PsiFamily fam(m, 1.0, 1.5);
    const int i = off_strip_node(m);
    const double eps = 0.1;
    for (double gamma : {0.0, 0.05, 0.3})
        for (double s0 : {0.0, 0.02, 0.08, 0.4}) {
            double c2 = 0.0, c1 = 0.0;
            REQUIRE(fam.quadratic_majorant(i, eps, gamma / eps, s0, c2, c1));
            const auto base = fam.eval(i, s0 / eps, gamma / eps);
            const double at_touch = c2 * s0 * s0 + c1 * s0;
            double offset = base - at_touch;  // majorant carries a free constant
            for (double s = 0.0; s <= 1.0; s += 0.01) {
                const double maj = c2 * s * s + c1 * s + offset;
                const double phi = fam.eval(i, s / eps, gamma / eps);
                CHECK(maj >= phi - 1e-9);
            }
        }
}

TEST_CASE("loading program") {
    const Mesh m = desk_mesh();
    const Loading l = make_loading(m, 0.1, {0.0, 1.0}, {0.0, 1.0});
    CHECK(l.ceiling == doctest::Approx(1.0));
    CHECK(l.g[0] == 1.0);
    for (int i = 0; i < m.node_count(); ++i) {
        CHECK(l.g[i] == doctest::Approx(std::max(0.0, 1.0 - m.xs[i] / 0.1)).epsilon(1e-12));
        if (!m.in_a0(i) && !m.in_gamma(i)) CHECK(l.g[i] == 0.0);
    }

    auto [w0, wdot0] = loading_eval(l, 0.0);
    for (double v : w0) CHECK(v == 0.0);
    for (int i = 0; i < m.node_count(); ++i)
        CHECK(wdot0[i] == doctest::Approx(l.g[i]).epsilon(1e-14));

    auto [w, wdot] = loading_eval(l, 0.5);
    for (int i = 0; i < m.node_count(); ++i) {
        CHECK(w[i] == doctest::Approx(0.5 * l.g[i]).epsilon(1e-14));
        CHECK(wdot[i] == doctest::Approx(l.g[i]).epsilon(1e-14));
        if (!m.in_a0(i) && !m.in_gamma(i)) CHECK(w[i] == 0.0);
    }
    CHECK_THROWS_AS(loading_eval(l, -0.5), DomainError);
    CHECK_THROWS_AS(loading_eval(l, 1.5), DomainError);

    // Piecewise amplitude: right derivative at the breakpoint.
    const Loading l2 = make_loading(m, 0.1, {0.0, 0.5, 1.0}, {0.0, 1.0, 0.5});
    CHECK(l2.lambda_rate(0.25) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(l2.lambda_rate(0.5) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(l2.lambda_rate(1.0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(l2.lambda(0.75) == doctest::Approx(0.75).epsilon(1e-12));

    // Profile support must fit inside the strip.
    CHECK_THROWS_AS(make_loading(m, 0.5, {0.0, 1.0}, {0.0, 1.0}), ConfigError);
}
