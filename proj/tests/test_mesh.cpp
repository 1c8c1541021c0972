#include <cmath>

#include "debond/mesh.hpp"
#include "doctest.h"

using namespace debond;

namespace {

Mesh desk_mesh(int n) {
    return build_mesh(1, {1.0}, {n}, GammaSpec{Side::Left, 0, -1}, A0Spec{0.2, 0.0});
}

}  // namespace

TEST_CASE("coarse 1D mesh by construction") {
    const Mesh m = desk_mesh(5);
    REQUIRE(m.node_count() == 5);
    for (int i = 0; i < 5; ++i) CHECK(m.xs[i] == doctest::Approx(0.25 * i).epsilon(1e-14));
    CHECK(m.gamma_nodes == NodeSet{1, 0, 0, 0, 0});
    // Only the node inside the open strip (0, 0.2) counts; x = 0.25 is out.
    CHECK(m.a0_nodes == NodeSet{1, 0, 0, 0, 0});
    CHECK(m.boundary_nodes == NodeSet{1, 0, 0, 0, 1});
}

TEST_CASE("lumped weights sum to the domain measure") {
    const Mesh m = desk_mesh(401);
    double sum = 0.0;
    for (double w : m.weight) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("2D mesh weights against an independent cell loop") {
    const Mesh m = build_mesh(2, {1.0, 0.5}, {49, 25}, GammaSpec{Side::Left, 0, -1},
                              A0Spec{0.2, 0.0});
    REQUIRE(m.node_count() == 1225);
    double sum = 0.0;
    for (double w : m.weight) sum += w;
    // Oracle: accumulate cell areas one by one.
    double cells = 0.0;
    for (int j = 0; j + 1 < 25; ++j)
        for (int i = 0; i + 1 < 49; ++i) cells += m.dx * m.dy;
    CHECK(sum == doctest::Approx(cells).epsilon(1e-12));
    CHECK(sum == doctest::Approx(0.5).epsilon(1e-12));

    for (int i = 0; i < m.node_count(); ++i) {
        if (m.xs[i] < 0.2 - 1e-9) CHECK(m.a0_nodes[i]);
        if (m.xs[i] >= 0.2) CHECK(!m.a0_nodes[i]);
    }
}

TEST_CASE("marker invariants") {
    const Mesh m = desk_mesh(41);
    CHECK(set_count(m.gamma_nodes) > 0);
    CHECK(set_subset(m.gamma_nodes, m.boundary_nodes));
    CHECK(set_subset(m.gamma_nodes, m.a0_nodes));
    // Discrete neighborhood: every node within the strip depth is marked.
    for (int i = 0; i < m.node_count(); ++i)
        if (m.distance_to_gamma(i) < 0.2 - 1e-9) CHECK(m.a0_nodes[i]);
}

TEST_CASE("strip must reach the loaded boundary") {
    CHECK_THROWS_AS(build_mesh(1, {1.0}, {11}, GammaSpec{Side::Left, 0, -1}, A0Spec{0.0, 0.0}),
                    ConfigError);
    CHECK_THROWS_AS(build_mesh(1, {1.0}, {11}, GammaSpec{Side::Left, 0, -1}, A0Spec{0.2, 0.1}),
                    ConfigError);
    CHECK_THROWS_AS(build_mesh(1, {1.0}, {2}, GammaSpec{Side::Left, 0, -1}, A0Spec{0.2, 0.0}),
                    ConfigError);
}

TEST_CASE("set integral") {
    const Mesh m = desk_mesh(401);
    const int n = m.node_count();
    NodeField kappa(n, 1.0);

    NodeSet empty(n, 0);
    CHECK(set_integral(m, empty, kappa) == 0.0);

    NodeSet mid(n, 0);
    for (int i = 0; i < n; ++i)
        if (m.xs[i] > 0.2 && m.xs[i] < 0.7) mid[i] = 1;
    CHECK(std::abs(set_integral(m, mid, kappa) - 0.5) <= m.dx);

    // Additivity over a disjoint split.
    NodeSet left(n, 0), right(n, 0);
    for (int i = 0; i < n; ++i)
        if (mid[i]) ((m.xs[i] < 0.45) ? left : right)[i] = 1;
    CHECK(set_integral(m, left, kappa) + set_integral(m, right, kappa) ==
          doctest::Approx(set_integral(m, mid, kappa)).epsilon(1e-14));
}

TEST_CASE("set utilities") {
    const Mesh m = desk_mesh(11);
    NodeSet a(11, 0), b(11, 0);
    a[0] = a[1] = 1;
    b[1] = b[2] = 1;
    CHECK(set_count(set_union(a, b)) == 3);
    // Symmetric difference {0, 2}: boundary node carries half a cell.
    CHECK(symmetric_difference_measure(m, a, b) == doctest::Approx(1.5 * m.dx).epsilon(1e-12));
    CHECK(set_subset(a, set_union(a, b)));

    NodeSet d = dilate(m, a, 1);
    CHECK(d == NodeSet{1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0});

    // Front position: midpoint of the cell containing the free boundary.
    CHECK(front_position_1d(m, a) == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(front_position_1d(m, NodeSet(11, 1)) == doctest::Approx(1.0));
    CHECK(area_fraction(m, NodeSet(11, 1)) == doctest::Approx(1.0).epsilon(1e-12));
}
