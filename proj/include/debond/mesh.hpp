#pragma once

#include <array>
#include <vector>

#include "debond/types.hpp"

namespace debond {

enum class Side { Left, Right, Bottom, Top };

/// Boundary segment carrying the prescribed displacement. In 1D only `side`
/// matters; in 2D `lo`/`hi` select a sub-span of the edge (hi < lo means the
/// whole edge).
struct GammaSpec {
    Side side = Side::Left;
    double lo = 0.0;
    double hi = -1.0;
};

/// Initially debonded strip, measured from the gamma side into the domain.
/// `offset` must be zero: the strip has to reach the loaded boundary.
struct A0Spec {
    double depth = 0.0;
    double offset = 0.0;
};

/// Structured discretization of the membrane: interval in 1D, axis-aligned
/// rectangle in 2D. Node ordering is lexicographic (x fastest, then y).
struct Mesh {
    int dimension = 1;
    std::vector<double> lengths;  // {Lx} or {Lx, Ly}
    std::vector<int> counts;      // nodes per axis
    double dx = 0.0;
    double dy = 0.0;  // 0 in 1D

    std::vector<double> xs;  // per-node coordinates
    std::vector<double> ys;  // empty in 1D

    NodeField weight;  // lumped quadrature weight m_i, sums to |Omega|
    NodeSet gamma_nodes;
    NodeSet a0_nodes;
    NodeSet boundary_nodes;

    // Loaded-segment geometry (used for distance-based loading profiles).
    Side gamma_side = Side::Left;
    double gamma_lo = 0.0;
    double gamma_hi = -1.0;  // hi < lo: whole edge

    /// Euclidean distance from node i to the loaded boundary segment.
    double distance_to_gamma(int i) const;

    /// 4-connected neighbor indices, -1 padded (2 used in 1D).
    std::vector<std::array<int, 4>> neighbors;

    int node_count() const { return static_cast<int>(xs.size()); }
    double domain_measure() const;
    bool in_gamma(int i) const { return gamma_nodes[i] != 0; }
    bool in_a0(int i) const { return a0_nodes[i] != 0; }
};

/// Builds the structured mesh with node markers and lumped weights.
/// Throws ConfigError when the initial strip does not cover a neighborhood of
/// the loaded boundary segment (zero depth, positive offset, or a gamma
/// segment of nonpositive extent in 2D).
Mesh build_mesh(int dimension, const std::vector<double>& lengths,
                const std::vector<int>& node_counts, const GammaSpec& gamma_spec,
                const A0Spec& a0_spec);

/// Lumped integral of `density` over the node set.
double set_integral(const Mesh& mesh, const NodeSet& set, const NodeField& density);

// ---- node-set utilities ----------------------------------------------------

int set_count(const NodeSet& s);
NodeSet set_union(const NodeSet& a, const NodeSet& b);
bool set_subset(const NodeSet& a, const NodeSet& b);  // a included in b
/// Lumped measure of the symmetric difference.
double symmetric_difference_measure(const Mesh& mesh, const NodeSet& a, const NodeSet& b);
/// Grows the set by `rounds` layers of 4-connected neighbors.
NodeSet dilate(const Mesh& mesh, const NodeSet& s, int rounds);

/// 1D debonded-front position: midpoint between the last included node and the
/// first excluded one (the free boundary is resolved to one cell).
double front_position_1d(const Mesh& mesh, const NodeSet& s);
/// Lumped measure of the set divided by the domain measure.
double area_fraction(const Mesh& mesh, const NodeSet& s);

}  // namespace debond
