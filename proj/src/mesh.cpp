#include "debond/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace debond {

namespace {

// Guard band for open-set membership of node coordinates; keeps i*dx == bound
// cases (inexact in binary) on the excluded side, matching open intervals.
double geom_eps(double length) { return 1e-12 * length; }

}  // namespace

double Mesh::domain_measure() const {
    double m = lengths[0];
    if (dimension == 2) m *= lengths[1];
    return m;
}

double Mesh::distance_to_gamma(int i) const {
    double axis = 0.0;   // distance from the loaded side
    double cross = 0.0;  // coordinate along that side
    const double lx = lengths[0];
    const double ly = dimension == 2 ? lengths[1] : 0.0;
    switch (gamma_side) {
        case Side::Left: axis = xs[i]; cross = dimension == 2 ? ys[i] : 0.0; break;
        case Side::Right: axis = lx - xs[i]; cross = dimension == 2 ? ys[i] : 0.0; break;
        case Side::Bottom: axis = ys[i]; cross = xs[i]; break;
        case Side::Top: axis = ly - ys[i]; cross = xs[i]; break;
    }
    if (dimension == 1 || gamma_hi < gamma_lo) return axis;
    const double off = std::max({0.0, gamma_lo - cross, cross - gamma_hi});
    return std::sqrt(axis * axis + off * off);
}

Mesh build_mesh(int dimension, const std::vector<double>& lengths,
                const std::vector<int>& node_counts, const GammaSpec& gamma_spec,
                const A0Spec& a0_spec) {
    std::vector<std::string> bad;
    if (dimension != 1 && dimension != 2) bad.push_back("dimension must be 1 or 2");
    if (static_cast<int>(lengths.size()) < dimension ||
        static_cast<int>(node_counts.size()) < dimension)
        bad.push_back("lengths/node_counts must provide one entry per axis");
    if (!bad.empty()) throw ConfigError(bad);
    for (int a = 0; a < dimension; ++a) {
        if (node_counts[a] < 3) bad.push_back("node_counts must be >= 3 per axis");
        if (lengths[a] <= 0.0) bad.push_back("lengths must be positive");
    }
    if (a0_spec.offset != 0.0)
        bad.push_back(
            "initially debonded strip must touch the loaded boundary "
            "(offset 0): the debonded region has to cover a neighborhood of it");
    if (a0_spec.depth <= 0.0)
        bad.push_back(
            "initially debonded strip must have positive depth: the debonded "
            "region has to cover a neighborhood of the loaded boundary");
    if (dimension == 1 && (gamma_spec.side == Side::Bottom || gamma_spec.side == Side::Top))
        bad.push_back("1D meshes only have left/right boundary sides");
    if (!bad.empty()) throw ConfigError(bad);

    Mesh m;
    m.dimension = dimension;
    m.lengths.assign(lengths.begin(), lengths.begin() + dimension);
    m.counts.assign(node_counts.begin(), node_counts.begin() + dimension);
    m.gamma_side = gamma_spec.side;
    m.gamma_lo = gamma_spec.lo;
    m.gamma_hi = gamma_spec.hi;

    const int nx = m.counts[0];
    const int ny = dimension == 2 ? m.counts[1] : 1;
    const double lx = m.lengths[0];
    const double ly = dimension == 2 ? m.lengths[1] : 0.0;
    m.dx = lx / (nx - 1);
    m.dy = dimension == 2 ? ly / (ny - 1) : 0.0;

    const int n = nx * ny;
    m.xs.resize(n);
    m.ys.resize(dimension == 2 ? n : 0);
    m.weight.assign(n, 0.0);
    m.gamma_nodes.assign(n, 0);
    m.a0_nodes.assign(n, 0);
    m.boundary_nodes.assign(n, 0);
    m.neighbors.assign(n, {-1, -1, -1, -1});

    auto wx = [&](int i) { return (i == 0 || i == nx - 1) ? m.dx / 2.0 : m.dx; };
    auto wy = [&](int j) { return (j == 0 || j == ny - 1) ? m.dy / 2.0 : m.dy; };

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int id = j * nx + i;
            m.xs[id] = i * lx / (nx - 1);
            if (dimension == 2) m.ys[id] = j * ly / (ny - 1);
            m.weight[id] = dimension == 1 ? wx(i) : wx(i) * wy(j);
            const bool bx = (i == 0 || i == nx - 1);
            const bool by = dimension == 2 && (j == 0 || j == ny - 1);
            m.boundary_nodes[id] = (bx || by) ? 1 : 0;
            auto& nb = m.neighbors[id];
            int k = 0;
            if (i > 0) nb[k++] = id - 1;
            if (i < nx - 1) nb[k++] = id + 1;
            if (dimension == 2 && j > 0) nb[k++] = id - nx;
            if (dimension == 2 && j < ny - 1) nb[k++] = id + nx;
        }
    }

    // Gamma nodes: the requested edge (or a sub-span of it in 2D).
    const double span_lo = gamma_spec.lo;
    const double span_hi = gamma_spec.hi;
    const bool whole_edge = span_hi < span_lo;
    auto in_span = [&](double c) {
        return whole_edge || (c >= span_lo - geom_eps(lx + ly) && c <= span_hi + geom_eps(lx + ly));
    };
    int gamma_count = 0;
    for (int id = 0; id < n; ++id) {
        const double x = m.xs[id];
        const double y = dimension == 2 ? m.ys[id] : 0.0;
        bool g = false;
        switch (gamma_spec.side) {
            case Side::Left: g = (m.xs[id] <= geom_eps(lx)) && (dimension == 1 || in_span(y)); break;
            case Side::Right: g = (m.xs[id] >= lx - geom_eps(lx)) && (dimension == 1 || in_span(y)); break;
            case Side::Bottom: g = (y <= geom_eps(ly)) && in_span(x); break;
            case Side::Top: g = (y >= ly - geom_eps(ly)) && in_span(x); break;
        }
        if (g) {
            m.gamma_nodes[id] = 1;
            ++gamma_count;
        }
    }
    if (gamma_count == 0)
        throw ConfigError("loaded boundary segment selects no nodes (needs positive measure)");
    if (dimension == 2 && gamma_count < 2)
        throw ConfigError("loaded boundary segment has zero extent on the edge");

    // Initially debonded nodes: distance from the gamma side below the strip
    // depth (open strip; the far bounding line is excluded).
    const double depth = a0_spec.depth;
    for (int id = 0; id < n; ++id) {
        double dist = 0.0;
        switch (gamma_spec.side) {
            case Side::Left: dist = m.xs[id]; break;
            case Side::Right: dist = lx - m.xs[id]; break;
            case Side::Bottom: dist = m.ys[id]; break;
            case Side::Top: dist = ly - m.ys[id]; break;
        }
        if (dist < depth - geom_eps(lx + ly)) m.a0_nodes[id] = 1;
    }

    for (int id = 0; id < n; ++id)
        if (m.gamma_nodes[id] && !m.a0_nodes[id])
            throw ConfigError(
                "initially debonded strip does not reach the loaded boundary "
                "segment; it must cover a neighborhood of it");

    return m;
}

double set_integral(const Mesh& mesh, const NodeSet& set, const NodeField& density) {
    double acc = 0.0;
    for (int i = 0; i < mesh.node_count(); ++i)
        if (set[i]) acc += mesh.weight[i] * density[i];
    return acc;
}

int set_count(const NodeSet& s) {
    int c = 0;
    for (auto v : s) c += v ? 1 : 0;
    return c;
}

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
    NodeSet out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] || b[i]) ? 1 : 0;
    return out;
}

bool set_subset(const NodeSet& a, const NodeSet& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] && !b[i]) return false;
    return true;
}

double symmetric_difference_measure(const Mesh& mesh, const NodeSet& a, const NodeSet& b) {
    double acc = 0.0;
    for (int i = 0; i < mesh.node_count(); ++i)
        if ((a[i] != 0) != (b[i] != 0)) acc += mesh.weight[i];
    return acc;
}

NodeSet dilate(const Mesh& mesh, const NodeSet& s, int rounds) {
    NodeSet cur = s;
    for (int r = 0; r < rounds; ++r) {
        NodeSet next = cur;
        for (int i = 0; i < mesh.node_count(); ++i) {
            if (!cur[i]) continue;
            for (int nb : mesh.neighbors[i])
                if (nb >= 0) next[nb] = 1;
        }
        cur = std::move(next);
    }
    return cur;
}

double front_position_1d(const Mesh& mesh, const NodeSet& s) {
    int last = -1;
    for (int i = 0; i < mesh.node_count(); ++i)
        if (s[i]) last = i;
    if (last < 0) return 0.0;
    if (last == mesh.node_count() - 1) return mesh.lengths[0];
    return 0.5 * (mesh.xs[last] + mesh.xs[last + 1]);
}

double area_fraction(const Mesh& mesh, const NodeSet& s) {
    double acc = 0.0;
    for (int i = 0; i < mesh.node_count(); ++i)
        if (s[i]) acc += mesh.weight[i];
    return acc / mesh.domain_measure();
}

}  // namespace debond
