#include "debond/dirichlet.hpp"

#include <algorithm>
#include <cmath>

namespace debond {

double CsrMatrix::diagonal(int row) const {
    for (int k = ptr[row]; k < ptr[row + 1]; ++k)
        if (col[k] == row) return val[k];
    return 0.0;
}

void CsrMatrix::apply(const NodeField& x, NodeField& y) const {
    y.assign(n, 0.0);
    for (int r = 0; r < n; ++r) {
        double acc = 0.0;
        for (int k = ptr[r]; k < ptr[r + 1]; ++k) acc += val[k] * x[col[k]];
        y[r] = acc;
    }
}

double CsrMatrix::row_dot_offdiag(int row, const NodeField& x) const {
    double acc = 0.0;
    for (int k = ptr[row]; k < ptr[row + 1]; ++k)
        if (col[k] != row) acc += val[k] * x[col[k]];
    return acc;
}

DirichletForm assemble_dirichlet_form(const Mesh& mesh) {
    DirichletForm form;
    const int n = mesh.node_count();
    const int nx = mesh.counts[0];
    const int ny = mesh.dimension == 2 ? mesh.counts[1] : 1;

    // Edge-wise assembly: each grid edge carries transverse-width / length.
    // Widths are halved on boundary rows/columns so that the quadratic form
    // reproduces the Dirichlet integral exactly for piecewise-(bi)linear data.
    auto wy = [&](int j) {
        if (mesh.dimension == 1) return 1.0;
        return (j == 0 || j == ny - 1) ? mesh.dy / 2.0 : mesh.dy;
    };
    auto wx = [&](int i) { return (i == 0 || i == nx - 1) ? mesh.dx / 2.0 : mesh.dx; };

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int id = j * nx + i;
            if (i + 1 < nx) {
                form.edges.push_back({id, id + 1});
                form.edge_weight.push_back(wy(j) / mesh.dx);
            }
            if (mesh.dimension == 2 && j + 1 < ny) {
                form.edges.push_back({id, id + nx});
                form.edge_weight.push_back(wx(i) / mesh.dy);
            }
        }
    }

    // Build CSR from the edge list (diagonal = sum of incident weights).
    std::vector<int> deg(n, 1);  // diagonal entry per row
    for (const auto& e : form.edges) {
        ++deg[e[0]];
        ++deg[e[1]];
    }
    CsrMatrix& K = form.K;
    K.n = n;
    K.ptr.assign(n + 1, 0);
    for (int r = 0; r < n; ++r) K.ptr[r + 1] = K.ptr[r] + deg[r];
    K.col.assign(K.ptr[n], 0);
    K.val.assign(K.ptr[n], 0.0);

    std::vector<int> cursor(n);
    for (int r = 0; r < n; ++r) {
        cursor[r] = K.ptr[r] + 1;  // slot 0 reserved for the diagonal
        K.col[K.ptr[r]] = r;
    }
    for (std::size_t e = 0; e < form.edges.size(); ++e) {
        const int a = form.edges[e][0];
        const int b = form.edges[e][1];
        const double w = form.edge_weight[e];
        K.val[K.ptr[a]] += w;
        K.val[K.ptr[b]] += w;
        K.col[cursor[a]] = b;
        K.val[cursor[a]++] = -w;
        K.col[cursor[b]] = a;
        K.val[cursor[b]++] = -w;
    }
    // Sort each row by column for deterministic traversal.
    for (int r = 0; r < n; ++r) {
        std::vector<std::pair<int, double>> row;
        for (int k = K.ptr[r]; k < K.ptr[r + 1]; ++k) row.emplace_back(K.col[k], K.val[k]);
        std::sort(row.begin(), row.end());
        for (int k = K.ptr[r]; k < K.ptr[r + 1]; ++k) {
            K.col[k] = row[k - K.ptr[r]].first;
            K.val[k] = row[k - K.ptr[r]].second;
        }
    }
    return form;
}

double dirichlet_energy(const DirichletForm& form, const NodeField& v) {
    double acc = 0.0;
    for (std::size_t e = 0; e < form.edges.size(); ++e) {
        const double d = v[form.edges[e][0]] - v[form.edges[e][1]];
        acc += form.edge_weight[e] * d * d;
    }
    return 0.5 * acc;
}

double bilinear(const DirichletForm& form, const NodeField& a, const NodeField& b) {
    double acc = 0.0;
    for (std::size_t e = 0; e < form.edges.size(); ++e) {
        const int i = form.edges[e][0];
        const int j = form.edges[e][1];
        acc += form.edge_weight[e] * (a[i] - a[j]) * (b[i] - b[j]);
    }
    return acc;
}

void pcg_solve(const ReducedSystem& sys, const std::vector<double>& rhs, std::vector<double>& x,
               const SolverOptions& opts, SolveStats* stats) {
    const auto& K = *sys.K;
    const auto& free_nodes = sys.free_nodes;
    const int nf = static_cast<int>(free_nodes.size());
    if (stats) *stats = {};
    if (nf == 0) return;

    std::vector<double> diag(nf);
    for (int f = 0; f < nf; ++f) {
        diag[f] = K.diagonal(free_nodes[f]);
        if (sys.diag_shift) diag[f] += (*sys.diag_shift)[f];
    }

    // y = A_ff x restricted to free nodes.
    std::vector<double> full(K.n, 0.0);
    auto apply_ff = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (int f = 0; f < nf; ++f) full[free_nodes[f]] = in[f];
        for (int f = 0; f < nf; ++f) {
            const int r = free_nodes[f];
            double acc = 0.0;
            for (int k = K.ptr[r]; k < K.ptr[r + 1]; ++k) {
                const int c = K.col[k];
                if (sys.free_index_of_node[c] >= 0) acc += K.val[k] * full[c];
            }
            if (sys.diag_shift) acc += (*sys.diag_shift)[f] * in[f];
            out[f] = acc;
        }
        for (int f = 0; f < nf; ++f) full[free_nodes[f]] = 0.0;
    };

    double bnorm = 0.0;
    for (double v : rhs) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0 && std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) return;

    std::vector<double> r(nf), z(nf), p(nf), Ap(nf);
    apply_ff(x, Ap);
    for (int f = 0; f < nf; ++f) r[f] = rhs[f] - Ap[f];

    // Both tolerances must hold: relative for scale-free accuracy, absolute so
    // that pointwise stiffness residuals stay small on strongly scaled data.
    const double target = bnorm > 0.0 ? std::min(opts.atol, opts.rtol * bnorm) : opts.atol;
    auto res_norm = [&]() {
        double s = 0.0;
        for (double v : r) s += v * v;
        return std::sqrt(s);
    };

    double rn = res_norm();
    const int cap = opts.cap_factor * nf + 10;
    int it = 0;
    double rz = 0.0;
    while (rn > target) {
        if (it >= cap) {
            if (stats) {
                stats->iterations = it;
                stats->relative_residual = rn / std::max(bnorm, 1e-300);
            }
            throw SolverError("constrained harmonic solve exceeded its iteration cap",
                              rn / std::max(bnorm, 1e-300), it);
        }
        for (int f = 0; f < nf; ++f) z[f] = r[f] / diag[f];
        double rz_new = 0.0;
        for (int f = 0; f < nf; ++f) rz_new += r[f] * z[f];
        if (it == 0) {
            p = z;
        } else {
            const double beta = rz_new / rz;
            for (int f = 0; f < nf; ++f) p[f] = z[f] + beta * p[f];
        }
        rz = rz_new;
        apply_ff(p, Ap);
        double pAp = 0.0;
        for (int f = 0; f < nf; ++f) pAp += p[f] * Ap[f];
        if (pAp <= 0.0) break;  // numerically singular direction; accept iterate
        const double alpha = rz / pAp;
        for (int f = 0; f < nf; ++f) {
            x[f] += alpha * p[f];
            r[f] -= alpha * Ap[f];
        }
        rn = res_norm();
        ++it;
    }
    if (stats) {
        stats->iterations = it;
        stats->relative_residual = rn / std::max(bnorm, 1e-300);
    }
}

NodeField harmonic_extension(const Mesh& mesh, const DirichletForm& form, const NodeSet& set_a,
                             const NodeField& gamma_values, const SolverOptions& opts,
                             SolveStats* stats, const NodeField* initial_guess) {
    const int n = mesh.node_count();
    NodeField out(n, 0.0);

    ReducedSystem sys;
    sys.K = &form.K;
    sys.free_index_of_node.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        if (mesh.gamma_nodes[i]) {
            out[i] = gamma_values[i];
        } else if (!set_a[i]) {
            out[i] = 0.0;
        } else {
            sys.free_index_of_node[i] = static_cast<int>(sys.free_nodes.size());
            sys.free_nodes.push_back(i);
        }
    }

    const int nf = static_cast<int>(sys.free_nodes.size());
    std::vector<double> rhs(nf, 0.0);
    for (int f = 0; f < nf; ++f) {
        const int r = sys.free_nodes[f];
        double acc = 0.0;
        for (int k = form.K.ptr[r]; k < form.K.ptr[r + 1]; ++k) {
            const int c = form.K.col[k];
            if (sys.free_index_of_node[c] < 0) acc += form.K.val[k] * out[c];
        }
        rhs[f] = -acc;
    }

    std::vector<double> x(nf, 0.0);
    if (initial_guess)
        for (int f = 0; f < nf; ++f) x[f] = (*initial_guess)[sys.free_nodes[f]];
    pcg_solve(sys, rhs, x, opts, stats);
    for (int f = 0; f < nf; ++f) out[sys.free_nodes[f]] = x[f];
    return out;
}

FieldDistances field_distances(const Mesh& mesh, const DirichletForm& form, const NodeField& f,
                               const NodeField& g) {
    FieldDistances d;
    NodeField diff(f.size());
    double l2sq = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        diff[i] = f[i] - g[i];
        l2sq += mesh.weight[i] * diff[i] * diff[i];
        d.sup = std::max(d.sup, std::abs(diff[i]));
    }
    d.l2 = std::sqrt(l2sq);
    d.h1 = std::sqrt(l2sq + 2.0 * dirichlet_energy(form, diff));
    return d;
}

double h1_norm(const Mesh& mesh, const DirichletForm& form, const NodeField& f) {
    NodeField zero(f.size(), 0.0);
    return field_distances(mesh, form, f, zero).h1;
}

}  // namespace debond
