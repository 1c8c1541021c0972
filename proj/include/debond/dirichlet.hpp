#pragma once

#include <vector>

#include "debond/mesh.hpp"
#include "debond/types.hpp"

namespace debond {

/// Compressed sparse rows, symmetric by construction here.
struct CsrMatrix {
    int n = 0;
    std::vector<int> ptr;  // size n+1
    std::vector<int> col;
    std::vector<double> val;

    double diagonal(int row) const;
    /// y = A x
    void apply(const NodeField& x, NodeField& y) const;
    /// Dot product of row `row` with x, skipping the diagonal entry.
    double row_dot_offdiag(int row, const NodeField& x) const;
};

/// Stiffness operator K with 0.5 * v'Kv approximating the Dirichlet energy
/// 0.5 * integral of |grad v|^2. Piecewise-linear elements in 1D, the 5-point
/// stencil (edge-wise finite volumes) in 2D. Rows sum to zero.
struct DirichletForm {
    CsrMatrix K;
    /// Edge list (a < b) with weights w so that v'Kv = sum_e w_e*(v_a - v_b)^2;
    /// kept for chain-structured dynamic programming and energy breakdowns.
    std::vector<std::array<int, 2>> edges;
    std::vector<double> edge_weight;
};

DirichletForm assemble_dirichlet_form(const Mesh& mesh);

/// 0.5 * v'Kv  (always >= 0).
double dirichlet_energy(const DirichletForm& form, const NodeField& v);

/// Symmetric-product energy between two fields: a'Kb.
double bilinear(const DirichletForm& form, const NodeField& a, const NodeField& b);

struct SolveStats {
    int iterations = 0;
    double relative_residual = 0.0;
};

struct SolverOptions {
    double rtol = 1e-10;
    double atol = 1e-9;
    int cap_factor = 10;  // iteration cap = cap_factor * n_free
};

/// Minimizer of the Dirichlet energy among fields equal to `gamma_values` on
/// the loaded boundary nodes and zero outside `set_a`; remaining nodes are
/// free (natural boundary conditions elsewhere). Jacobi-preconditioned CG on
/// the free block, fixed order, no randomization. Throws SolverError if the
/// iteration cap is exceeded.
NodeField harmonic_extension(const Mesh& mesh, const DirichletForm& form, const NodeSet& set_a,
                             const NodeField& gamma_values, const SolverOptions& opts = {},
                             SolveStats* stats = nullptr, const NodeField* initial_guess = nullptr);

struct FieldDistances {
    double l2 = 0.0;
    double h1 = 0.0;
    double sup = 0.0;
};

/// Lumped L2, full H1 and sup distance between two nodal fields.
FieldDistances field_distances(const Mesh& mesh, const DirichletForm& form, const NodeField& f,
                               const NodeField& g);

/// Lumped L2 and H1 norms of a single field.
double h1_norm(const Mesh& mesh, const DirichletForm& form, const NodeField& f);

/// Jacobi-preconditioned CG for K_ff x_f = b_f on an explicit free-node list,
/// with `diag_shift` added to the diagonal (SPD as long as shifts are >= 0 and
/// the free block is connected to fixed nodes). Shared by the harmonic solver
/// and the step minimizer's quadratic subproblems.
struct ReducedSystem {
    const CsrMatrix* K = nullptr;
    std::vector<int> free_nodes;          // ascending
    std::vector<int> free_index_of_node;  // -1 when not free
    const std::vector<double>* diag_shift = nullptr;  // per free node, optional
};

void pcg_solve(const ReducedSystem& sys, const std::vector<double>& rhs, std::vector<double>& x,
               const SolverOptions& opts, SolveStats* stats);

}  // namespace debond
