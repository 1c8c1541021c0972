#pragma once

#include <optional>
#include <string>
#include <vector>

#include "debond/density.hpp"
#include "debond/dirichlet.hpp"
#include "debond/mesh.hpp"
#include "debond/types.hpp"

namespace debond {

/// Strictly increasing partition of [0, T] with exact endpoints.
struct TimeGrid {
    std::vector<double> t;
    static TimeGrid uniform(double horizon, int steps);
    double fineness() const;
    void validate() const;
};

/// Cohesive solution variables at one time.
struct CohesiveState {
    double t = 0.0;
    NodeField u;
    NodeField gamma;
    double eps = 0.0;
};

/// Per-step energy accounting shared by both evolutions: `potential` holds the
/// cohesive surface term (cohesive runs) or the dissipated toughness (brittle
/// runs). Work uses the left-endpoint rule; the trapezoidal variant is logged
/// alongside for diagnostics.
struct LedgerEntry {
    double t = 0.0;
    double elastic = 0.0;
    double potential = 0.0;
    double work_increment = 0.0;
    double work_cum = 0.0;
    double work_cum_trapezoid = 0.0;
    double residual = 0.0;
    double gamma_max = 0.0;  // max history (cohesive) / front or area (brittle)
};

struct CohesiveTrace {
    std::vector<CohesiveState> states;
    std::vector<LedgerEntry> ledger;
    double max_abs_residual() const;
};

struct CohesiveParams {
    double sweep_tol = 1e-12;  // relative objective decrease per sweep
    int sweep_cap = 500;
    bool restarts = true;
    bool majorization = true;
    double delta_exponent = 0.5;  // threshold rule used for restart sets
    SolverOptions solver;
};

/// Diagnostics of one step minimization.
struct MinimizeDiag {
    double objective = 0.0;
    int sweeps = 0;
    int candidates = 0;
    std::string winner;
};

/// Context the restart candidates are built from.
struct StepContext {
    const NodeField* previous_u = nullptr;
    const NodeField* previous_gamma = nullptr;
    double previous_boundary_value = 0.0;
};

/// Discrete step objective: Dirichlet energy plus the lumped rescaled
/// cohesive potential frozen at `gamma_prev`.
double step_objective(const Mesh& mesh, const DirichletForm& form, const CohesiveDensity& density,
                      double eps, const NodeField& gamma_prev, const NodeField& v);

/// One incremental minimization: descends from every restart candidate and
/// returns the best local minimum (ties by distance to the previous
/// displacement). The trace on the loaded boundary is boundary_value * g.
/// Throws NonconvergenceError when no candidate meets the sweep criterion.
NodeField incremental_minimize(const Mesh& mesh, const DirichletForm& form,
                               const CohesiveDensity& density, double eps,
                               const NodeField& gamma_prev, double boundary_value,
                               const NodeField& g_profile, const CohesiveParams& params = {},
                               const StepContext& context = {}, MinimizeDiag* diag = nullptr);

/// Nodewise history update: max(gamma_prev, |u|).
NodeField gamma_update(const NodeField& gamma_prev, const NodeField& u);

/// Runs the incremental scheme over the whole time grid, checking the state
/// invariants at every step and filling the energy ledger.
CohesiveTrace evolve_cohesive(const Mesh& mesh, const DirichletForm& form,
                              const CohesiveDensity& density, double eps, const Loading& loading,
                              const TimeGrid& grid, const CohesiveState& initial,
                              const CohesiveParams& params = {});

/// Default initial state (u, gamma) = (0, 0); requires lambda(0) = 0.
CohesiveState rest_state(const Mesh& mesh, double eps);

// ---------------------------------------------------------------------------
// Audits and oracles
// ---------------------------------------------------------------------------

struct StabilityFinding {
    std::string competitor;
    double objective_gap = 0.0;  // J(u) - J(v); stability needs <= tolerance
    bool pass = true;
};

struct StabilityReport {
    double objective = 0.0;
    double tolerance = 0.0;
    std::vector<StabilityFinding> findings;
    bool all_pass() const;
};

/// Samples the global-stability inequality of a state against a library of
/// admissible competitors (boundary lifts, harmonic extensions on candidate
/// debonded sets, the sharp-limit displacement, truncations, bump
/// perturbations). Failures are findings, never exceptions.
StabilityReport stability_audit(const Mesh& mesh, const DirichletForm& form,
                                const CohesiveDensity& density, double eps,
                                const CohesiveState& state, const Loading& loading,
                                const CohesiveParams& params = {});

/// Exhaustive minimization of the step objective over a nodal value grid on a
/// tiny mesh (<= 6 free nodes, <= 101 levels). Product enumeration, with an
/// equivalent chain dynamic program on 1D meshes when enumeration would be too
/// large. Ties break to the lexicographically smallest assignment.
std::pair<NodeField, double> brute_force_step_oracle(const Mesh& tiny_mesh,
                                                     const DirichletForm& form,
                                                     const CohesiveDensity& density, double eps,
                                                     const NodeField& gamma_prev,
                                                     double boundary_value,
                                                     const std::vector<double>& value_grid);

}  // namespace debond
