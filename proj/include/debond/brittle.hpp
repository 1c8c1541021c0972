#pragma once

#include <string>
#include <vector>

#include "debond/cohesive.hpp"
#include "debond/density.hpp"
#include "debond/dirichlet.hpp"
#include "debond/mesh.hpp"
#include "debond/types.hpp"

namespace debond {

/// Sharp (brittle) solution variables at one time: the debonded node set and
/// the minimal-energy displacement supported on it.
struct BrittleState {
    double t = 0.0;
    NodeSet debonded;
    NodeField u;
};

struct BrittleTrace {
    std::vector<BrittleState> states;
    std::vector<LedgerEntry> ledger;  // potential column = dissipated toughness
    double max_abs_residual() const;
};

enum class BrittleStrategy { Exact1D, Greedy2D };

struct BrittleParams {
    BrittleStrategy strategy = BrittleStrategy::Exact1D;
    double positivity_tol = -1.0;  // < 0: defaults to 1e-12 * loading ceiling
    SolverOptions solver;
};

/// Minimal Dirichlet energy over displacements vanishing outside `set_a` with
/// the given boundary values, together with its minimizer.
std::pair<double, NodeField> shape_energy(const Mesh& mesh, const DirichletForm& form,
                                          const NodeSet& set_a, const NodeField& gamma_values);

/// Closed-form interval front update: the unique minimizer over l >= l_prev of
/// w^2/(2 l) + kappa * (l - l_prev), clamped to the domain length.
double brittle_step_1d(double l_prev, double w_value, double kappa_const, double domain_length);

/// One incremental set update under the irreversibility constraint
/// (result always contains `a_prev`). Exact front scan in 1D; greedy frontier
/// batches in 2D. Throws ConfigError on strategy/dimension mismatch.
NodeSet brittle_step_discrete(const Mesh& mesh, const DirichletForm& form, const NodeField& kappa,
                              const NodeSet& a_prev, const NodeField& gamma_values,
                              BrittleStrategy strategy, const SolverOptions& solver = {});

/// Incremental evolution of the debonded set from the initial strip.
BrittleTrace evolve_brittle(const Mesh& mesh, const DirichletForm& form, const NodeField& kappa,
                            const Loading& loading, const TimeGrid& grid, const NodeSet& a_init,
                            const BrittleParams& params = {});

/// Displacement-reformulation audit of one state: the one-sided minimality
/// gap against competitors charged for their newly opened support, the
/// distance to the recomputed harmonic extension, and the interior stiffness
/// residual on the positivity set.
struct ReformulationFinding {
    std::string competitor;
    double gap = 0.0;
    bool pass = true;
};

struct ReformulationReport {
    std::vector<ReformulationFinding> findings;
    double extension_distance = 0.0;      // threshold 1e-9
    double harmonic_residual = 0.0;       // threshold 1e-8
    bool pass = true;
};

ReformulationReport reformulation_check(const Mesh& mesh, const DirichletForm& form,
                                        const NodeField& kappa, const BrittleState& state,
                                        const NodeField& gamma_values,
                                        const SolverOptions& solver = {});

/// Running union of positivity sets joined with the initial strip, per step.
std::vector<NodeSet> irreversible_support(const Mesh& mesh, const BrittleTrace& trace,
                                          double positivity_tol);

/// Sampled global-stability audit of a brittle state: competitors are the set
/// itself plus frontier batches and dilations, charged with their toughness.
StabilityReport brittle_stability_audit(const Mesh& mesh, const DirichletForm& form,
                                        const NodeField& kappa, const BrittleState& state,
                                        const NodeField& gamma_values,
                                        const SolverOptions& solver = {});

}  // namespace debond
