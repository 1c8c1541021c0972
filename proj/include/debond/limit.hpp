#pragma once

#include <string>
#include <vector>

#include "debond/brittle.hpp"
#include "debond/cohesive.hpp"
#include "debond/density.hpp"
#include "debond/mesh.hpp"

namespace debond {

/// Sharpening schedule: decreasing rescaling parameters with a threshold rule
/// delta(eps) = eps^(-exponent); admissibility (delta increasing, eps*delta
/// decreasing along the list) is verified numerically.
struct EpsSchedule {
    std::vector<double> eps;
    double delta_exponent = 0.5;

    double delta(double e) const;
    double threshold(double e) const { return e * delta(e); }
    void validate() const;  // throws ConfigError
};

/// Debonded-region proxy at one time: the initial strip joined with the
/// super-level set of the history variable at threshold eps*delta.
NodeSet eps_debonded_set(const Mesh& mesh, const NodeField& gamma, double eps, double delta_eps);

/// Lumped rescaled cohesive potential of an initial state; vanishing values
/// mean the data produce no spurious initial debonding.
double well_prepared_value(const Mesh& mesh, const CohesiveDensity& density, double eps,
                           const NodeField& u0, const NodeField& gamma0);

struct EpsEntry {
    double eps = 0.0;
    double delta = 0.0;
    double sup_h1 = 0.0;             // sup_t H1 distance to the sharp displacement
    double sup_symdiff = 0.0;        // sup_t lumped measure of the set mismatch
    double sup_potential_gap = 0.0;  // sup_t |potential - dissipated toughness|
    double well_prepared = 0.0;      // rescaled potential of the initial state
};

/// Set-mismatch column recomputed under an alternative threshold rule.
struct SensitivityEntry {
    double delta_exponent = 0.0;
    std::vector<double> sup_symdiff;  // aligned with the schedule
};

struct ConvergenceReport {
    EpsSchedule schedule;
    std::vector<EpsEntry> entries;
    double brittle_sup_h1_norm = 0.0;
    int set_monotonicity_violations = 0;  // must be zero
    int inclusion_violations = 0;         // displacement super-level vs the set proxy
    double brittle_inclusion_slack = 0.0; // support-vs-set mismatch of the reference
    std::vector<SensitivityEntry> sensitivity;
};

/// Quantifies the sharp-limit convergence of rescaled cohesive runs against a
/// brittle reference on the same mesh and time grid.
ConvergenceReport convergence_study(const Mesh& mesh, const DirichletForm& form,
                                    const CohesiveDensity& density,
                                    const BrittleTrace& brittle_reference,
                                    const std::vector<CohesiveTrace>& cohesive_traces,
                                    const EpsSchedule& schedule,
                                    bool delta_sensitivity = false);

struct RateRow {
    double eps = 0.0;
    double h1 = 0.0;
    double symdiff = 0.0;
    double potential_gap = 0.0;
    // Empirical orders log2(e_i / e_{i+1}); NaN renders as "NA".
    double order_h1 = 0.0;
    double order_symdiff = 0.0;
    double order_potential_gap = 0.0;
};

/// Error table with empirical orders between consecutive schedule entries.
/// Throws RefusalError for reports with fewer than two entries.
std::vector<RateRow> rate_table(const ConvergenceReport& report);

}  // namespace debond
