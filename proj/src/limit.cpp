#include "debond/limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace debond {

double EpsSchedule::delta(double e) const { return std::pow(e, -delta_exponent); }

void EpsSchedule::validate() const {
    std::vector<std::string> bad;
    if (eps.empty()) bad.push_back("sharpening schedule must not be empty");
    for (double e : eps)
        if (!(e > 0.0)) {
            bad.push_back("every rescaling parameter must be positive");
            break;
        }
    for (std::size_t i = 1; i < eps.size(); ++i)
        if (eps[i] >= eps[i - 1]) {
            bad.push_back("rescaling parameters must be strictly decreasing");
            break;
        }
    if (bad.empty()) {
        for (std::size_t i = 1; i < eps.size(); ++i) {
            if (delta(eps[i]) <= delta(eps[i - 1]))
                bad.push_back("threshold rule must diverge along the schedule");
            if (threshold(eps[i]) >= threshold(eps[i - 1]))
                bad.push_back("threshold eps*delta must vanish along the schedule");
            if (!bad.empty()) break;
        }
    }
    if (!bad.empty()) throw ConfigError(bad);
}

NodeSet eps_debonded_set(const Mesh& mesh, const NodeField& gamma, double eps, double delta_eps) {
    if (eps <= 0.0 || delta_eps <= 0.0)
        throw DomainError("threshold parameters must be positive");
    NodeSet s = mesh.a0_nodes;
    const double threshold = eps * delta_eps;
    for (int i = 0; i < mesh.node_count(); ++i)
        if (gamma[i] >= threshold) s[i] = 1;
    return s;
}

double well_prepared_value(const Mesh& mesh, const CohesiveDensity& density, double eps,
                           const NodeField& u0, const NodeField& gamma0) {
    double acc = 0.0;
    for (int i = 0; i < mesh.node_count(); ++i)
        acc += mesh.weight[i] * density.eval(i, u0[i] / eps, gamma0[i] / eps);
    return acc;
}

ConvergenceReport convergence_study(const Mesh& mesh, const DirichletForm& form,
                                    const CohesiveDensity& density,
                                    const BrittleTrace& brittle_reference,
                                    const std::vector<CohesiveTrace>& cohesive_traces,
                                    const EpsSchedule& schedule, bool delta_sensitivity) {
    schedule.validate();
    if (cohesive_traces.size() != schedule.eps.size())
        throw ConfigError("one cohesive trace per schedule entry is required");
    const std::size_t steps = brittle_reference.states.size();
    for (const auto& tr : cohesive_traces) {
        if (tr.states.size() != steps)
            throw ConfigError("cohesive and brittle traces must share the time grid");
        for (const auto& st : tr.states)
            if (static_cast<int>(st.u.size()) != mesh.node_count())
                throw ConfigError("trace mesh does not match the study mesh");
    }

    ConvergenceReport report;
    report.schedule = schedule;

    const NodeField kappa = density.kappa_phi_field(mesh.node_count());

    for (std::size_t s = 0; s < steps; ++s)
        report.brittle_sup_h1_norm = std::max(
            report.brittle_sup_h1_norm, h1_norm(mesh, form, brittle_reference.states[s].u));

    // Reference-side inclusion: the running positivity support must match the
    // debonded set up to front resolution.
    {
        const double tol = 1e-12;
        const auto supports = irreversible_support(mesh, brittle_reference, tol);
        for (std::size_t s = 0; s < steps; ++s)
            report.brittle_inclusion_slack =
                std::max(report.brittle_inclusion_slack,
                         symmetric_difference_measure(mesh, supports[s],
                                                      brittle_reference.states[s].debonded));
    }

    for (std::size_t e = 0; e < schedule.eps.size(); ++e) {
        const double eps = schedule.eps[e];
        const double delta = schedule.delta(eps);
        const auto& trace = cohesive_traces[e];

        EpsEntry entry;
        entry.eps = eps;
        entry.delta = delta;
        entry.well_prepared =
            well_prepared_value(mesh, density, eps, trace.states.front().u,
                                trace.states.front().gamma);

        NodeSet prev_set;
        for (std::size_t s = 0; s < steps; ++s) {
            const auto& coh = trace.states[s];
            const auto& bri = brittle_reference.states[s];

            entry.sup_h1 =
                std::max(entry.sup_h1, field_distances(mesh, form, coh.u, bri.u).h1);

            const NodeSet es = eps_debonded_set(mesh, coh.gamma, eps, delta);
            entry.sup_symdiff = std::max(
                entry.sup_symdiff, symmetric_difference_measure(mesh, es, bri.debonded));
            if (s > 0 && !set_subset(prev_set, es)) ++report.set_monotonicity_violations;

            // Discrete inclusion: the displacement super-level set at the same
            // threshold must sit inside the set proxy (gamma >= u).
            for (int i = 0; i < mesh.node_count(); ++i)
                if (coh.u[i] >= eps * delta && !es[i]) ++report.inclusion_violations;

            double dissipated = 0.0;
            for (int i = 0; i < mesh.node_count(); ++i)
                if (bri.debonded[i] && !mesh.a0_nodes[i])
                    dissipated += mesh.weight[i] * kappa[i];
            entry.sup_potential_gap = std::max(
                entry.sup_potential_gap, std::abs(trace.ledger[s].potential - dissipated));

            prev_set = es;
        }
        report.entries.push_back(entry);
    }

    if (delta_sensitivity) {
        for (double expo : {0.25, 0.75}) {
            SensitivityEntry se;
            se.delta_exponent = expo;
            for (std::size_t e = 0; e < schedule.eps.size(); ++e) {
                const double eps = schedule.eps[e];
                const double delta = std::pow(eps, -expo);
                double sup = 0.0;
                for (std::size_t s = 0; s < steps; ++s) {
                    const NodeSet es =
                        eps_debonded_set(mesh, cohesive_traces[e].states[s].gamma, eps, delta);
                    sup = std::max(sup, symmetric_difference_measure(
                                            mesh, es, brittle_reference.states[s].debonded));
                }
                se.sup_symdiff.push_back(sup);
            }
            report.sensitivity.push_back(std::move(se));
        }
    }
    return report;
}

std::vector<RateRow> rate_table(const ConvergenceReport& report) {
    if (report.entries.size() < 2)
        throw RefusalError("rate estimation needs at least two schedule entries");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto order = [&](double a, double b) {
        if (a <= 0.0 || b <= 0.0) return nan;
        return std::log2(a / b);
    };
    std::vector<RateRow> rows;
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const auto& e = report.entries[i];
        RateRow r;
        r.eps = e.eps;
        r.h1 = e.sup_h1;
        r.symdiff = e.sup_symdiff;
        r.potential_gap = e.sup_potential_gap;
        if (i + 1 < report.entries.size()) {
            const auto& n = report.entries[i + 1];
            r.order_h1 = order(e.sup_h1, n.sup_h1);
            r.order_symdiff = order(e.sup_symdiff, n.sup_symdiff);
            r.order_potential_gap = order(e.sup_potential_gap, n.sup_potential_gap);
        } else {
            r.order_h1 = r.order_symdiff = r.order_potential_gap = nan;
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace debond
