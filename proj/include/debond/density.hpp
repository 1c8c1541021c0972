#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "debond/mesh.hpp"
#include "debond/types.hpp"

namespace debond {

/// Per-node adhesion toughness: zero on the initially debonded strip,
/// uniformly positive elsewhere, bounded.
struct ToughnessField {
    NodeField kappa;
    double min_off_a0 = 0.0;
    double max_value = 0.0;

    static ToughnessField uniform(const Mesh& mesh, double value);
    void validate(const Mesh& mesh) const;  // throws ConfigError on violation
};

/// Cohesive surface energy density Phi(x, y, z): y is the opening, z the
/// recorded maximal opening. Implementations must be bounded, Lipschitz in y,
/// nondecreasing in both arguments, insensitive to z below y, vanishing on the
/// initially debonded strip, and saturating at a per-node toughness limit.
class CohesiveDensity {
public:
    virtual ~CohesiveDensity() = default;

    /// Phi at node `node`; throws DomainError for negative arguments.
    virtual double eval(int node, double y, double z) const = 0;
    /// Saturation value of Phi at the node (the effective toughness).
    virtual double kappa_phi(int node) const = 0;
    /// Uniform Lipschitz constant of y -> Phi(x, y, z).
    virtual double lipschitz_y() const = 0;
    /// Uniform upper bound of Phi.
    virtual double bound() const = 0;

    /// Phi(x, y/eps, z/eps); throws DomainError when eps <= 0.
    double eval_rescaled(int node, double y, double z, double eps) const;

    /// Toughness limit as a nodal field.
    NodeField kappa_phi_field(int node_count) const;

    /// Convex quadratic majorant c2*s^2 + c1*s (+const) of
    /// s -> Phi(x, s/eps, z_resc) touching it at s = s0, valid for all s >= 0.
    /// Returns false when the family cannot provide one; callers then fall
    /// back to coordinate sweeps alone.
    virtual bool quadratic_majorant(int /*node*/, double /*eps*/, double /*z_resc*/,
                                    double /*s0*/, double& /*c2*/, double& /*c1*/) const {
        return false;
    }

    /// Analytic branch derivatives d Phi/dy and d^2 Phi/dy^2 at (y, z), away
    /// from the branch seam. Optional; enables the Newton tail polish.
    virtual bool opening_derivatives(int /*node*/, double /*y*/, double /*z*/, double& /*d1*/,
                                     double& /*d2*/) const {
        return false;
    }
};

/// Exponential loading family: psi(z) = kappa_inf * (1 - exp(-rate*z)) with
/// the tangent-parabola unloading branch below the recorded opening.
class PsiFamily final : public CohesiveDensity {
public:
    /// Uniform plateau `kappa_inf` off the initially debonded strip.
    PsiFamily(const Mesh& mesh, double kappa_inf, double rate);
    /// Nodewise plateau; `kappa_ref` is the scalar used by `psi`.
    PsiFamily(NodeField kappa_inf, double rate, double kappa_ref);

    /// (psi(z), psi'(z)) at the reference plateau; DomainError for z < 0.
    std::pair<double, double> psi(double z) const;

    double eval(int node, double y, double z) const override;
    double kappa_phi(int node) const override { return kappa_inf_[node]; }
    double lipschitz_y() const override { return lipschitz_; }
    double bound() const override { return bound_; }
    bool quadratic_majorant(int node, double eps, double z_resc, double s0, double& c2,
                            double& c1) const override;
    bool opening_derivatives(int node, double y, double z, double& d1,
                             double& d2) const override;

    double rate() const { return rate_; }
    double kappa_ref() const { return kappa_ref_; }

private:
    NodeField kappa_inf_;
    double rate_;
    double kappa_ref_;
    double lipschitz_;
    double bound_;
};

// ---------------------------------------------------------------------------
// Loading program w(t, x) = lambda(t) * g(x)
// ---------------------------------------------------------------------------

/// Separable prescribed displacement: spatial profile g (1 on the loaded
/// boundary, supported in the initially debonded strip) times a continuous
/// piecewise-linear amplitude lambda(t).
struct Loading {
    NodeField g;
    std::vector<double> times;   // breakpoints, times.front() = 0
    std::vector<double> values;  // lambda at the breakpoints
    double ceiling = 0.0;        // M = max lambda * max g

    double horizon() const { return times.back(); }
    double lambda(double t) const;
    /// Right derivative (left at the final time).
    double lambda_rate(double t) const;
    void validate(const Mesh& mesh) const;
};

/// Profile decaying linearly from 1 on the loaded boundary to 0 at distance
/// `width` (which must not exceed the initially debonded depth).
Loading make_loading(const Mesh& mesh, double g_width, std::vector<double> lambda_times,
                     std::vector<double> lambda_values);

/// (w(t), wdot(t)) as nodal fields; DomainError outside [0, T].
std::pair<NodeField, NodeField> loading_eval(const Loading& loading, double t);

// ---------------------------------------------------------------------------
// Density axioms audit
// ---------------------------------------------------------------------------

struct AxiomSampleSpec {
    int y_samples = 101;
    int z_samples = 101;
    double y_max = 50.0;
    double z_max = 50.0;
    int node_samples = 32;
    double saturation_tol = 1e-6;  // |Phi(y_max, y_max) - kappa_phi| bound
};

struct AxiomFinding {
    std::string axiom;   // "zero-at-origin", "bounded", ...
    bool pass = true;
    double worst = 0.0;  // largest violation observed
    std::string detail;
};

struct AxiomReport {
    std::vector<AxiomFinding> findings;
    bool all_pass() const;
    const AxiomFinding& find(const std::string& axiom) const;
};

/// Samples the seven structural axioms of a cohesive density on a (y, z) grid
/// over a node subsample. Violations are findings, never exceptions.
AxiomReport axiom_audit(const CohesiveDensity& density, const Mesh& mesh,
                        const AxiomSampleSpec& spec = {});

}  // namespace debond
