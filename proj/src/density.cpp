#include "debond/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace debond {

// ---------------------------------------------------------------------------
// ToughnessField
// ---------------------------------------------------------------------------

ToughnessField ToughnessField::uniform(const Mesh& mesh, double value) {
    ToughnessField t;
    t.kappa.assign(mesh.node_count(), 0.0);
    for (int i = 0; i < mesh.node_count(); ++i)
        if (!mesh.in_a0(i)) t.kappa[i] = value;
    t.min_off_a0 = value;
    t.max_value = value;
    return t;
}

void ToughnessField::validate(const Mesh& mesh) const {
    std::vector<std::string> bad;
    if (static_cast<int>(kappa.size()) != mesh.node_count())
        bad.push_back("toughness field length must equal the node count");
    else
        for (int i = 0; i < mesh.node_count(); ++i) {
            if (mesh.in_a0(i) && kappa[i] != 0.0) {
                bad.push_back("toughness must vanish on the initially debonded strip");
                break;
            }
            if (!mesh.in_a0(i) && kappa[i] <= 0.0) {
                bad.push_back("toughness must be positive off the initially debonded strip");
                break;
            }
            if (!std::isfinite(kappa[i])) {
                bad.push_back("toughness must be finite");
                break;
            }
        }
    if (!bad.empty()) throw ConfigError(bad);
}

// ---------------------------------------------------------------------------
// CohesiveDensity
// ---------------------------------------------------------------------------

double CohesiveDensity::eval_rescaled(int node, double y, double z, double eps) const {
    if (eps <= 0.0) throw DomainError("rescaling parameter must be positive");
    return eval(node, y / eps, z / eps);
}

NodeField CohesiveDensity::kappa_phi_field(int node_count) const {
    NodeField f(node_count);
    for (int i = 0; i < node_count; ++i) f[i] = kappa_phi(i);
    return f;
}

// ---------------------------------------------------------------------------
// PsiFamily
// ---------------------------------------------------------------------------

PsiFamily::PsiFamily(const Mesh& mesh, double kappa_inf, double rate)
    : rate_(rate), kappa_ref_(kappa_inf) {
    if (kappa_inf <= 0.0) throw ConfigError("toughness plateau must be positive");
    if (rate <= 0.0) throw ConfigError("loading rate parameter must be positive");
    kappa_inf_.assign(mesh.node_count(), 0.0);
    for (int i = 0; i < mesh.node_count(); ++i)
        if (!mesh.in_a0(i)) kappa_inf_[i] = kappa_inf;
    lipschitz_ = kappa_inf * rate;
    bound_ = kappa_inf;
}

PsiFamily::PsiFamily(NodeField kappa_inf, double rate, double kappa_ref)
    : kappa_inf_(std::move(kappa_inf)), rate_(rate), kappa_ref_(kappa_ref) {
    if (rate <= 0.0) throw ConfigError("loading rate parameter must be positive");
    double kmax = 0.0;
    for (double k : kappa_inf_) kmax = std::max(kmax, k);
    lipschitz_ = kmax * rate;
    bound_ = kmax;
}

std::pair<double, double> PsiFamily::psi(double z) const {
    if (z < 0.0) throw DomainError("psi argument must be nonnegative");
    const double e = std::exp(-rate_ * z);
    return {kappa_ref_ * (1.0 - e), kappa_ref_ * rate_ * e};
}

double PsiFamily::eval(int node, double y, double z) const {
    if (y < 0.0 || z < 0.0) throw DomainError("cohesive density arguments must be nonnegative");
    const double k = kappa_inf_[node];
    if (k == 0.0) return 0.0;
    if (y < z) {
        // Unloading parabola tangent to the loading curve at the recorded tip.
        const double e = std::exp(-rate_ * z);
        const double psi_z = k * (1.0 - e);
        const double dpsi_z = k * rate_ * e;
        return dpsi_z / (2.0 * z) * y * y + psi_z - z * dpsi_z / 2.0;
    }
    return k * (1.0 - std::exp(-rate_ * y));
}

bool PsiFamily::opening_derivatives(int node, double y, double z, double& d1, double& d2) const {
    const double k = kappa_inf_[node];
    if (k == 0.0) {
        d1 = d2 = 0.0;
        return true;
    }
    if (y < z) {
        const double coeff = k * rate_ * std::exp(-rate_ * z) / z;
        d1 = coeff * y;
        d2 = coeff;
        return true;
    }
    const double e = std::exp(-rate_ * y);
    d1 = k * rate_ * e;
    d2 = -k * rate_ * rate_ * e;
    return true;
}

bool PsiFamily::quadratic_majorant(int node, double eps, double z_resc, double s0, double& c2,
                                   double& c1) const {
    const double k = kappa_inf_[node];
    if (k == 0.0) {
        c2 = c1 = 0.0;
        return true;
    }
    // Touch point in rescaled units; the parabola at level max(z, s0/eps)
    // dominates both branches for any larger level (see the tests).
    const double z = std::max(z_resc, s0 / eps);
    if (z < 1e-9) {
        // Degenerate tip: tangent line of the loading curve at the origin.
        c2 = 0.0;
        c1 = k * rate_ / eps;
        return true;
    }
    const double e = std::exp(-rate_ * z);
    c2 = k * rate_ * e / (2.0 * z * eps * eps);
    c1 = 0.0;
    return true;
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

double Loading::lambda(double t) const {
    if (t < times.front() - 1e-12 || t > times.back() + 1e-12)
        throw DomainError("loading amplitude queried outside the time horizon");
    t = std::clamp(t, times.front(), times.back());
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (t <= times[k] || k + 1 == times.size()) {
            const double span = times[k] - times[k - 1];
            const double s = span > 0.0 ? (t - times[k - 1]) / span : 0.0;
            return values[k - 1] + s * (values[k] - values[k - 1]);
        }
    }
    return values.back();
}

double Loading::lambda_rate(double t) const {
    if (t < times.front() - 1e-12 || t > times.back() + 1e-12)
        throw DomainError("loading rate queried outside the time horizon");
    t = std::clamp(t, times.front(), times.back());
    // Right derivative; at the final time, the slope of the last piece.
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (t < times[k] || k + 1 == times.size())
            return (values[k] - values[k - 1]) / (times[k] - times[k - 1]);
    }
    return 0.0;
}

void Loading::validate(const Mesh& mesh) const {
    std::vector<std::string> bad;
    if (times.size() < 2 || times.size() != values.size())
        bad.push_back("loading amplitude needs matching breakpoint/value lists (>= 2)");
    else {
        if (times.front() != 0.0) bad.push_back("loading breakpoints must start at 0");
        for (std::size_t k = 1; k < times.size(); ++k)
            if (times[k] <= times[k - 1]) {
                bad.push_back("loading breakpoints must be strictly increasing");
                break;
            }
        for (double v : values)
            if (v < 0.0) {
                bad.push_back("loading amplitude must be nonnegative");
                break;
            }
    }
    if (static_cast<int>(g.size()) != mesh.node_count())
        bad.push_back("loading profile length must equal the node count");
    else
        for (int i = 0; i < mesh.node_count(); ++i) {
            if (g[i] < 0.0 || g[i] > 1.0) {
                bad.push_back("loading profile must take values in [0, 1]");
                break;
            }
            if (mesh.in_gamma(i) && g[i] != 1.0) {
                bad.push_back("loading profile must equal 1 on the loaded boundary");
                break;
            }
            if (!mesh.in_a0(i) && !mesh.in_gamma(i) && g[i] != 0.0) {
                bad.push_back(
                    "loading profile must vanish outside the initially debonded strip");
                break;
            }
        }
    if (!bad.empty()) throw ConfigError(bad);
}

Loading make_loading(const Mesh& mesh, double g_width, std::vector<double> lambda_times,
                     std::vector<double> lambda_values) {
    Loading l;
    l.times = std::move(lambda_times);
    l.values = std::move(lambda_values);
    if (g_width <= 0.0) throw ConfigError("loading profile width must be positive");
    l.g.assign(mesh.node_count(), 0.0);
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (mesh.in_gamma(i)) {
            l.g[i] = 1.0;
            continue;
        }
        const double raw = std::max(0.0, 1.0 - mesh.distance_to_gamma(i) / g_width);
        if (raw > 1e-14 && !mesh.in_a0(i))
            throw ConfigError(
                "loading profile support must lie inside the initially debonded "
                "strip; reduce the profile width or deepen the strip");
        l.g[i] = raw;
    }
    double lam_max = 0.0;
    for (double v : l.values) lam_max = std::max(lam_max, v);
    l.ceiling = lam_max;  // max g = 1 on the loaded boundary
    l.validate(mesh);
    return l;
}

std::pair<NodeField, NodeField> loading_eval(const Loading& loading, double t) {
    const double lam = loading.lambda(t);
    const double rate = loading.lambda_rate(t);
    NodeField w(loading.g.size()), wdot(loading.g.size());
    for (std::size_t i = 0; i < loading.g.size(); ++i) {
        w[i] = lam * loading.g[i];
        wdot[i] = rate * loading.g[i];
    }
    return {std::move(w), std::move(wdot)};
}

// ---------------------------------------------------------------------------
// Axiom audit
// ---------------------------------------------------------------------------

bool AxiomReport::all_pass() const {
    return std::all_of(findings.begin(), findings.end(),
                       [](const AxiomFinding& f) { return f.pass; });
}

const AxiomFinding& AxiomReport::find(const std::string& axiom) const {
    for (const auto& f : findings)
        if (f.axiom == axiom) return f;
    throw DomainError("unknown axiom name: " + axiom);
}

namespace {

std::vector<int> sample_nodes(const Mesh& mesh, int wanted) {
    const int n = mesh.node_count();
    std::vector<int> nodes;
    const int m = std::min(wanted, n);
    for (int k = 0; k < m; ++k) nodes.push_back(static_cast<int>((static_cast<long long>(k) * (n - 1)) / std::max(1, m - 1)));
    // Guarantee at least one node on and one off the debonded strip.
    int on = -1, off = -1;
    for (int i = 0; i < n; ++i) {
        if (on < 0 && mesh.in_a0(i)) on = i;
        if (off < 0 && !mesh.in_a0(i)) off = i;
    }
    if (on >= 0) nodes.push_back(on);
    if (off >= 0) nodes.push_back(off);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

}  // namespace

AxiomReport axiom_audit(const CohesiveDensity& density, const Mesh& mesh,
                        const AxiomSampleSpec& spec) {
    const auto nodes = sample_nodes(mesh, spec.node_samples);
    std::vector<double> ys(spec.y_samples), zs(spec.z_samples);
    for (int i = 0; i < spec.y_samples; ++i) ys[i] = spec.y_max * i / (spec.y_samples - 1);
    for (int i = 0; i < spec.z_samples; ++i) zs[i] = spec.z_max * i / (spec.z_samples - 1);

    AxiomFinding zero_at_origin{"zero-at-origin", true, 0.0, ""};
    AxiomFinding bounded{"bounded", true, 0.0, ""};
    AxiomFinding lipschitz{"lipschitz-in-opening", true, 0.0, ""};
    AxiomFinding history_consistent{"history-consistency", true, 0.0, ""};
    AxiomFinding monotone{"monotone", true, 0.0, ""};
    AxiomFinding strip_compatible{"strip-compatibility", true, 0.0, ""};
    AxiomFinding saturates{"saturation", true, 0.0, ""};

    auto flag = [](AxiomFinding& f, double violation, const std::string& where) {
        if (violation > f.worst) {
            f.worst = violation;
            f.detail = where;
        }
        if (violation > 0.0) f.pass = false;
    };

    const double lip = density.lipschitz_y();
    const double cap = density.bound();

    for (int node : nodes) {
        const bool on_strip = mesh.in_a0(node);
        const std::string at = "node " + std::to_string(node);

        flag(zero_at_origin, std::abs(density.eval(node, 0.0, 0.0)) - 1e-12, at);

        double min_positive = std::numeric_limits<double>::infinity();
        for (int zi = 0; zi < spec.z_samples; ++zi) {
            double prev_in_y = 0.0;
            for (int yi = 0; yi < spec.y_samples; ++yi) {
                const double y = ys[yi];
                const double z = zs[zi];
                const double v = density.eval(node, y, z);

                flag(bounded, v - cap - 1e-12, at);
                flag(history_consistent, std::abs(v - density.eval(node, y, std::max(y, z))) - 1e-12,
                     at);
                if (on_strip) flag(strip_compatible, std::abs(v) - 1e-15, at);
                if (!on_strip && y > 0.0 && z >= 0.0) min_positive = std::min(min_positive, v);

                if (yi > 0) {
                    const double dy = ys[yi] - ys[yi - 1];
                    flag(lipschitz, std::abs(v - prev_in_y) / dy - lip - 1e-9, at);
                    flag(monotone, prev_in_y - v - 1e-12, at + " (opening)");
                }
                prev_in_y = v;
            }
        }
        for (int yi = 0; yi < spec.y_samples; ++yi) {
            double prev_in_z = 0.0;
            for (int zi = 0; zi < spec.z_samples; ++zi) {
                const double v = density.eval(node, ys[yi], zs[zi]);
                if (zi > 0) flag(monotone, prev_in_z - v - 1e-12, at + " (history)");
                prev_in_z = v;
            }
        }
        if (!on_strip) {
            // Positivity off the strip for positive arguments.
            const double probe = density.eval(node, ys[1], 0.0);
            min_positive = std::min(min_positive, probe);
            flag(strip_compatible, min_positive <= 0.0 ? 1.0 : 0.0,
                 at + " (positivity off the strip)");
        }
        flag(saturates,
             std::abs(density.eval(node, spec.y_max, spec.y_max) - density.kappa_phi(node)) -
                 spec.saturation_tol,
             at);
    }

    AxiomReport report;
    report.findings = {zero_at_origin, bounded,          lipschitz, history_consistent,
                       monotone,       strip_compatible, saturates};
    return report;
}

}  // namespace debond
