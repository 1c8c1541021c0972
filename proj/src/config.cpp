#include "debond/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace debond {

namespace {

struct Value {
    enum class Kind { Number, Boolean, String, NumberList } kind = Kind::Number;
    double num = 0.0;
    bool boolean = false;
    std::string str;
    std::vector<double> list;
    int line = 0;
};

struct RawConfig {
    std::map<std::string, Value> entries;  // "section.key"
    std::vector<std::string> errors;
};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

bool parse_number(const std::string& tok, double& out) {
    try {
        std::size_t used = 0;
        out = std::stod(tok, &used);
        return used == tok.size();
    } catch (...) {
        return false;
    }
}

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                raw.errors.push_back("line " + std::to_string(lineno) +
                                     ": unterminated section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                raw.errors.push_back("line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            raw.errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) {
            raw.errors.push_back("line " + std::to_string(lineno) + ": empty key or value");
            continue;
        }
        Value v;
        v.line = lineno;
        if (val == "true" || val == "false") {
            v.kind = Value::Kind::Boolean;
            v.boolean = val == "true";
        } else if (val.front() == '"') {
            if (val.size() < 2 || val.back() != '"') {
                raw.errors.push_back("line " + std::to_string(lineno) +
                                     ": unterminated string value");
                continue;
            }
            v.kind = Value::Kind::String;
            v.str = val.substr(1, val.size() - 2);
        } else if (val.front() == '[') {
            if (val.back() != ']') {
                raw.errors.push_back("line " + std::to_string(lineno) +
                                     ": unterminated list value");
                continue;
            }
            v.kind = Value::Kind::NumberList;
            std::string body = val.substr(1, val.size() - 2);
            std::istringstream items(body);
            std::string item;
            bool ok = true;
            while (std::getline(items, item, ',')) {
                item = trim(item);
                if (item.empty()) continue;
                double x = 0.0;
                if (!parse_number(item, x)) {
                    raw.errors.push_back("line " + std::to_string(lineno) +
                                         ": list entry is not a number: " + item);
                    ok = false;
                    break;
                }
                v.list.push_back(x);
            }
            if (!ok) continue;
        } else {
            double x = 0.0;
            if (!parse_number(val, x)) {
                raw.errors.push_back("line " + std::to_string(lineno) +
                                     ": value is neither number, bool, string nor list: " + val);
                continue;
            }
            v.kind = Value::Kind::Number;
            v.num = x;
        }
        raw.entries[section + "." + key] = std::move(v);
    }
    return raw;
}

/// Typed readers collecting violations instead of throwing.
struct Reader {
    RawConfig& raw;
    std::vector<std::string>& bad;
    std::vector<std::string> seen;

    const Value* get(const std::string& path) {
        auto it = raw.entries.find(path);
        if (it == raw.entries.end()) return nullptr;
        seen.push_back(path);
        return &it->second;
    }
    void number(const std::string& path, double& out) {
        if (const Value* v = get(path)) {
            if (v->kind == Value::Kind::Number) out = v->num;
            else bad.push_back(path + " must be a number (line " + std::to_string(v->line) + ")");
        }
    }
    void integer(const std::string& path, int& out) {
        if (const Value* v = get(path)) {
            if (v->kind == Value::Kind::Number && v->num == std::floor(v->num))
                out = static_cast<int>(v->num);
            else
                bad.push_back(path + " must be an integer (line " + std::to_string(v->line) + ")");
        }
    }
    void unsigned64(const std::string& path, std::uint64_t& out) {
        if (const Value* v = get(path)) {
            if (v->kind == Value::Kind::Number && v->num >= 0.0 && v->num == std::floor(v->num))
                out = static_cast<std::uint64_t>(v->num);
            else
                bad.push_back(path + " must be a nonnegative integer (line " +
                              std::to_string(v->line) + ")");
        }
    }
    void boolean(const std::string& path, bool& out) {
        if (const Value* v = get(path)) {
            if (v->kind == Value::Kind::Boolean) out = v->boolean;
            else bad.push_back(path + " must be true or false (line " + std::to_string(v->line) + ")");
        }
    }
    void string(const std::string& path, std::string& out) {
        if (const Value* v = get(path)) {
            if (v->kind == Value::Kind::String) out = v->str;
            else bad.push_back(path + " must be a quoted string (line " + std::to_string(v->line) + ")");
        }
    }
    void numbers(const std::string& path, std::vector<double>& out) {
        if (const Value* v = get(path)) {
            if (v->kind == Value::Kind::NumberList) out = v->list;
            else bad.push_back(path + " must be a list of numbers (line " + std::to_string(v->line) + ")");
        }
    }
    void integers(const std::string& path, std::vector<int>& out) {
        if (const Value* v = get(path)) {
            if (v->kind != Value::Kind::NumberList) {
                bad.push_back(path + " must be a list of integers (line " +
                              std::to_string(v->line) + ")");
                return;
            }
            out.clear();
            for (double x : v->list) {
                if (x != std::floor(x)) {
                    bad.push_back(path + " must contain integers (line " +
                                  std::to_string(v->line) + ")");
                    return;
                }
                out.push_back(static_cast<int>(x));
            }
        }
    }
};

}  // namespace

RunConfig parse_config(const std::string& text) {
    RawConfig raw = tokenize(text);
    std::vector<std::string> bad = raw.errors;

    RunConfig cfg;
    cfg.raw_text = text;
    Reader r{raw, bad, {}};

    r.integer("geometry.dimension", cfg.dimension);
    r.numbers("geometry.lengths", cfg.lengths);
    r.integers("geometry.nodes", cfg.nodes);
    r.string("geometry.gamma_side", cfg.gamma_side);
    r.number("geometry.gamma_lo", cfg.gamma_lo);
    r.number("geometry.gamma_hi", cfg.gamma_hi);
    r.number("geometry.a0_depth", cfg.a0_depth);
    r.number("geometry.a0_offset", cfg.a0_offset);

    r.string("density.family", cfg.family);
    r.number("density.kappa_inf", cfg.kappa_inf);
    r.number("density.rate", cfg.rate);

    r.numbers("loading.lambda_times", cfg.lambda_times);
    r.numbers("loading.lambda_values", cfg.lambda_values);
    r.number("loading.g_width", cfg.g_width);

    r.integer("time.steps", cfg.steps);
    r.numbers("time.partition", cfg.partition);

    r.number("solver.pcg_rtol", cfg.pcg_rtol);
    r.number("solver.pcg_atol", cfg.pcg_atol);
    r.number("solver.sweep_tol", cfg.sweep_tol);
    r.integer("solver.sweep_cap", cfg.sweep_cap);
    r.boolean("solver.restarts", cfg.restarts);
    r.boolean("solver.majorization", cfg.majorization);
    r.number("solver.positivity_tol", cfg.positivity_tol);
    r.unsigned64("solver.seed", cfg.seed);

    r.number("cohesive.eps", cfg.eps);

    r.numbers("study.eps_list", cfg.eps_list);
    r.number("study.delta_exponent", cfg.delta_exponent);
    r.boolean("study.delta_sensitivity", cfg.delta_sensitivity);

    r.integer("oracle.instances", cfg.oracle_instances);
    r.integer("oracle.levels", cfg.oracle_levels);
    r.numbers("oracle.eps_list", cfg.oracle_eps);

    r.integer("audit.checkpoints", cfg.checkpoints);

    r.string("output.dir", cfg.out_dir);
    r.numbers("output.snapshot_times", cfg.snapshot_times);
    r.boolean("output.plots", cfg.plots);

    // Unknown keys are diagnosed (they are usually typos).
    for (const auto& [path, value] : raw.entries)
        if (std::find(r.seen.begin(), r.seen.end(), path) == r.seen.end())
            bad.push_back("unknown key " + path + " (line " + std::to_string(value.line) + ")");

    // ---- semantic rules ----------------------------------------------------
    if (cfg.dimension != 1 && cfg.dimension != 2)
        bad.push_back("geometry.dimension must be 1 or 2");
    if (static_cast<int>(cfg.lengths.size()) < cfg.dimension)
        bad.push_back("geometry.lengths needs one entry per axis");
    if (static_cast<int>(cfg.nodes.size()) < cfg.dimension)
        bad.push_back("geometry.nodes needs one entry per axis");
    for (int a = 0; a < cfg.dimension && a < static_cast<int>(cfg.nodes.size()); ++a)
        if (cfg.nodes[a] < 3) bad.push_back("geometry.nodes must be >= 3 per axis");
    for (int a = 0; a < cfg.dimension && a < static_cast<int>(cfg.lengths.size()); ++a)
        if (cfg.lengths[a] <= 0.0) bad.push_back("geometry.lengths must be positive");
    if (cfg.gamma_side != "left" && cfg.gamma_side != "right" && cfg.gamma_side != "bottom" &&
        cfg.gamma_side != "top")
        bad.push_back("geometry.gamma_side must be left/right/bottom/top");
    if (cfg.dimension == 1 && (cfg.gamma_side == "bottom" || cfg.gamma_side == "top"))
        bad.push_back("geometry.gamma_side must be left or right in 1D");
    if (cfg.a0_depth <= 0.0)
        bad.push_back(
            "geometry.a0_depth must be positive: the initially debonded region "
            "has to cover a neighborhood of the loaded boundary");
    if (cfg.a0_offset != 0.0)
        bad.push_back(
            "geometry.a0_offset must be 0: the initially debonded region has to "
            "cover a neighborhood of the loaded boundary");

    if (cfg.family != "exp") bad.push_back("density.family: only \"exp\" is shipped");
    if (cfg.kappa_inf <= 0.0) bad.push_back("density.kappa_inf must be positive");
    if (cfg.rate <= 0.0) bad.push_back("density.rate must be positive");

    if (cfg.lambda_times.size() != cfg.lambda_values.size() || cfg.lambda_times.size() < 2)
        bad.push_back("loading.lambda_times/lambda_values must be matching lists (>= 2 entries)");
    else {
        if (cfg.lambda_times.front() != 0.0)
            bad.push_back("loading.lambda_times must start at 0");
        for (std::size_t k = 1; k < cfg.lambda_times.size(); ++k)
            if (cfg.lambda_times[k] <= cfg.lambda_times[k - 1]) {
                bad.push_back("loading.lambda_times must be strictly increasing");
                break;
            }
        for (double v : cfg.lambda_values)
            if (v < 0.0) {
                bad.push_back("loading.lambda_values must be nonnegative");
                break;
            }
        if (!cfg.lambda_values.empty() && cfg.lambda_values.front() != 0.0)
            bad.push_back(
                "loading.lambda_values must start at 0: runs start from rest, and "
                "a rest state under nonzero load is neither globally stable nor "
                "well-prepared");
    }
    if (cfg.g_width <= 0.0) bad.push_back("loading.g_width must be positive");
    if (cfg.g_width > cfg.a0_depth)
        bad.push_back(
            "loading.g_width must not exceed geometry.a0_depth: the prescribed "
            "displacement must vanish outside the initially debonded region");

    if (cfg.partition.empty()) {
        if (cfg.steps < 1) bad.push_back("time.steps must be >= 1");
    } else {
        if (cfg.partition.front() != 0.0) bad.push_back("time.partition must start at 0");
        for (std::size_t k = 1; k < cfg.partition.size(); ++k)
            if (cfg.partition[k] <= cfg.partition[k - 1]) {
                bad.push_back("time.partition must be strictly increasing");
                break;
            }
        if (!cfg.lambda_times.empty() && !cfg.partition.empty() &&
            std::abs(cfg.partition.back() - cfg.lambda_times.back()) > 1e-12)
            bad.push_back("time.partition must end at the loading horizon");
    }

    if (cfg.pcg_rtol <= 0.0 || cfg.pcg_atol <= 0.0)
        bad.push_back("solver tolerances must be positive");
    if (cfg.sweep_tol <= 0.0) bad.push_back("solver.sweep_tol must be positive");
    if (cfg.sweep_cap < 1) bad.push_back("solver.sweep_cap must be >= 1");
    if (cfg.positivity_tol != -1.0 && cfg.positivity_tol < 0.0)
        bad.push_back("solver.positivity_tol must be >= 0 (or -1 for the default)");

    if (cfg.eps <= 0.0) bad.push_back("cohesive.eps must be positive");

    if (cfg.eps_list.empty())
        bad.push_back("study.eps_list must not be empty");
    for (double e : cfg.eps_list)
        if (e <= 0.0) {
            bad.push_back(
                "study.eps_list entries must be positive (the threshold rule "
                "needs eps > 0 with delta diverging and eps*delta vanishing)");
            break;
        }
    for (std::size_t k = 1; k < cfg.eps_list.size(); ++k)
        if (cfg.eps_list[k] >= cfg.eps_list[k - 1]) {
            bad.push_back("study.eps_list must be strictly decreasing");
            break;
        }
    if (cfg.delta_exponent <= 0.0 || cfg.delta_exponent >= 1.0)
        bad.push_back("study.delta_exponent must lie in (0, 1)");

    if (cfg.oracle_instances < 1) bad.push_back("oracle.instances must be >= 1");
    if (cfg.oracle_levels < 2 || cfg.oracle_levels > 101)
        bad.push_back("oracle.levels must lie in [2, 101]");
    for (double e : cfg.oracle_eps)
        if (e <= 0.0) {
            bad.push_back("oracle.eps_list entries must be positive");
            break;
        }

    if (cfg.checkpoints < 1) bad.push_back("audit.checkpoints must be >= 1");

    const double horizon = cfg.lambda_times.empty() ? 0.0 : cfg.lambda_times.back();
    for (double t : cfg.snapshot_times)
        if (t < 0.0 || t > horizon + 1e-12) {
            bad.push_back("output.snapshot_times must lie within the loading horizon");
            break;
        }

    if (!bad.empty()) throw ConfigError(bad);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace debond
