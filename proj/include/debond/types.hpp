#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace debond {

/// One real value per node (displacement, history, toughness, ...).
using NodeField = std::vector<double>;

/// One flag per node; 1 = node belongs to the set.
using NodeSet = std::vector<std::uint8_t>;

// ---------------------------------------------------------------------------
// Error taxonomy
// ---------------------------------------------------------------------------

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration; carries every violated constraint, not just the first.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations)
        : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
    explicit ConfigError(const std::string& msg)
        : ConfigError(std::vector<std::string>{msg}) {}
    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "configuration error";
        for (const auto& m : v) s += "\n  - " + m;
        return s;
    }
    std::vector<std::string> violations_;
};

/// Linear solver exceeded its iteration cap; carries the last residual.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& msg, double last_residual, int iterations)
        : std::runtime_error(msg + " (relative residual " + std::to_string(last_residual) +
                             " after " + std::to_string(iterations) + " iterations)"),
          last_residual_(last_residual), iterations_(iterations) {}
    double last_residual() const { return last_residual_; }
    int iterations() const { return iterations_; }

private:
    double last_residual_;
    int iterations_;
};

/// Step minimizer failed to converge for every candidate; best iterate attached.
class NonconvergenceError : public std::runtime_error {
public:
    NonconvergenceError(const std::string& msg, NodeField best, double best_objective)
        : std::runtime_error(msg), best_(std::move(best)), best_objective_(best_objective) {}
    const NodeField& best() const { return best_; }
    double best_objective() const { return best_objective_; }

private:
    NodeField best_;
    double best_objective_;
};

/// A run violated one of its own hard invariants; the run is aborted.
class ConsistencyError : public std::runtime_error {
public:
    ConsistencyError(const std::string& msg, int step_index)
        : std::runtime_error(msg + " (step " + std::to_string(step_index) + ")"),
          step_index_(step_index) {}
    int step_index() const { return step_index_; }

private:
    int step_index_;
};

/// Request outside the supported envelope (e.g. oracle instance too large).
class RefusalError : public std::runtime_error {
public:
    explicit RefusalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem failure during output emission.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// Small deterministic RNG helpers (seeded per run; layout-stable output)
// ---------------------------------------------------------------------------

/// splitmix64: tiny, fast, reproducible across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    /// Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return n ? next_u64() % n : 0; }

private:
    std::uint64_t state_;
};

}  // namespace debond
