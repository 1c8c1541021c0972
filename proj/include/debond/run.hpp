#pragma once

#include <optional>
#include <string>
#include <vector>

#include "debond/brittle.hpp"
#include "debond/cohesive.hpp"
#include "debond/config.hpp"
#include "debond/density.hpp"
#include "debond/dirichlet.hpp"
#include "debond/emit.hpp"
#include "debond/limit.hpp"
#include "debond/mesh.hpp"

namespace debond {

/// Everything a run needs, assembled once from a validated configuration.
struct Problem {
    Mesh mesh;
    DirichletForm form;
    Loading loading;
    PsiFamily density;
    NodeField kappa;  // brittle toughness = saturation limit of the density
    TimeGrid grid;
    CohesiveParams cohesive_params;
    BrittleParams brittle_params;

    explicit Problem(const RunConfig& cfg);
};

struct RunOptions {
    std::string out_dir;  // empty: use the config's output.dir
    std::uint64_t seed = 0;
    bool seed_overridden = false;
    int threads = 1;
    std::optional<bool> plots;
};

struct RunOutcome {
    int exit_code = 0;
    std::vector<std::string> failures;
    std::string out_dir;
};

/// Executes one CLI verb (run-cohesive, run-brittle, limit-study, audit,
/// oracle), writing traces, reports, plots and the manifest into the output
/// directory. Returns a nonzero exit code (and a machine-readable failure
/// record on disk) when a hard invariant or an audited check fails.
RunOutcome run_command(const std::string& verb, const RunConfig& cfg, const RunOptions& opts);

}  // namespace debond
