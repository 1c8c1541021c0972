#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "debond/brittle.hpp"
#include "debond/cohesive.hpp"
#include "debond/limit.hpp"
#include "debond/mesh.hpp"

namespace debond {

/// Full round-trip precision decimal rendering (17 significant digits).
std::string g17(double x);

// ---- CSV ------------------------------------------------------------------

std::string cohesive_trace_csv(const Mesh& mesh, const CohesiveTrace& trace, double threshold);
std::string brittle_trace_csv(const Mesh& mesh, const BrittleTrace& trace);
std::string cohesive_snapshot_csv(const Mesh& mesh, const CohesiveState& state);
std::string brittle_snapshot_csv(const Mesh& mesh, const BrittleState& state);
std::string rate_table_csv(const std::vector<RateRow>& rows);

// ---- JSON -----------------------------------------------------------------

std::string convergence_report_json(const ConvergenceReport& report);

// ---- SVG ------------------------------------------------------------------

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

std::string svg_plot(const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, const std::vector<PlotSeries>& series, bool logx,
                     bool logy);

// ---- output directory writer ----------------------------------------------

struct RunManifest {
    std::string verb;
    std::uint64_t seed = 0;
    std::string config_text;
    std::vector<std::pair<std::string, std::size_t>> files;  // name, bytes
    std::vector<std::pair<std::string, bool>> audits;        // name, pass
    bool ok = true;
};

/// Funnels all file writes of a run through one object; the manifest is
/// written last and atomically, so a failed run never leaves a partial one.
class OutputWriter {
public:
    /// Creates the directory (throws IoError when that is impossible).
    explicit OutputWriter(std::string dir);
    /// Writes one file and records it in the manifest index.
    void write(const std::string& name, const std::string& content);
    /// Writes manifest.json (deterministic) and runinfo.txt (wall clock).
    void finalize(RunManifest& manifest, double wall_seconds);
    const std::string& dir() const { return dir_; }
    const std::vector<std::pair<std::string, std::size_t>>& files() const { return files_; }

private:
    std::string dir_;
    std::vector<std::pair<std::string, std::size_t>> files_;
};

}  // namespace debond
