#include "debond/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace debond {

namespace fs = std::filesystem;

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

std::string g4(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", x);
    return buf;
}

std::string g3(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::string cohesive_trace_csv(const Mesh& mesh, const CohesiveTrace& trace, double threshold) {
    std::ostringstream out;
    const char* shape_col = mesh.dimension == 1 ? "front" : "area_fraction";
    out << "t,elastic,potential,work_cum,residual,gamma_max," << shape_col
        << ",work_cum_trapezoid\n";
    for (std::size_t k = 0; k < trace.ledger.size(); ++k) {
        const auto& e = trace.ledger[k];
        const auto& st = trace.states[k];
        NodeSet s = mesh.a0_nodes;
        for (int i = 0; i < mesh.node_count(); ++i)
            if (st.gamma[i] >= threshold) s[i] = 1;
        const double shape =
            mesh.dimension == 1 ? front_position_1d(mesh, s) : area_fraction(mesh, s);
        out << g17(e.t) << ',' << g17(e.elastic) << ',' << g17(e.potential) << ','
            << g17(e.work_cum) << ',' << g17(e.residual) << ',' << g17(e.gamma_max) << ','
            << g17(shape) << ',' << g17(e.work_cum_trapezoid) << '\n';
    }
    return out.str();
}

std::string brittle_trace_csv(const Mesh& mesh, const BrittleTrace& trace) {
    std::ostringstream out;
    const char* shape_col = mesh.dimension == 1 ? "front" : "area_fraction";
    out << "t,elastic,dissipated,work_cum,residual," << shape_col << ",work_cum_trapezoid\n";
    for (std::size_t k = 0; k < trace.ledger.size(); ++k) {
        const auto& e = trace.ledger[k];
        const auto& st = trace.states[k];
        const double shape = mesh.dimension == 1 ? front_position_1d(mesh, st.debonded)
                                                 : area_fraction(mesh, st.debonded);
        out << g17(e.t) << ',' << g17(e.elastic) << ',' << g17(e.potential) << ','
            << g17(e.work_cum) << ',' << g17(e.residual) << ',' << g17(shape) << ','
            << g17(e.work_cum_trapezoid) << '\n';
    }
    return out.str();
}

std::string cohesive_snapshot_csv(const Mesh& mesh, const CohesiveState& state) {
    std::ostringstream out;
    out << (mesh.dimension == 1 ? "x,u,gamma\n" : "x,y,u,gamma\n");
    for (int i = 0; i < mesh.node_count(); ++i) {
        out << g17(mesh.xs[i]) << ',';
        if (mesh.dimension == 2) out << g17(mesh.ys[i]) << ',';
        out << g17(state.u[i]) << ',' << g17(state.gamma[i]) << '\n';
    }
    return out.str();
}

std::string brittle_snapshot_csv(const Mesh& mesh, const BrittleState& state) {
    std::ostringstream out;
    out << (mesh.dimension == 1 ? "x,u,debonded\n" : "x,y,u,debonded\n");
    for (int i = 0; i < mesh.node_count(); ++i) {
        out << g17(mesh.xs[i]) << ',';
        if (mesh.dimension == 2) out << g17(mesh.ys[i]) << ',';
        out << g17(state.u[i]) << ',' << (state.debonded[i] ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string rate_table_csv(const std::vector<RateRow>& rows) {
    std::ostringstream out;
    out << "eps,h1,symdiff,potential_gap,order_h1,order_symdiff,order_potential_gap\n";
    auto cell = [](double v) { return std::isnan(v) ? std::string("NA") : g17(v); };
    for (const auto& r : rows)
        out << g17(r.eps) << ',' << g17(r.h1) << ',' << g17(r.symdiff) << ','
            << g17(r.potential_gap) << ',' << cell(r.order_h1) << ',' << cell(r.order_symdiff)
            << ',' << cell(r.order_potential_gap) << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

std::string convergence_report_json(const ConvergenceReport& report) {
    nlohmann::ordered_json j;
    j["schedule"]["eps"] = report.schedule.eps;
    j["schedule"]["delta_exponent"] = report.schedule.delta_exponent;
    j["brittle_sup_h1_norm"] = report.brittle_sup_h1_norm;
    j["set_monotonicity_violations"] = report.set_monotonicity_violations;
    j["inclusion_violations"] = report.inclusion_violations;
    j["brittle_inclusion_slack"] = report.brittle_inclusion_slack;
    j["entries"] = nlohmann::ordered_json::array();
    for (const auto& e : report.entries) {
        nlohmann::ordered_json je;
        je["eps"] = e.eps;
        je["delta"] = e.delta;
        je["sup_h1"] = e.sup_h1;
        je["sup_symdiff"] = e.sup_symdiff;
        je["sup_potential_gap"] = e.sup_potential_gap;
        je["well_prepared"] = e.well_prepared;
        j["entries"].push_back(je);
    }
    if (!report.sensitivity.empty()) {
        j["delta_sensitivity"] = nlohmann::ordered_json::array();
        for (const auto& s : report.sensitivity) {
            nlohmann::ordered_json js;
            js["delta_exponent"] = s.delta_exponent;
            js["sup_symdiff"] = s.sup_symdiff;
            j["delta_sensitivity"].push_back(js);
        }
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

std::string svg_plot(const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, const std::vector<PlotSeries>& series, bool logx,
                     bool logy) {
    const double width = 720, height = 480;
    const double ml = 78, mr = 24, mt = 36, mb = 56;
    const double pw = width - ml - mr, ph = height - mt - mb;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    auto tx = [&](double v) { return logx ? std::log10(v) : v; };
    auto ty = [&](double v) { return logy ? std::log10(v) : v; };

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((logx && s.x[i] <= 0.0) || (logy && s.y[i] <= 0.0)) continue;
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    if (xmin > xmax) { xmin = 0.0; xmax = 1.0; }
    if (ymin > ymax) { ymin = 0.0; ymax = 1.0; }
    if (xmax - xmin < 1e-12) { xmax += 0.5; xmin -= 0.5; }
    if (ymax - ymin < 1e-12) { ymax += 0.5; ymin -= 0.5; }

    auto px = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return mt + ph - (ty(v) - ymin) / (ymax - ymin) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">"
        << title << "</text>\n";
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int k = 0; k <= 5; ++k) {
        const double fx = xmin + (xmax - xmin) * k / 5.0;
        const double fy = ymin + (ymax - ymin) * k / 5.0;
        const double gx = ml + pw * k / 5.0;
        const double gy = mt + ph - ph * k / 5.0;
        out << "<line x1=\"" << g4(gx) << "\" y1=\"" << mt + ph << "\" x2=\"" << g4(gx)
            << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << g4(gx) << "\" y=\"" << mt + ph + 20
            << "\" font-size=\"11\" text-anchor=\"middle\">"
            << g3(logx ? std::pow(10.0, fx) : fx) << "</text>\n";
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << g4(gy) << "\" x2=\"" << ml << "\" y2=\""
            << g4(gy) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << g4(gy + 4)
            << "\" font-size=\"11\" text-anchor=\"end\">" << g3(logy ? std::pow(10.0, fy) : fy)
            << "</text>\n";
    }
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
        << "\" font-size=\"13\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    out << "<text x=\"18\" y=\"" << mt + ph / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << mt + ph / 2
        << ")\">" << ylabel << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        out << "<polyline fill=\"none\" stroke=\"" << palette[si % 8]
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((logx && s.x[i] <= 0.0) || (logy && s.y[i] <= 0.0)) continue;
            out << g4(px(s.x[i])) << ',' << g4(py(s.y[i])) << ' ';
        }
        out << "\"/>\n";
        out << "<text x=\"" << ml + pw - 8 << "\" y=\"" << mt + 16 + 16 * si
            << "\" font-size=\"12\" text-anchor=\"end\" fill=\"" << palette[si % 8] << "\">"
            << s.label << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// OutputWriter
// ---------------------------------------------------------------------------

OutputWriter::OutputWriter(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_ + ": " + ec.message());
    // Probe writability up front so no partial artifacts appear later.
    const fs::path probe = fs::path(dir_) / ".write_probe";
    std::ofstream test(probe, std::ios::binary);
    if (!test) throw IoError("output directory is not writable: " + dir_);
    test.close();
    fs::remove(probe, ec);
}

void OutputWriter::write(const std::string& name, const std::string& content) {
    const fs::path path = fs::path(dir_) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
    files_.emplace_back(name, content.size());
}

void OutputWriter::finalize(RunManifest& manifest, double wall_seconds) {
    manifest.files = files_;
    nlohmann::ordered_json j;
    j["artifact"] = "debond";
    j["version"] = "0.1.0";
    j["verb"] = manifest.verb;
    j["seed"] = manifest.seed;
    j["status"] = manifest.ok ? "ok" : "failed";
    j["audits"] = nlohmann::ordered_json::object();
    for (const auto& [name, pass] : manifest.audits) j["audits"][name] = pass;
    j["files"] = nlohmann::ordered_json::array();
    for (const auto& [name, bytes] : manifest.files) {
        nlohmann::ordered_json jf;
        jf["name"] = name;
        jf["bytes"] = bytes;
        j["files"].push_back(jf);
    }
    j["config"] = manifest.config_text;

    const fs::path tmp = fs::path(dir_) / "manifest.json.tmp";
    const fs::path dst = fs::path(dir_) / "manifest.json";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write manifest in " + dir_);
        out << j.dump(2) << "\n";
    }
    std::error_code ec;
    fs::rename(tmp, dst, ec);
    if (ec) throw IoError("cannot finalize manifest: " + ec.message());

    // Timing lives outside the reproducible JSON/CSV set.
    std::ofstream info(fs::path(dir_) / "runinfo.txt", std::ios::binary);
    info << "wall_clock_seconds " << wall_seconds << "\n";
}

}  // namespace debond
