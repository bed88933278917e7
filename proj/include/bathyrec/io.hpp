#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bathyrec/diagnostics.hpp"
#include "bathyrec/flow.hpp"
#include "bathyrec/grid.hpp"
#include "bathyrec/inverse.hpp"
#include "bathyrec/measurement.hpp"
#include "bathyrec/scenario.hpp"

namespace bathyrec {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace io {

/// Shortest-exact decimal form so CSV artifacts round-trip bit-for-bit.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    return f;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open for reading: " + path);
    return f;
}

inline std::vector<double> split_doubles(const std::string& line) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

// ---------------------------------------------------------------- scenarios

inline nlohmann::json to_json(const BedSpec& bed) {
    nlohmann::json j;
    switch (bed.kind) {
        case BedSpec::Kind::Flat:
            j["type"] = "flat"; j["elevation"] = bed.elevation; break;
        case BedSpec::Kind::Bump:
            j["type"] = "bump"; j["center"] = bed.center; j["height"] = bed.height; j["coeff"] = bed.coeff; break;
        case BedSpec::Kind::Sandbar:
            j["type"] = "sandbar"; j["amplitude"] = bed.amplitude; break;
        case BedSpec::Kind::Sech:
            j["type"] = "sech"; j["amplitude"] = bed.amplitude; break;
        case BedSpec::Kind::Composite:
            j["type"] = "composite"; break;
        case BedSpec::Kind::Tabulated:
            j["type"] = "tabulated"; j["x"] = bed.tab_x; j["b"] = bed.tab_b; break;
    }
    return j;
}

inline BedSpec bed_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "flat") return BedSpec::flat(j.value("elevation", 0.0));
    if (type == "bump")
        return BedSpec::bump(j.value("center", 10.0), j.value("height", 0.2), j.value("coeff", 0.05));
    if (type == "sandbar") return BedSpec::sandbar(j.at("amplitude").get<double>());
    if (type == "sech") return BedSpec::sech(j.value("amplitude", 0.2));
    if (type == "composite") return BedSpec::composite();
    if (type == "tabulated") {
        BedSpec s;
        s.kind = BedSpec::Kind::Tabulated;
        if (j.contains("csv")) {
            auto f = open_in(j.at("csv").get<std::string>());
            std::string line;
            while (std::getline(f, line)) {
                if (line.empty() || line[0] == '#' || line.rfind("x,", 0) == 0) continue;
                const auto v = split_doubles(line);
                if (v.size() != 2) throw IoError("tabulated bed: expected two columns (x, b)");
                s.tab_x.push_back(v[0]);
                s.tab_b.push_back(v[1]);
            }
        } else {
            s.tab_x = j.at("x").get<std::vector<double>>();
            s.tab_b = j.at("b").get<std::vector<double>>();
        }
        return s;
    }
    throw std::invalid_argument("unknown bed generator: " + type);
}

inline nlohmann::json law_to_json(const SinusoidLaw& law) {
    nlohmann::json j;
    j["base"] = law.base;
    if (law.amplitude != 0.0) {
        j["amplitude"] = law.amplitude;
        j["period"] = law.period;
    }
    return j;
}

inline SinusoidLaw law_from_json(const nlohmann::json& j) {
    SinusoidLaw law;
    if (j.is_number()) {
        law.base = j.get<double>();
        return law;
    }
    law.base = j.at("base").get<double>();
    law.amplitude = j.value("amplitude", 0.0);
    law.period = j.value("period", 1.0);
    return law;
}

inline nlohmann::json to_json(const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["name"] = cfg.name;
    j["grid"] = {{"a1", cfg.a1}, {"a2", cfg.a2}, {"n_cells", cfg.n_cells}};
    j["bed"] = to_json(cfg.bed);
    nlohmann::json init;
    init["zeta"] = cfg.initial.zeta;
    init["q"] = cfg.initial.q;
    if (cfg.initial.hump_amplitude != 0.0) {
        init["hump"] = {{"amplitude", cfg.initial.hump_amplitude},
                        {"center", cfg.initial.hump_center},
                        {"width", cfg.initial.hump_width}};
    }
    j["initial"] = init;
    nlohmann::json bc;
    if (cfg.boundary.inlet_q) bc["inlet_q"] = law_to_json(*cfg.boundary.inlet_q);
    if (cfg.boundary.inlet_h) bc["inlet_h"] = law_to_json(*cfg.boundary.inlet_h);
    if (cfg.boundary.outlet_h) bc["outlet_h"] = law_to_json(*cfg.boundary.outlet_h);
    j["boundary"] = bc;
    j["t_final"] = cfg.t_final;
    j["cfl_c"] = cfg.cfl_c;
    j["theta"] = cfg.theta;
    j["gravity"] = cfg.gravity;
    j["t_star"] = cfg.t_star ? nlohmann::json(*cfg.t_star) : nlohmann::json("last");
    return j;
}

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
    ScenarioConfig cfg;
    cfg.name = j.value("name", "scenario");
    const auto& gj = j.at("grid");
    cfg.a1 = gj.at("a1").get<double>();
    cfg.a2 = gj.at("a2").get<double>();
    cfg.n_cells = gj.at("n_cells").get<int>();
    cfg.bed = bed_from_json(j.at("bed"));
    const auto& ij = j.at("initial");
    cfg.initial.zeta = ij.at("zeta").get<double>();
    cfg.initial.q = ij.at("q").get<double>();
    if (ij.contains("hump")) {
        cfg.initial.hump_amplitude = ij["hump"].at("amplitude").get<double>();
        cfg.initial.hump_center = ij["hump"].at("center").get<double>();
        cfg.initial.hump_width = ij["hump"].at("width").get<double>();
    }
    if (j.contains("boundary")) {
        const auto& bj = j.at("boundary");
        if (bj.contains("inlet_q")) cfg.boundary.inlet_q = law_from_json(bj["inlet_q"]);
        if (bj.contains("inlet_h")) cfg.boundary.inlet_h = law_from_json(bj["inlet_h"]);
        if (bj.contains("outlet_h")) cfg.boundary.outlet_h = law_from_json(bj["outlet_h"]);
    }
    cfg.t_final = j.at("t_final").get<double>();
    cfg.cfl_c = j.value("cfl_c", 0.9);
    cfg.theta = j.value("theta", 1.0);
    cfg.gravity = j.value("gravity", 9.812);
    if (j.contains("t_star") && j["t_star"].is_number()) cfg.t_star = j["t_star"].get<double>();
    cfg.validate();
    return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
    auto f = open_in(path);
    nlohmann::json j;
    f >> j;
    return scenario_from_json(j);
}

// ------------------------------------------------------------------ history

/// Normative long-format export: one row per (t, x) with columns
/// t, x, zeta, q, h. A stride > 1 thins interior levels but always keeps the
/// first and last four (the snapshot stencils read consecutive tail levels).
inline void write_history_csv(const std::string& path, const FlowHistory& hist,
                              const Grid& grid, const BathymetryField& bed, int stride = 1) {
    auto f = open_out(path);
    f << "t,x,zeta,q,h\n";
    const int levels = hist.levels();
    std::string row;
    for (int n = 0; n < levels; ++n) {
        const bool edge = n < 4 || n >= levels - 4;
        if (!edge && stride > 1 && n % stride != 0) continue;
        const auto& fr = hist.frames[n];
        for (int j = 0; j < grid.n_cells; ++j) {
            row.clear();
            row += fmt(hist.times[n]); row += ',';
            row += fmt(grid.center(j)); row += ',';
            row += fmt(fr.zeta[j]); row += ',';
            row += fmt(fr.q[j]); row += ',';
            row += fmt(fr.zeta[j] - bed.b_center[j]); row += '\n';
            f << row;
        }
    }
}

inline FlowHistory read_history_csv(const std::string& path, const Grid& grid) {
    auto f = open_in(path);
    std::string line;
    if (!std::getline(f, line)) throw IoError("empty history file: " + path);
    FlowHistory hist;
    FlowField current;
    bool has_current = false;
    double t_current = 0.0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto v = split_doubles(line);
        if (v.size() < 4) throw IoError("history row needs at least 4 columns");
        if (!has_current || v[0] != t_current) {
            if (has_current) {
                hist.times.push_back(t_current);
                hist.frames.push_back(std::move(current));
            }
            current = FlowField{};
            current.t = v[0];
            t_current = v[0];
            has_current = true;
        }
        current.zeta.push_back(v[2]);
        current.q.push_back(v[3]);
    }
    if (has_current) {
        hist.times.push_back(t_current);
        hist.frames.push_back(std::move(current));
    }
    for (const auto& fr : hist.frames)
        if (static_cast<int>(fr.zeta.size()) != grid.n_cells)
            throw IoError("history is not aligned with the scenario grid");
    if (!hist.times.empty() && hist.times.front() != 0.0) hist.complete_from_start = false;
    return hist;
}

// ----------------------------------------------------------------- snapshot

/// Snapshot contract: a CSV with per-cell columns plus a JSON header carrying
/// the scalars, the grid and a pointer to the CSV. Real measured data in this
/// layout can replace synthetic data anywhere downstream.
inline void write_snapshot(const std::string& json_path, const std::string& csv_path,
                           const SurfaceSnapshot& s, const Grid& grid, double gravity,
                           const nlohmann::json& scenario = {}) {
    {
        auto f = open_out(csv_path);
        f << "x,zeta,dzeta_dt,d2zeta_dt2\n";
        for (std::size_t j = 0; j < s.zeta.size(); ++j)
            f << fmt(grid.center(static_cast<int>(j))) << ',' << fmt(s.zeta[j]) << ','
              << fmt(s.dzeta_dt[j]) << ',' << fmt(s.d2zeta_dt2[j]) << '\n';
    }
    nlohmann::json j;
    j["t_star"] = s.t_star;
    j["q_in"] = s.q_in;
    j["dq_in_dt"] = s.dq_in_dt;
    j["b_a1"] = s.b_a1;
    j["gravity"] = gravity;
    j["grid"] = {{"a1", grid.a1}, {"a2", grid.a2}, {"n_cells", grid.n_cells}};
    j["csv"] = std::filesystem::path(csv_path).filename().string();
    if (!scenario.is_null() && !scenario.empty()) j["scenario"] = scenario;
    auto f = open_out(json_path);
    f << j.dump(2) << '\n';
}

struct LoadedSnapshot {
    SurfaceSnapshot snapshot;
    Grid grid;
    double gravity = 9.812;
    nlohmann::json scenario; // empty unless the producer embedded one
};

inline LoadedSnapshot read_snapshot(const std::string& json_path) {
    auto jf = open_in(json_path);
    nlohmann::json j;
    jf >> j;
    LoadedSnapshot out;
    out.snapshot.t_star = j.at("t_star").get<double>();
    out.snapshot.q_in = j.at("q_in").get<double>();
    out.snapshot.dq_in_dt = j.at("dq_in_dt").get<double>();
    out.snapshot.b_a1 = j.at("b_a1").get<double>();
    out.gravity = j.value("gravity", 9.812);
    const auto& gj = j.at("grid");
    out.grid = build_grid(gj.at("a1").get<double>(), gj.at("a2").get<double>(),
                          gj.at("n_cells").get<int>());
    if (j.contains("scenario")) out.scenario = j["scenario"];
    std::filesystem::path csv = j.at("csv").get<std::string>();
    if (csv.is_relative()) csv = std::filesystem::path(json_path).parent_path() / csv;
    auto f = open_in(csv.string());
    std::string line;
    std::getline(f, line);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto v = split_doubles(line);
        if (v.size() != 4) throw IoError("snapshot row needs 4 columns");
        out.snapshot.zeta.push_back(v[1]);
        out.snapshot.dzeta_dt.push_back(v[2]);
        out.snapshot.d2zeta_dt2.push_back(v[3]);
    }
    if (static_cast<int>(out.snapshot.zeta.size()) != out.grid.n_cells)
        throw IoError("snapshot is not aligned with its grid header");
    return out;
}

// ----------------------------------------------------------- reconstruction

inline void write_reconstruction(const std::string& csv_path, const std::string& json_path,
                                 const ReconstructionResult& r, const Grid& grid,
                                 const std::vector<double>* b_true,
                                 const std::pair<double, double>* norms) {
    {
        auto f = open_out(csv_path);
        f << "x,q_rec,dq_dt_rec,phi,b_rec";
        if (b_true) f << ",b_true,abs_err";
        f << '\n';
        for (int j = 0; j < grid.n_cells; ++j) {
            f << fmt(grid.center(j)) << ',' << fmt(r.q_rec[j]) << ',' << fmt(r.dq_dt_rec[j]) << ','
              << fmt(r.phi.empty() ? 0.0 : r.phi[j]) << ',' << fmt(r.b_rec.empty() ? 0.0 : r.b_rec[j]);
            if (b_true)
                f << ',' << fmt((*b_true)[j]) << ','
                  << fmt(std::abs((r.b_rec.empty() ? 0.0 : r.b_rec[j]) - (*b_true)[j]));
            f << '\n';
        }
    }
    nlohmann::json j;
    j["t_star"] = r.t_star;
    j["min_q"] = r.min_q;
    j["degenerate"] = r.degenerate;
    if (r.degenerate) j["degenerate_cell"] = r.degenerate_cell;
    j["nondegeneracy_warning"] = r.nondegeneracy_warning;
    if (norms) {
        j["linf_rel"] = norms->first;
        j["l2_rel"] = norms->second;
    }
    j["csv"] = std::filesystem::path(csv_path).filename().string();
    auto f = open_out(json_path);
    f << j.dump(2) << '\n';
}

inline nlohmann::json to_json(const ConditionReport& r) {
    nlohmann::json j;
    j["condition"] = r.condition;
    j["holds"] = r.holds;
    if (!r.holds) j["reason"] = r.reason;
    j["rho"] = r.rho;
    j["c1"] = r.c1;
    j["c2"] = r.c2;
    j["bed_rise_sum"] = r.bed_rise_sum;
    j["window"] = {r.window_lo, r.window_hi};
    j["certified_from"] = r.certified_from;
    j["certified_q_lower"] = r.certified_q_lower;
    j["epsilon_depth"] = r.epsilon_depth;
    return j;
}

inline nlohmann::json to_json(const RegimeReport& r) {
    nlohmann::json j;
    j["window"] = {r.t_lo, r.t_hi};
    j["c1"] = r.c1;
    j["c2"] = r.c2;
    j["min_depth"] = r.min_depth;
    j["max_depth"] = r.max_depth;
    j["strongly_subcritical"] = r.strongly_subcritical;
    return j;
}

inline nlohmann::json to_json(const StabilityBudget& b) {
    nlohmann::json j;
    j["C1"] = b.c1;
    j["C2"] = b.c2;
    j["C3"] = b.c3;
    j["C4"] = b.c4;
    j["C12"] = b.c12;
    j["E"] = b.e_term;
    j["beta"] = b.beta;
    j["bound"] = b.bound;
    j["observed_l1"] = b.observed;
    j["holds"] = b.holds;
    return j;
}

} // namespace io
} // namespace bathyrec
