#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bathyrec/diagnostics.hpp"
#include "bathyrec/io.hpp"
#include "bathyrec/noise.hpp"
#include "bathyrec/smoothing.hpp"
#include "bathyrec/solver.hpp"
#include "bathyrec/steady.hpp"

namespace bathyrec {

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace pipeline {

inline std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h = 1469598103934665603ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string config_hash(const ScenarioConfig& cfg) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(io::to_json(cfg).dump())));
    return buf;
}

/// Default Reinsch budget: n * (noise_level * mean depth)^2 with unit weights.
inline double default_smoothing_budget(const std::vector<double>& depth, double noise_level) {
    double mean = 0.0;
    for (double h : depth) mean += h;
    mean /= static_cast<double>(depth.size());
    return static_cast<double>(depth.size()) * (noise_level * mean) * (noise_level * mean);
}

/// Everything one scenario run produces, before any files are written.
struct ScenarioOutcome {
    ScenarioConfig cfg;
    Grid grid;
    BathymetryField bed;
    ForwardRunReport forward;
    SurfaceSnapshot snapshot;
    ReconstructionResult recon;
    std::pair<double, double> norms{0.0, 0.0}; // relative Linf, L2 of b_rec
    // steady closed-form branch (meaningful for steady scenarios)
    std::optional<std::pair<double, double>> steady_norms;
    std::optional<std::pair<double, double>> steady_free_norms; // discharge-free variant
    // diagnostics
    RegimeReport regime;
    NondegeneracyReport nondeg;
    ConditionReport theorem;
    ConditionReport corollary;
    std::vector<double> froude_tstar;
    std::vector<double> lambda2_max_t; // max over cells of lambda2, per stored level
};

inline double resolve_t_star(const ScenarioConfig& cfg, const FlowHistory& hist) {
    return cfg.t_star ? *cfg.t_star : hist.times.back();
}

/// forward -> snapshot -> condition checks -> reconstruction -> error norms,
/// plus the closed-form steady branch when the scenario is steady-compatible
/// (constant inlet discharge law).
inline ScenarioOutcome run_pipeline(const ScenarioConfig& cfg, bool with_conditions = true) {
    ScenarioOutcome out;
    out.cfg = cfg;
    out.grid = cfg.grid();
    out.bed = sample_bed(cfg.bed, out.grid);
    out.forward = run_forward(cfg);
    const auto& hist = out.forward.history;
    const double t_star = resolve_t_star(cfg, hist);
    out.snapshot = extract_snapshot(hist, t_star, out.bed, cfg.boundary, out.grid);
    out.recon = reconstruct(out.snapshot, out.grid, cfg.gravity);
    if (out.recon.degenerate)
        throw NumericError("reconstruction degenerate at cell " +
                           std::to_string(out.recon.degenerate_cell));
    out.norms = error_norms(out.recon.b_rec, out.bed.b_center, out.grid);

    const int ns = hist.index_of_time(t_star, 1e-9 * std::max(1.0, t_star));
    out.froude_tstar = froude_field(hist.frames[ns], out.bed, cfg.gravity);
    out.nondeg = nondegeneracy(out.recon.q_rec, 0.0);

    if (cfg.boundary.inlet_q && cfg.boundary.inlet_q->amplitude == 0.0) {
        const double zeta_a1 = extrapolate_to_inlet(out.snapshot.zeta, out.grid);
        const double h_a1 = zeta_a1 - out.snapshot.b_a1;
        const auto sr = steady_analytic(out.snapshot.zeta, out.snapshot.q_in, h_a1, out.grid,
                                        cfg.gravity, zeta_a1);
        out.steady_norms = error_norms(sr.b, out.bed.b_center, out.grid);
        // discharge-free variant referenced at the point of largest surface drop
        int j_ref = 0;
        for (int j = 1; j < out.grid.n_cells; ++j)
            if (std::abs(out.snapshot.zeta[j] - zeta_a1) >
                std::abs(out.snapshot.zeta[j_ref] - zeta_a1))
                j_ref = j;
        const double h_ref = out.snapshot.zeta[j_ref] - out.bed.b_center[j_ref];
        const auto sf = steady_discharge_free(out.snapshot.zeta, h_a1, out.grid.center(j_ref),
                                              h_ref, out.grid, cfg.gravity, zeta_a1);
        out.steady_free_norms = error_norms(sf.b, out.bed.b_center, out.grid);
    }

    if (with_conditions && hist.complete_from_start) {
        const double g = cfg.gravity;
        const double length = cfg.a2 - cfg.a1;
        out.regime = estimate_wave_bounds(hist, out.bed, 0.0, cfg.t_final, g);
        out.lambda2_max_t.resize(hist.levels());
        for (int n = 0; n < hist.levels(); ++n)
            out.lambda2_max_t[n] = detail::level_extrema(hist.frames[n], out.bed, g).max_l2;
        out.theorem = check_theorem_condition(hist, out.bed, 0.0, cfg.t_final, g, length);
        if (!out.theorem.holds)
            out.theorem = scan_theorem_shift(hist, out.bed, cfg.t_final, g, length);
        out.corollary = check_corollary_condition(hist, out.bed, 0.0, cfg.t_final, g, length);
        if (!out.corollary.holds)
            out.corollary = scan_corollary_shift(hist, out.bed, cfg.t_final, g, length);
    }
    return out;
}

struct NoiseTrial {
    std::uint64_t seed = 0;
    std::pair<double, double> smoothed{0.0, 0.0};
    std::pair<double, double> raw{0.0, 0.0};
};

struct NoiseStudy {
    double level = 0.0;
    double budget = 0.0;
    std::vector<NoiseTrial> trials;
    std::pair<double, double> mean_smoothed{0.0, 0.0};
    std::pair<double, double> mean_raw{0.0, 0.0};
};

/// Corrupts the snapshot surface (noise scaled by the true local depth),
/// reconstructs with and without the spline repair, and reports error norms
/// per seed plus means. budget_override <= 0 selects the default budget.
inline NoiseStudy noise_study(const ScenarioOutcome& base, double level,
                              const std::vector<std::uint64_t>& seeds,
                              double budget_override = 0.0) {
    NoiseStudy study;
    study.level = level;
    std::vector<double> depth(base.grid.n_cells);
    for (int j = 0; j < base.grid.n_cells; ++j)
        depth[j] = base.snapshot.zeta[j] - base.bed.b_center[j];
    study.budget = budget_override > 0.0 ? budget_override
                                         : default_smoothing_budget(depth, level);
    const auto x = base.grid.centers();
    for (auto seed : seeds) {
        NoiseTrial trial;
        trial.seed = seed;
        NoiseSpec spec{level, seed};
        const auto noisy = add_noise(base.snapshot.zeta, depth, spec);
        SurfaceSnapshot s_raw = base.snapshot;
        s_raw.zeta = noisy;
        SurfaceSnapshot s_smooth = base.snapshot;
        s_smooth.zeta = smooth_spline(x, noisy, SmootherSpec{study.budget, {}});
        for (auto* s : {&s_raw, &s_smooth}) {
            const auto r = reconstruct(*s, base.grid, base.cfg.gravity);
            std::pair<double, double> norms{std::numeric_limits<double>::infinity(),
                                            std::numeric_limits<double>::infinity()};
            if (!r.degenerate) norms = error_norms(r.b_rec, base.bed.b_center, base.grid);
            (s == &s_raw ? trial.raw : trial.smoothed) = norms;
        }
        study.trials.push_back(trial);
    }
    for (const auto& t : study.trials) {
        study.mean_smoothed.first += t.smoothed.first / study.trials.size();
        study.mean_smoothed.second += t.smoothed.second / study.trials.size();
        study.mean_raw.first += t.raw.first / study.trials.size();
        study.mean_raw.second += t.raw.second / study.trials.size();
    }
    return study;
}

// ----------------------------------------------------------------- artifacts

inline std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&tt));
    return buf;
}

/// Writes the per-scenario artifact set and returns the run record.
/// record.json carries timestamps and wall time; every other artifact is a
/// pure function of (config, seed) and is safe to hash for determinism.
inline nlohmann::json write_artifacts(const ScenarioOutcome& out, const std::string& dir,
                                      int history_stride = 0) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const auto& hist = out.forward.history;
    if (history_stride <= 0)
        history_stride = std::max(1, hist.levels() / 2000);
    io::write_history_csv(dir + "/history.csv", hist, out.grid, out.bed, history_stride);
    {
        auto f = io::open_out(dir + "/history.meta.json");
        nlohmann::json meta;
        meta["scenario"] = io::to_json(out.cfg);
        meta["stride"] = history_stride;
        f << meta.dump(2) << '\n';
    }
    io::write_snapshot(dir + "/snapshot.json", dir + "/snapshot.csv", out.snapshot, out.grid,
                       out.cfg.gravity, io::to_json(out.cfg));
    io::write_reconstruction(dir + "/reconstruction.csv", dir + "/reconstruction.json", out.recon,
                             out.grid, &out.bed.b_center, &out.norms);
    {
        nlohmann::json cj;
        cj["regime"] = io::to_json(out.regime);
        cj["theorem"] = io::to_json(out.theorem);
        cj["corollary"] = io::to_json(out.corollary);
        cj["nondegeneracy"] = {{"holds", out.nondeg.holds},
                               {"min_q", out.nondeg.min_q},
                               {"argmin_cell", out.nondeg.argmin_cell}};
        auto f = io::open_out(dir + "/conditions.json");
        f << cj.dump(2) << '\n';
    }
    nlohmann::json record;
    record["scenario"] = out.cfg.name;
    record["config_hash"] = config_hash(out.cfg);
    record["forward"] = {{"steps", out.forward.steps},
                         {"min_depth", out.forward.min_depth},
                         {"max_speed", out.forward.max_speed},
                         {"wall_seconds", out.forward.wall_seconds}};
    record["reconstruction"] = {{"linf_rel", out.norms.first},
                                {"l2_rel", out.norms.second},
                                {"min_q", out.recon.min_q},
                                {"t_star", out.recon.t_star}};
    if (out.steady_norms)
        record["steady"] = {{"linf_rel", out.steady_norms->first},
                            {"l2_rel", out.steady_norms->second}};
    if (out.steady_free_norms)
        record["steady_discharge_free"] = {{"linf_rel", out.steady_free_norms->first},
                                           {"l2_rel", out.steady_free_norms->second}};
    record["artifacts"] = {"history.csv", "history.meta.json", "snapshot.json", "snapshot.csv",
                           "reconstruction.csv", "reconstruction.json", "conditions.json"};
    record["timestamp"] = iso_timestamp();
    auto f = io::open_out(dir + "/record.json");
    f << record.dump(2) << '\n';
    return record;
}

/// Plot-ready tidy series: bed/surface profiles, discharge comparison, the
/// Froude profile at t*, and the max-lambda2 time series.
inline void emit_plotdata(const ScenarioOutcome& out, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const auto& hist = out.forward.history;
    const int ns = hist.index_of_time(out.snapshot.t_star,
                                      1e-9 * std::max(1.0, out.snapshot.t_star));
    {
        auto f = io::open_out(dir + "/plot_bed.csv");
        f << "x,b_true,b_rec,zeta\n";
        for (int j = 0; j < out.grid.n_cells; ++j)
            f << io::fmt(out.grid.center(j)) << ',' << io::fmt(out.bed.b_center[j]) << ','
              << io::fmt(out.recon.b_rec[j]) << ',' << io::fmt(out.snapshot.zeta[j]) << '\n';
    }
    {
        auto f = io::open_out(dir + "/plot_discharge.csv");
        f << "x,q_forward,q_rec\n";
        for (int j = 0; j < out.grid.n_cells; ++j)
            f << io::fmt(out.grid.center(j)) << ',' << io::fmt(hist.frames[ns].q[j]) << ','
              << io::fmt(out.recon.q_rec[j]) << '\n';
    }
    {
        auto f = io::open_out(dir + "/plot_froude.csv");
        f << "x,froude\n";
        for (int j = 0; j < out.grid.n_cells; ++j)
            f << io::fmt(out.grid.center(j)) << ',' << io::fmt(out.froude_tstar[j]) << '\n';
    }
    if (!out.lambda2_max_t.empty()) {
        auto f = io::open_out(dir + "/plot_lambda2.csv");
        f << "t,max_lambda2\n";
        for (int n = 0; n < hist.levels(); ++n)
            f << io::fmt(hist.times[n]) << ',' << io::fmt(out.lambda2_max_t[n]) << '\n';
    }
}

} // namespace pipeline
} // namespace bathyrec
