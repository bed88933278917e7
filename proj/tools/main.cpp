// Command-line front end: forward runs, snapshot extraction, bed
// reconstruction, condition checks and the five-test benchmark.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bathyrec/bench.hpp"
#include "bathyrec/pipeline.hpp"

using namespace bathyrec;

namespace {

struct GlobalOpts {
    std::string out_dir;
    std::uint64_t seed = 7;
    bool quiet = false;
};

std::string default_out_dir() {
    if (const char* env = std::getenv("BATHYREC_OUT_DIR")) return env;
    return "out";
}

nlohmann::json load_meta_for(const std::string& history_path) {
    namespace fs = std::filesystem;
    const fs::path p(history_path);
    for (const auto& cand : {fs::path(history_path + ".meta.json"),
                             p.parent_path() / "history.meta.json"}) {
        if (fs::exists(cand)) {
            auto f = io::open_in(cand.string());
            nlohmann::json j;
            f >> j;
            return j;
        }
    }
    throw IoError("no metadata found for " + history_path +
                  " (expected <history>.meta.json or history.meta.json beside it)");
}

void print_condition(const ConditionReport& r) {
    std::printf("  %-10s %s", r.condition.c_str(), r.holds ? "holds" : "fails");
    if (r.holds)
        std::printf("  rho=%.4g c1=%.3g c2=%.3g window=(%.4g,%.4g) certified_from=%.4g q>=%.4g",
                    r.rho, r.c1, r.c2, r.window_lo, r.window_hi, r.certified_from,
                    r.certified_q_lower);
    else
        std::printf("  (%s)", r.reason.c_str());
    std::printf("\n");
}

int cmd_forward(const GlobalOpts& g, const std::string& config_path, std::string out_path,
                int stride) {
    const ScenarioConfig cfg = io::load_scenario(config_path);
    if (out_path.empty()) out_path = g.out_dir + "/" + cfg.name + "/history.csv";
    const auto report = run_forward(cfg);
    const Grid grid = cfg.grid();
    const auto bed = sample_bed(cfg.bed, grid);
    io::write_history_csv(out_path, report.history, grid, bed, stride);
    {
        nlohmann::json meta;
        meta["scenario"] = io::to_json(cfg);
        meta["stride"] = stride;
        auto f = io::open_out(out_path + ".meta.json");
        f << meta.dump(2) << '\n';
    }
    if (!g.quiet)
        std::printf("forward: %lld steps, min depth %.3g, max speed %.3g, %.2fs -> %s\n",
                    report.steps, report.min_depth, report.max_speed, report.wall_seconds,
                    out_path.c_str());
    return 0;
}

int cmd_snapshot(const GlobalOpts& g, const std::string& history_path, const std::string& t_star,
                 std::string out_json) {
    const auto meta = load_meta_for(history_path);
    const ScenarioConfig cfg = io::scenario_from_json(meta.at("scenario"));
    const Grid grid = cfg.grid();
    const auto bed = sample_bed(cfg.bed, grid);
    const auto hist = io::read_history_csv(history_path, grid);
    double ts = t_star == "last" ? hist.times.back() : std::stod(t_star);
    const auto snap = extract_snapshot(hist, ts, bed, cfg.boundary, grid);
    if (out_json.empty()) out_json = g.out_dir + "/" + cfg.name + "/snapshot.json";
    const std::string out_csv =
        (std::filesystem::path(out_json).parent_path() /
         (std::filesystem::path(out_json).stem().string() + ".csv")).string();
    io::write_snapshot(out_json, out_csv, snap, grid, cfg.gravity, meta.at("scenario"));
    if (!g.quiet)
        std::printf("snapshot at t*=%.6g: q_in=%.6g dq_in_dt=%.6g b(a1)=%.6g -> %s\n", snap.t_star,
                    snap.q_in, snap.dq_in_dt, snap.b_a1, out_json.c_str());
    return 0;
}

int cmd_reconstruct(const GlobalOpts& g, const std::string& snapshot_path, std::string out_csv,
                    double beta_warn) {
    const auto loaded = io::read_snapshot(snapshot_path);
    ReconstructOptions opts;
    opts.beta_warn = beta_warn;
    const auto r = reconstruct(loaded.snapshot, loaded.grid, loaded.gravity, opts);
    if (r.degenerate) {
        std::fprintf(stderr,
                     "reconstruct: degenerate flow, phi collapsed at cell %d (min q = %.4g)\n",
                     r.degenerate_cell, r.min_q);
        return 2;
    }
    std::optional<std::vector<double>> b_true;
    std::optional<std::pair<double, double>> norms;
    if (!loaded.scenario.is_null() && !loaded.scenario.empty()) {
        const ScenarioConfig cfg = io::scenario_from_json(loaded.scenario);
        b_true = sample_bed(cfg.bed, loaded.grid).b_center;
        norms = error_norms(r.b_rec, *b_true, loaded.grid);
    }
    if (out_csv.empty()) out_csv = g.out_dir + "/reconstruction.csv";
    const std::string out_json =
        (std::filesystem::path(out_csv).parent_path() /
         (std::filesystem::path(out_csv).stem().string() + ".json")).string();
    io::write_reconstruction(out_csv, out_json, r, loaded.grid, b_true ? &*b_true : nullptr,
                             norms ? &*norms : nullptr);
    if (!g.quiet) {
        std::printf("reconstruct: min q=%.4g%s", r.min_q,
                    r.nondegeneracy_warning ? " (nondegeneracy warning)" : "");
        if (norms) std::printf("  Linf=%.2f%% L2=%.2f%%", norms->first * 100, norms->second * 100);
        std::printf(" -> %s\n", out_csv.c_str());
    }
    return 0;
}

int cmd_steady(const GlobalOpts& g, const std::string& snapshot_path, bool discharge_free,
               double x_ref, double b_ref, bool has_b_ref, std::string out_csv) {
    const auto loaded = io::read_snapshot(snapshot_path);
    const auto& s = loaded.snapshot;
    const Grid& grid = loaded.grid;
    const double zeta_a1 = extrapolate_to_inlet(s.zeta, grid);
    const double h_a1 = zeta_a1 - s.b_a1;
    SteadyReconstruction rec;
    if (discharge_free) {
        double b_at_ref = b_ref;
        if (!has_b_ref) {
            if (loaded.scenario.is_null() || loaded.scenario.empty())
                throw std::invalid_argument("steady --discharge-free needs --b-ref (bed at x-ref)");
            const ScenarioConfig cfg = io::scenario_from_json(loaded.scenario);
            b_at_ref = bed_eval(cfg.bed, x_ref);
        }
        int j_ref = 0;
        for (int j = 1; j < grid.n_cells; ++j)
            if (std::abs(grid.center(j) - x_ref) < std::abs(grid.center(j_ref) - x_ref)) j_ref = j;
        const double h_ref = s.zeta[j_ref] - b_at_ref;
        rec = steady_discharge_free(s.zeta, h_a1, x_ref, h_ref, grid, loaded.gravity, zeta_a1);
    } else {
        rec = steady_analytic(s.zeta, s.q_in, h_a1, grid, loaded.gravity, zeta_a1);
    }
    if (out_csv.empty()) out_csv = g.out_dir + "/steady.csv";
    auto f = io::open_out(out_csv);
    f << "x,h,b\n";
    for (int j = 0; j < grid.n_cells; ++j)
        f << io::fmt(grid.center(j)) << ',' << io::fmt(rec.h[j]) << ',' << io::fmt(rec.b[j])
          << '\n';
    if (!g.quiet) std::printf("steady reconstruction -> %s\n", out_csv.c_str());
    return 0;
}

int cmd_check(const GlobalOpts& g, const std::string& history_path, const std::string& window,
              std::string out_json) {
    const auto meta = load_meta_for(history_path);
    const ScenarioConfig cfg = io::scenario_from_json(meta.at("scenario"));
    const Grid grid = cfg.grid();
    const auto bed = sample_bed(cfg.bed, grid);
    const auto hist = io::read_history_csv(history_path, grid);
    double lo = hist.times.front(), hi = hist.times.back();
    if (!window.empty()) {
        std::stringstream ss(window);
        std::string a, b;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        lo = std::stod(a);
        hi = std::stod(b);
    }
    const double length = cfg.a2 - cfg.a1;
    const auto regime = estimate_wave_bounds(hist, bed, lo, hi, cfg.gravity);
    auto theorem = check_theorem_condition(hist, bed, lo, hi, cfg.gravity, length);
    if (!theorem.holds && window.empty())
        theorem = scan_theorem_shift(hist, bed, hi, cfg.gravity, length);
    auto corollary = check_corollary_condition(hist, bed, lo, hi, cfg.gravity, length);
    if (!corollary.holds && window.empty())
        corollary = scan_corollary_shift(hist, bed, hi, cfg.gravity, length);
    nlohmann::json cj;
    cj["regime"] = io::to_json(regime);
    cj["theorem"] = io::to_json(theorem);
    cj["corollary"] = io::to_json(corollary);
    if (out_json.empty()) out_json = g.out_dir + "/conditions.json";
    auto f = io::open_out(out_json);
    f << cj.dump(2) << '\n';
    if (!g.quiet) {
        std::printf("window (%.4g, %.4g): c1=%.4g c2=%.4g %s\n", regime.t_lo, regime.t_hi,
                    regime.c1, regime.c2,
                    regime.strongly_subcritical ? "strongly subcritical" : "");
        print_condition(theorem);
        print_condition(corollary);
    }
    return 0;
}

int cmd_bench(const GlobalOpts& g, const std::string& tests, const std::string& nx) {
    bench::BenchOptions opts;
    opts.seed = g.seed;
    opts.out_dir = g.out_dir;
    opts.quiet = g.quiet;
    if (!tests.empty()) {
        opts.tests.clear();
        std::stringstream ss(tests);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const auto dots = tok.find("..");
            if (dots != std::string::npos) {
                const int a = std::stoi(tok.substr(0, dots));
                const int b = std::stoi(tok.substr(dots + 2));
                for (int t = a; t <= b; ++t) opts.tests.push_back(t);
            } else {
                opts.tests.push_back(std::stoi(tok));
            }
        }
    }
    if (!nx.empty()) {
        std::stringstream ss(nx);
        std::string tok;
        while (std::getline(ss, tok, ',')) opts.nx_filter.push_back(std::stoi(tok));
    }
    const auto res = bench::run_bench(opts);
    if (!g.quiet) {
        std::printf("%-22s %5s %8s %8s %8s %8s  %s\n", "row", "nx", "Linf%", "L2%", "paper",
                    "paper", "verdict");
        for (const auto& r : res.rows)
            std::printf("%-22s %5d %8.2f %8.2f %8.2f %8.2f  %s  %s\n", r.id.c_str(), r.nx, r.linf,
                        r.l2, r.paper_linf, r.paper_l2, r.pass ? "pass" : "FAIL",
                        r.detail.c_str());
        std::printf("artifacts under %s\n", g.out_dir.c_str());
    }
    return 0;
}

int cmd_noise_study(const GlobalOpts& g, const std::string& config_path, double level,
                    int n_seeds, bool smooth, double budget) {
    const ScenarioConfig cfg = io::load_scenario(config_path);
    const auto out = pipeline::run_pipeline(cfg, false);
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < n_seeds; ++i) seeds.push_back(g.seed + i);
    const auto study = pipeline::noise_study(out, level, seeds, budget);
    nlohmann::json nj;
    nj["level"] = study.level;
    nj["budget"] = study.budget;
    nj["mean_smoothed"] = {study.mean_smoothed.first, study.mean_smoothed.second};
    nj["mean_raw"] = {study.mean_raw.first, study.mean_raw.second};
    for (const auto& t : study.trials)
        nj["trials"].push_back({{"seed", t.seed},
                                {"smoothed", {t.smoothed.first, t.smoothed.second}},
                                {"raw", {t.raw.first, t.raw.second}}});
    const std::string out_json = g.out_dir + "/" + cfg.name + "/noise_study.json";
    auto f = io::open_out(out_json);
    f << nj.dump(2) << '\n';
    if (!g.quiet) {
        for (const auto& t : study.trials)
            std::printf("seed %llu: raw Linf=%.1f%% L2=%.1f%%  smoothed Linf=%.1f%% L2=%.1f%%\n",
                        static_cast<unsigned long long>(t.seed), t.raw.first * 100,
                        t.raw.second * 100, t.smoothed.first * 100, t.smoothed.second * 100);
        const auto& m = smooth ? study.mean_smoothed : study.mean_raw;
        std::printf("mean %s: Linf=%.1f%% L2=%.1f%% -> %s\n", smooth ? "smoothed" : "raw",
                    m.first * 100, m.second * 100, out_json.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shallow-water bathymetry reconstruction toolkit"};
    app.require_subcommand(1);
    GlobalOpts g;
    g.out_dir = default_out_dir();
    app.add_option("--out-dir", g.out_dir, "Artifact directory (env BATHYREC_OUT_DIR)");
    app.add_option("--seed", g.seed, "Base RNG seed");
    app.add_flag("--quiet", g.quiet, "Suppress progress output");

    std::string config_path, history_path, snapshot_path, out_path, t_star = "last";
    std::string tests, nx, window;
    int stride = 1, n_seeds = 5;
    double beta_warn = 0.1, level = 0.02, x_ref = 0.0, b_ref = 0.0, budget = 0.0;
    bool discharge_free = false, smooth = false;

    auto* fwd = app.add_subcommand("forward", "Run the forward solver on a scenario config");
    fwd->add_option("config", config_path, "Scenario JSON")->required();
    fwd->add_option("--out", out_path, "History CSV path");
    fwd->add_option("--stride", stride, "Keep every k-th level in the CSV");

    auto* snap = app.add_subcommand("snapshot", "Extract the surface measurement set");
    snap->add_option("history", history_path, "History CSV")->required();
    snap->add_option("--t-star", t_star, "Measurement time (number or 'last')");
    snap->add_option("--out", out_path, "Snapshot JSON path");

    auto* rec = app.add_subcommand("reconstruct", "Run the one-shot inverse on a snapshot");
    rec->add_option("snapshot", snapshot_path, "Snapshot JSON")->required();
    rec->add_option("--out", out_path, "Reconstruction CSV path");
    rec->add_option("--beta", beta_warn, "Nondegeneracy warning threshold");

    auto* st = app.add_subcommand("steady", "Closed-form steady reconstruction");
    st->add_option("snapshot", snapshot_path, "Snapshot JSON")->required();
    st->add_flag("--discharge-free", discharge_free, "Recover q from a second bed point");
    st->add_option("--x-ref", x_ref, "Reference position for --discharge-free");
    auto* bref_opt = st->add_option("--b-ref", b_ref, "Bed elevation at --x-ref");
    st->add_option("--out", out_path, "Output CSV path");

    auto* chk = app.add_subcommand("check", "Regime and sufficient-condition reports");
    chk->add_option("history", history_path, "History CSV")->required();
    chk->add_option("--window", window, "Time window 'a,b' (default: full, with shift scans)");
    chk->add_option("--out", out_path, "Conditions JSON path");

    auto* ben = app.add_subcommand("bench", "Run the five-test benchmark table");
    ben->add_option("--tests", tests, "Subset, e.g. 1,3 or 1..5");
    ben->add_option("--nx", nx, "Resolution filter, e.g. 100,200");

    auto* noi = app.add_subcommand("noise-study", "Noise + smoothing study on a scenario");
    noi->add_option("config", config_path, "Scenario JSON")->required();
    noi->add_option("--level", level, "Relative noise amplitude (fraction of depth)");
    noi->add_option("--seeds", n_seeds, "Number of seeds");
    noi->add_flag("--smooth", smooth, "Report the spline-smoothed means");
    noi->add_option("--budget", budget, "Reinsch residual budget override");

    try {
        app.parse(argc, argv);
        if (fwd->parsed()) return cmd_forward(g, config_path, out_path, stride);
        if (snap->parsed()) return cmd_snapshot(g, history_path, t_star, out_path);
        if (rec->parsed()) return cmd_reconstruct(g, snapshot_path, out_path, beta_warn);
        if (st->parsed())
            return cmd_steady(g, snapshot_path, discharge_free, x_ref, b_ref,
                              bref_opt->count() > 0, out_path);
        if (chk->parsed()) return cmd_check(g, history_path, window, out_path);
        if (ben->parsed()) return cmd_bench(g, tests, nx);
        if (noi->parsed()) return cmd_noise_study(g, config_path, level, n_seeds, smooth, budget);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    }
}
