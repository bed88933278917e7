#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <scenarios_embedded.hpp>

#include "bathyrec/pipeline.hpp"

namespace bathyrec::bench {

inline nlohmann::json embedded_json(const std::string& name) {
    for (const auto& [fname, content] : embedded::data_files)
        if (fname == name) return nlohmann::json::parse(content);
    throw IoError("embedded data file not found: " + name);
}

/// The five shipped benchmark configurations, by scenario name.
inline ScenarioConfig builtin_scenario(const std::string& name, int nx_override = 0) {
    ScenarioConfig cfg = io::scenario_from_json(embedded_json(name + ".json"));
    if (nx_override > 0) cfg.n_cells = nx_override;
    return cfg;
}

inline std::vector<std::string> builtin_scenario_names() {
    return {"test1", "test2", "test3", "test4", "test5"};
}

struct BenchRow {
    std::string id, scenario, mode, check;
    int nx = 0;
    double linf = 0.0, l2 = 0.0;             // measured, percent
    double paper_linf = 0.0, paper_l2 = 0.0; // reported, percent (0 = none)
    double linf_lo = 0.0, linf_hi = 0.0, l2_lo = 0.0, l2_hi = 0.0;
    bool has_band = false;
    bool pass = false;
    std::string detail;
};

struct BenchOptions {
    std::vector<int> tests = {1, 2, 3, 4, 5};
    std::vector<int> nx_filter;       // empty: every nx the bands file lists
    std::uint64_t seed = 7;
    std::string out_dir = "out";
    bool write = true;
    bool quiet = false;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    bool all_pass = true;
    std::map<std::string, pipeline::ScenarioOutcome> outcomes; // keyed scenario-nx<k>
};

inline std::string outcome_key(const std::string& scenario, int nx) {
    return scenario + "-nx" + std::to_string(nx);
}

/// Runs the benchmark table: every bands row selected by the options, with
/// per-(scenario, nx) pipelines executed once and artifacts written per run.
/// Pass/fail comes strictly from the bands file.
inline BenchResult run_bench(const BenchOptions& opts) {
    const nlohmann::json bands = embedded_json("bands.json");
    BenchResult res;
    std::set<std::string> wanted;
    for (int t : opts.tests) wanted.insert("test" + std::to_string(t));

    auto outcome_for = [&](const std::string& scenario, int nx) -> pipeline::ScenarioOutcome& {
        const std::string key = outcome_key(scenario, nx);
        auto it = res.outcomes.find(key);
        if (it == res.outcomes.end()) {
            ScenarioConfig cfg = builtin_scenario(scenario, nx);
            cfg.name = key;
            it = res.outcomes.emplace(key, pipeline::run_pipeline(cfg)).first;
            if (opts.write) {
                pipeline::write_artifacts(it->second, opts.out_dir + "/" + key);
                pipeline::emit_plotdata(it->second, opts.out_dir + "/" + key);
            }
        }
        return it->second;
    };
    auto find_row = [&](const std::string& id) -> const BenchRow* {
        for (const auto& r : res.rows)
            if (r.id == id) return &r;
        return nullptr;
    };

    for (const auto& rj : bands.at("rows")) {
        BenchRow row;
        row.id = rj.at("id").get<std::string>();
        row.scenario = rj.at("scenario").get<std::string>();
        row.nx = rj.at("nx").get<int>();
        row.mode = rj.at("mode").get<std::string>();
        row.check = rj.value("check", "");
        if (!wanted.count(row.scenario)) continue;
        if (!opts.nx_filter.empty() &&
            std::find(opts.nx_filter.begin(), opts.nx_filter.end(), row.nx) == opts.nx_filter.end())
            continue;
        if (rj.contains("paper")) {
            row.paper_linf = rj["paper"][0].get<double>();
            row.paper_l2 = rj["paper"][1].get<double>();
        }
        auto& out = outcome_for(row.scenario, row.nx);
        if (row.mode == "steady") {
            if (!out.steady_norms) throw NumericError("scenario has no steady branch: " + row.scenario);
            row.linf = out.steady_norms->first * 100.0;
            row.l2 = out.steady_norms->second * 100.0;
        } else if (row.mode == "noisy") {
            const double level = rj.at("noise_level").get<double>();
            const int n_seeds = rj.at("n_seeds").get<int>();
            std::vector<std::uint64_t> seeds;
            for (int i = 0; i < n_seeds; ++i) seeds.push_back(opts.seed + i);
            const auto study = pipeline::noise_study(out, level, seeds);
            row.linf = study.mean_smoothed.first * 100.0;
            row.l2 = study.mean_smoothed.second * 100.0;
            if (opts.write) {
                nlohmann::json nj;
                nj["level"] = study.level;
                nj["budget"] = study.budget;
                nj["mean_smoothed"] = {study.mean_smoothed.first, study.mean_smoothed.second};
                nj["mean_raw"] = {study.mean_raw.first, study.mean_raw.second};
                for (const auto& t : study.trials)
                    nj["trials"].push_back({{"seed", t.seed},
                                            {"smoothed", {t.smoothed.first, t.smoothed.second}},
                                            {"raw", {t.raw.first, t.raw.second}}});
                auto f = io::open_out(opts.out_dir + "/" + outcome_key(row.scenario, row.nx) +
                                      "/noise_study.json");
                f << nj.dump(2) << '\n';
            }
        } else {
            row.linf = out.norms.first * 100.0;
            row.l2 = out.norms.second * 100.0;
        }

        if (rj.contains("linf")) {
            row.has_band = true;
            row.linf_lo = rj["linf"][0].get<double>();
            row.linf_hi = rj["linf"][1].get<double>();
            row.l2_lo = rj["l2"][0].get<double>();
            row.l2_hi = rj["l2"][1].get<double>();
            row.pass = row.linf >= row.linf_lo && row.linf <= row.linf_hi &&
                       row.l2 >= row.l2_lo && row.l2 <= row.l2_hi;
            char buf[96];
            std::snprintf(buf, sizeof(buf), "band Linf [%g,%g] L2 [%g,%g]",
                          row.linf_lo, row.linf_hi, row.l2_lo, row.l2_hi);
            row.detail = buf;
        } else if (row.check.rfind("decrease:", 0) == 0) {
            const auto* ref = find_row(row.check.substr(9));
            row.pass = ref && row.linf < ref->linf && row.l2 < ref->l2;
            row.detail = "strictly below " + row.check.substr(9);
        } else if (row.check.rfind("ratio:", 0) == 0) {
            std::stringstream ss(row.check.substr(6));
            std::string ref_id, lo_s, hi_s;
            std::getline(ss, ref_id, ':');
            std::getline(ss, lo_s, ':');
            std::getline(ss, hi_s, ':');
            const double lo = std::stod(lo_s), hi = std::stod(hi_s);
            const auto* ref = find_row(ref_id);
            if (ref) {
                const double r1 = ref->linf / row.linf, r2 = ref->l2 / row.l2;
                row.pass = r1 >= lo && r1 <= hi && r2 >= lo && r2 <= hi;
                char buf[96];
                std::snprintf(buf, sizeof(buf), "ratios %.2f, %.2f in [%g,%g] vs %s", r1, r2, lo,
                              hi, ref_id.c_str());
                row.detail = buf;
            }
        }
        res.all_pass = res.all_pass && row.pass;
        res.rows.push_back(row);
    }

    if (opts.write) {
        auto f = io::open_out(opts.out_dir + "/bench_table.csv");
        f << "id,scenario,nx,mode,linf_pct,l2_pct,paper_linf_pct,paper_l2_pct,pass\n";
        for (const auto& r : res.rows)
            f << r.id << ',' << r.scenario << ',' << r.nx << ',' << r.mode << ','
              << io::fmt(r.linf) << ',' << io::fmt(r.l2) << ',' << io::fmt(r.paper_linf) << ','
              << io::fmt(r.paper_l2) << ',' << (r.pass ? "pass" : "FAIL") << '\n';
    }
    return res;
}

/// Deterministic digest of the artifact tree, skipping record.json (it
/// carries wall-clock data by design).
inline std::uint64_t hash_artifacts(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().filename() != "record.json")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& p : files) {
        h = pipeline::fnv1a(fs::relative(p, dir).string(), h);
        std::ifstream f(p, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
        h = pipeline::fnv1a(bytes, h);
    }
    return h;
}

} // namespace bathyrec::bench
