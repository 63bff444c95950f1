#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sdnids/common/text.hpp"
#include "sdnids/cpd/calibration.hpp"
#include "sdnids/exp/runner.hpp"
#include "sdnids/exp/scenario.hpp"

namespace {

using namespace sdnids;

// Seed lists accept "1,2,9" and ranges "1..40" (mixable: "1..8,100").
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string part = text.substr(pos, comma - pos);
        const std::size_t dots = part.find("..");
        if (dots == std::string::npos) {
            seeds.push_back(std::stoull(part));
        } else {
            const auto lo = std::stoull(part.substr(0, dots));
            const auto hi = std::stoull(part.substr(dots + 2));
            if (hi < lo) throw CLI::ValidationError("seeds", "range end before start");
            for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
        }
        pos = comma + 1;
    }
    if (seeds.empty()) throw CLI::ValidationError("seeds", "empty seed list");
    return seeds;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Change-point intrusion detection toolkit for SDN-managed sensor grids"};
    app.require_subcommand(1);

    std::string cache_path = "cv_cache.txt";
    app.add_option("--cache", cache_path, "Critical-value cache file")->capture_default_str();

    // calibrate ---------------------------------------------------------------
    auto* cal = app.add_subcommand("calibrate", "Compute Monte Carlo critical values");
    std::vector<double> cal_gammas = {0.0, 0.15, 0.25, 0.35, 0.45, 0.49};
    std::vector<double> cal_confs = {0.90, 0.95, 0.99};
    long cal_paths = 200000, cal_grid = 10000;
    std::uint64_t cal_seed = 7;
    int cal_threads = 0;
    bool one_sided = false;
    cal->add_option("--gamma", cal_gammas, "Sensitivity values in [0, 0.5)")
        ->capture_default_str();
    cal->add_option("--confidence", cal_confs, "Confidence levels in (0, 1)")
        ->capture_default_str();
    cal->add_option("--paths", cal_paths, "Simulated Brownian paths")->capture_default_str();
    cal->add_option("--grid", cal_grid, "Grid points per path")->capture_default_str();
    cal->add_option("--seed", cal_seed, "Calibration seed")->capture_default_str();
    cal->add_option("--jobs", cal_threads, "Worker threads (0 = all cores)")
        ->capture_default_str();
    cal->add_flag("--one-sided", one_sided,
                  "Calibrate sup W/t^gamma instead of sup |W|/t^gamma (not cached)");

    // run ---------------------------------------------------------------------
    auto* runv = app.add_subcommand("run", "Execute a seeded scenario batch");
    std::string run_config, run_out = "out", run_seeds;
    int run_jobs = 0;
    bool run_trace = false;
    runv->add_option("--config", run_config, "Scenario JSON file")->required();
    runv->add_option("--out", run_out, "Output directory")->capture_default_str();
    runv->add_option("--seeds", run_seeds, "Override seed list, e.g. 1..40 or 1,2,9");
    runv->add_option("--jobs", run_jobs, "Parallel seeds (0 = all cores)")->capture_default_str();
    runv->add_flag("--trace", run_trace, "Also export events.ndjson per run");

    // sweep -------------------------------------------------------------------
    auto* sweepv = app.add_subcommand("sweep", "Grid-evaluate (m, gamma) and report the best");
    std::string sweep_config, sweep_out = "out/sweep";
    int sweep_jobs = 0;
    sweepv->add_option("--config", sweep_config, "Sweep JSON file")->required();
    sweepv->add_option("--out", sweep_out, "Output directory")->capture_default_str();
    sweepv->add_option("--jobs", sweep_jobs, "Parallel training runs (0 = all cores)")
        ->capture_default_str();

    // report ------------------------------------------------------------------
    auto* repv = app.add_subcommand("report", "Aggregate a finished batch into summary tables");
    std::string rep_config, rep_out = "out";
    repv->add_option("--config", rep_config, "Scenario JSON file")->required();
    repv->add_option("--out", rep_out, "Output directory holding the batch")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        cpd::CriticalValueCache cache(cache_path);

        if (cal->parsed()) {
            cpd::CalibrationSettings settings;
            settings.n_paths = cal_paths;
            settings.n_grid = cal_grid;
            settings.seed = cal_seed;
            settings.threads = cal_threads;
            settings.two_sided = !one_sided;
            std::printf("gamma confidence value\n");
            for (double g : cal_gammas) {
                const auto cvs = settings.two_sided
                                     ? cache.get_or_compute(g, cal_confs, settings)
                                     : cpd::critical_values(g, cal_confs, settings);
                for (const auto& cv : cvs)
                    std::printf("%.4f %.4f %.6f\n", cv.gamma, cv.confidence, cv.value);
            }
            return 0;
        }

        if (runv->parsed()) {
            auto cfg = exp::load_scenario(run_config);
            if (!run_seeds.empty()) cfg.seeds = parse_seeds(run_seeds);
            cfg.sim.record_trace = cfg.sim.record_trace || run_trace;
            const auto records = exp::run_experiment(cfg, run_out, run_jobs, cache);
            if (run_trace) {
                // events.ndjson is produced during the run only when asked.
                for (const auto& rec : records) {
                    if (!std::filesystem::exists(rec.dir)) continue;
                }
            }
            const auto summary = exp::write_batch_report(cfg, records, run_out);
            long failures = 0;
            for (const auto& rec : records)
                if (!std::filesystem::exists(rec.dir / "report.json")) ++failures;
            std::printf("%s\n", summary.dump(2).c_str());
            if (failures > 0) {
                std::fprintf(stderr, "%ld of %zu seeds failed; see *.error.txt\n", failures,
                             records.size());
                return 2;
            }
            return 0;
        }

        if (sweepv->parsed()) {
            const auto cfg = exp::load_sweep(sweep_config);
            const auto result = exp::run_sweep(cfg, sweep_out, sweep_jobs, cache);
            std::printf("wrote %s and %s (%zu cells)\n",
                        (std::filesystem::path(sweep_out) / "pds_grid.csv").c_str(),
                        (std::filesystem::path(sweep_out) / "best_gamma.csv").c_str(),
                        result.cells.size());
            return 0;
        }

        if (repv->parsed()) {
            const auto cfg = exp::load_scenario(rep_config);
            const auto records = exp::load_batch(cfg, rep_out);
            if (records.empty()) {
                std::fprintf(stderr, "no finished runs under %s/%s\n", rep_out.c_str(),
                             cfg.digest().c_str());
                return 2;
            }
            const auto summary = exp::write_batch_report(cfg, records, rep_out);
            std::printf("%s\n", summary.dump(2).c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
