#pragma once

#include <filesystem>
#include <optional>

#include "sdnids/exp/scenario.hpp"
#include "sdnids/ident/attacker_id.hpp"
#include "sdnids/pipeline/centralized.hpp"
#include "sdnids/pipeline/distributed.hpp"
#include "sdnids/pipeline/score.hpp"

namespace sdnids::exp {

/// Everything one seeded run produced, before serialization.
struct RunArtifacts {
    std::uint64_t seed = 0;
    sim::AttackKind truth = sim::AttackKind::None;
    int attack_window = -1;
    std::vector<sim::NodeId> attackers;
    pipeline::AttackLabel label;
    bool detected = false;            // trigger at or after the onset
    std::optional<int> delay;
    std::vector<pipeline::AlarmEvent> alarms;        // distributed, first per node
    std::vector<sim::NodeId> excluded_nodes;
    ident::TallyResult id_v1;
    ident::TallyResult id_v2;
    std::vector<pipeline::GroupDetection> groups;
    ident::RegionRanking region;
    sim::MetricSeries series;
    sim::TraceCounters counters;
};

struct RunRecord {
    std::uint64_t seed = 0;
    std::string digest;
    std::filesystem::path dir;        // out/<digest>/<seed>
    RunArtifacts artifacts;
};

// Everything the pipelines need that is derived once per scenario.
struct ScenarioRuntime {
    ScenarioConfig config;
    cpd::CriticalValue overhead_cv;
    cpd::CriticalValue delivery_cv;
    cpd::CriticalValue distributed_cv;
    std::vector<int> group_of;

    static ScenarioRuntime prepare(const ScenarioConfig& cfg, cpd::CriticalValueCache& cache);
};

// One seeded run through simulation, detection, identification and grouping.
RunArtifacts execute_run(const ScenarioRuntime& rt, std::uint64_t seed);

// Batch execution with per-seed output directories:
// out/<digest>/<seed>/{metrics.csv,alarms.csv,declarations.csv,report.json}.
// Seeds run in parallel across `jobs` threads; outputs are deterministic.
std::vector<RunRecord> run_experiment(const ScenarioConfig& cfg,
                                      const std::filesystem::path& out_dir, int jobs,
                                      cpd::CriticalValueCache& cache);

// Aggregates a finished batch into figure-ready tables under
// out/<digest>/: classification.csv, performance.csv, node_detection.csv,
// identification.csv, groups.csv and summary.json.
json write_batch_report(const ScenarioConfig& cfg, std::span<const RunRecord> records,
                        const std::filesystem::path& out_dir);

// --- parameter sweep -------------------------------------------------------

struct SweepConfig {
    ScenarioConfig fdff;  // attack.kind must be fdff
    ScenarioConfig fni;   // attack.kind must be fni
    std::vector<int> m_set = {100, 150, 200};
    std::vector<double> gamma_set = {0.0, 0.15, 0.25, 0.35, 0.45, 0.49};
    std::vector<double> confidence_set = {0.90, 0.95, 0.99};
    std::vector<pipeline::WeightPair> weights = {
        {1.0, 0.0}, {0.8, 0.2}, {0.5, 0.5}, {0.2, 0.8}, {0.0, 1.0}};
    cpd::CalibrationSettings calibration;

    static SweepConfig from_json(const json& j);
};

SweepConfig load_sweep(const std::filesystem::path& file);

// Simulates both training sets, evaluates the grid, and writes
// pds_grid.csv plus best_gamma.csv (rows = weight pairs, columns =
// confidences, one block per metric) under out_dir.
pipeline::SweepResult run_sweep(const SweepConfig& cfg, const std::filesystem::path& out_dir,
                                int jobs, cpd::CriticalValueCache& cache);

// CSV helpers shared by the CLI and tests.
std::string alarms_csv(const RunArtifacts& a);
std::string declarations_csv(const RunArtifacts& a, const ident::TallyResult& result,
                             const sim::Topology& topo);
json run_report_json(const RunArtifacts& a);

// Rebuilds the report-relevant parts of RunArtifacts from a run's
// report.json, so finished batches can be re-aggregated without rerunning.
RunArtifacts artifacts_from_json(const json& j);

// Loads every <seed>/report.json under out/<digest>/ for the scenario.
std::vector<RunRecord> load_batch(const ScenarioConfig& cfg,
                                  const std::filesystem::path& out_dir);

}  // namespace sdnids::exp
