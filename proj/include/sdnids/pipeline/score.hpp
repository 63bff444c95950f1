#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sdnids/cpd/calibration.hpp"
#include "sdnids/pipeline/centralized.hpp"

namespace sdnids::pipeline {

struct WeightPair {
    double a = 0.0;  // weight of detection speed, 1 - S
    double b = 1.0;  // weight of detection rate, DR
};

struct RunResult {
    bool detected = false;
    std::optional<int> delay;  // samples between onset and the trigger
};

/// Detection-score summary of a batch of runs.
///
/// dr = detected / total; dtm = median delay over detected runs;
/// s = dtm / horizon; p_ds(a, b) = a (1 - s) + b dr. With zero detections
/// the median is undefined and s is pinned at the worst case 1, flagged via
/// dtm_defined = false.
struct PerformanceReport {
    double dr = 0.0;
    double dtm = 0.0;
    double s = 1.0;
    bool dtm_defined = false;
    std::vector<std::pair<WeightPair, double>> p_ds;
};

PerformanceReport score(std::span<const RunResult> runs, int horizon,
                        std::span<const WeightPair> weights);

/// One labeled input series for the parameter sweep.
struct LabeledSeries {
    const sim::MetricSeries* series = nullptr;
    AttackClass truth = AttackClass::NoAttack;
    int attack_window = 0;  // ground-truth onset sample
};

struct SweepCell {
    NetMetric metric{};
    int m = 0;
    double gamma = 0.0;
    double confidence = 0.0;
    bool skipped = false;  // series too short for m + monitoring
    PerformanceReport perf;
};

struct BestChoice {
    NetMetric metric{};
    WeightPair weights{};
    double confidence = 0.0;
    int m = 0;
    double gamma = 0.0;
    double p_ds = 0.0;
};

struct SweepResult {
    std::vector<SweepCell> cells;  // full grid, both metrics
    std::vector<BestChoice> best;  // argmax per (metric, weight, confidence)

    const BestChoice& best_for(NetMetric metric, WeightPair w, double confidence) const;
};

/// Exhaustive grid evaluation of P_DS.
///
/// The overhead detector is scored on FDFF-labeled series and the delivery
/// detector on FNI-labeled series, mirroring the per-metric/per-attack
/// optimization. A run counts as detected only when the trigger lands at or
/// after the true onset; earlier triggers are false alarms and the run is a
/// miss. Argmax ties resolve toward smaller gamma, then smaller m.
SweepResult sweep_parameters(std::span<const LabeledSeries> dataset, std::span<const int> m_set,
                             std::span<const double> gamma_set,
                             std::span<const double> confidence_set,
                             std::span<const WeightPair> weights, int horizon,
                             cpd::CriticalValueCache& cache,
                             const cpd::CalibrationSettings& calibration);

// Single-metric evaluation used by sweep cells and validation reporting:
// runs one detector over the series and reports (detected, delay).
RunResult evaluate_single_metric(const sim::MetricSeries& series, NetMetric metric,
                                 const cpd::DetectorParams& params,
                                 const cpd::CriticalValue& cv, int attack_window);

}  // namespace sdnids::pipeline
