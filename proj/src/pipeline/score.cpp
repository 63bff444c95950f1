#include "sdnids/pipeline/score.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdnids::pipeline {

PerformanceReport score(std::span<const RunResult> runs, int horizon,
                        std::span<const WeightPair> weights) {
    if (horizon < 1) throw std::invalid_argument("score: horizon must be >= 1");
    for (const auto& w : weights)
        if (std::fabs(w.a + w.b - 1.0) > 1e-9)
            throw std::invalid_argument("score: weights must satisfy a + b = 1");

    PerformanceReport rep;
    std::vector<double> delays;
    for (const auto& r : runs)
        if (r.detected && r.delay) delays.push_back(static_cast<double>(*r.delay));
    rep.dr = runs.empty() ? 0.0
                          : static_cast<double>(delays.size()) / static_cast<double>(runs.size());
    if (!delays.empty()) {
        std::sort(delays.begin(), delays.end());
        const std::size_t n = delays.size();
        rep.dtm = n % 2 == 1 ? delays[n / 2] : 0.5 * (delays[n / 2 - 1] + delays[n / 2]);
        rep.s = std::clamp(rep.dtm / static_cast<double>(horizon), 0.0, 1.0);
        rep.dtm_defined = true;
    } else {
        rep.dtm = 0.0;
        rep.s = 1.0;  // worst case, flagged
        rep.dtm_defined = false;
    }
    rep.p_ds.reserve(weights.size());
    for (const auto& w : weights)
        rep.p_ds.push_back({w, w.a * (1.0 - rep.s) + w.b * rep.dr});
    return rep;
}

RunResult evaluate_single_metric(const sim::MetricSeries& series, NetMetric metric,
                                 const cpd::DetectorParams& params, const cpd::CriticalValue& cv,
                                 int attack_window) {
    cpd::Detector det(params, cv);
    const auto values = metric == NetMetric::CtrlOverhead ? series.overhead() : series.delivery();
    for (std::size_t w = 0; w < values.size(); ++w) {
        const auto out = det.ingest(values[w]);
        if (out.kind == cpd::Outcome::Kind::ChangeAt) {
            const int window = static_cast<int>(w);
            if (window < attack_window) return {false, std::nullopt};  // false alarm
            return {true, window - attack_window};
        }
    }
    return {false, std::nullopt};
}

const BestChoice& SweepResult::best_for(NetMetric metric, WeightPair w, double confidence) const {
    for (const auto& b : best)
        if (b.metric == metric && b.weights.a == w.a && b.weights.b == w.b &&
            b.confidence == confidence)
            return b;
    throw std::out_of_range("SweepResult: no such (metric, weights, confidence) cell");
}

SweepResult sweep_parameters(std::span<const LabeledSeries> dataset, std::span<const int> m_set,
                             std::span<const double> gamma_set,
                             std::span<const double> confidence_set,
                             std::span<const WeightPair> weights, int horizon,
                             cpd::CriticalValueCache& cache,
                             const cpd::CalibrationSettings& calibration) {
    SweepResult result;

    for (const NetMetric metric : {NetMetric::CtrlOverhead, NetMetric::DeliveryRate}) {
        const AttackClass truth =
            metric == NetMetric::CtrlOverhead ? AttackClass::FDFF : AttackClass::FNI;
        std::vector<const LabeledSeries*> group;
        for (const auto& ls : dataset)
            if (ls.truth == truth) group.push_back(&ls);

        for (double gamma : gamma_set) {
            const auto cvs = cache.get_or_compute(gamma, confidence_set, calibration);
            for (std::size_t ci = 0; ci < confidence_set.size(); ++ci) {
                for (int m : m_set) {
                    SweepCell cell;
                    cell.metric = metric;
                    cell.m = m;
                    cell.gamma = gamma;
                    cell.confidence = confidence_set[ci];

                    cpd::DetectorParams params;
                    params.learning_window = m;
                    params.gamma = gamma;
                    params.confidence = confidence_set[ci];
                    params.horizon = horizon;

                    std::vector<RunResult> runs;
                    runs.reserve(group.size());
                    for (const auto* ls : group) {
                        const auto len = static_cast<int>(ls->series->windows.size());
                        if (m >= ls->attack_window || len <= ls->attack_window) {
                            cell.skipped = true;
                            break;
                        }
                        runs.push_back(evaluate_single_metric(*ls->series, metric, params,
                                                              cvs[ci], ls->attack_window));
                    }
                    if (!cell.skipped && !runs.empty())
                        cell.perf = score(runs, horizon, weights);
                    else
                        cell.skipped = true;
                    result.cells.push_back(std::move(cell));
                }
            }
        }

        // Argmax per (weight, confidence); ties toward smaller gamma, then m.
        for (const auto& w : weights) {
            for (double conf : confidence_set) {
                BestChoice best;
                best.metric = metric;
                best.weights = w;
                best.confidence = conf;
                best.p_ds = -1.0;
                for (const auto& cell : result.cells) {
                    if (cell.metric != metric || cell.confidence != conf || cell.skipped) continue;
                    double pds = 0.0;
                    for (const auto& [wp, v] : cell.perf.p_ds)
                        if (wp.a == w.a && wp.b == w.b) pds = v;
                    const bool better =
                        pds > best.p_ds + 1e-12 ||
                        (std::fabs(pds - best.p_ds) <= 1e-12 &&
                         (cell.gamma < best.gamma ||
                          (cell.gamma == best.gamma && cell.m < best.m)));
                    if (better) {
                        best.p_ds = pds;
                        best.gamma = cell.gamma;
                        best.m = cell.m;
                    }
                }
                if (best.p_ds >= 0.0) result.best.push_back(best);
            }
        }
    }
    return result;
}

}  // namespace sdnids::pipeline
