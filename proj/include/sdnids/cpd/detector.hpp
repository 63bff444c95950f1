#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace sdnids::cpd {

// Raised when the learning window has zero long-run variance (a constant
// series carries no calibration information, so monitoring is refused).
class DegenerateVarianceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration of one sequential mean-change detector.
///
/// The detector learns the baseline mean and long-run variance from the
/// first `learning_window` samples, then monitors each subsequent sample.
/// `gamma` trades detection speed against sensitivity to late changes;
/// `confidence` c bounds the asymptotic false-alarm probability by 1 - c.
struct DetectorParams {
    int learning_window = 200;              // m, number of baseline samples
    double gamma = 0.0;                     // in [0, 0.5)
    double confidence = 0.95;               // in (0, 1)
    int horizon = 60;                       // monitoring samples per period
    std::optional<int> lrv_bandwidth;       // Bartlett bandwidth; default floor(m^(1/3))

    int effective_bandwidth() const;
    void validate() const;                  // throws std::invalid_argument
};

/// A Monte-Carlo-calibrated critical value: the `confidence` quantile of
/// sup over t in (0,1] of |W(t)| / t^gamma for standard Brownian motion W.
struct CriticalValue {
    double gamma = 0.0;
    double confidence = 0.0;
    double value = 0.0;
    long n_paths = 0;
    long n_grid = 0;
    std::uint64_t seed = 0;
};

// Threshold weight  sqrt(m) * (1 + l/m) * (l / (l + m))^gamma.
// Strictly positive and strictly increasing in l; rejects l < 1 and
// gamma outside [0, 0.5).
double threshold_weight(int m, int l, double gamma);

// Bartlett-kernel (Newey-West) long-run variance:
//   acov(0) + 2 * sum_{j=1..bw} (1 - j/(bw+1)) * acov(j)
// with biased (1/n) autocovariances, clamped at 0 from below.
// Rejects fewer than two samples.
double long_run_variance(std::span<const double> samples, int bandwidth);

/// Result of a detected mean change.
struct Detection {
    int stop_l = 0;               // monitoring sample index at the trigger
    long cp_estimate = 0;         // learning_window + stop_l
    double statistic = 0.0;       // |TS| at the trigger
    double threshold = 0.0;       // critical value * weight at the trigger
    double shift_estimate = 0.0;  // monitoring mean minus baseline mean
};

enum class Phase { Learning, Monitoring, Stopped };

/// Per-sample result of Detector::ingest.
struct Outcome {
    enum class Kind { Learning, NoChange, ChangeAt, HorizonExpired };
    Kind kind = Kind::Learning;
    int l = 0;              // samples learned so far, or current monitoring l
    Detection detection{};  // populated when kind == ChangeAt
};

/// Streaming CUSUM detector for a change in the mean of a univariate series.
///
/// Drive it with ingest() one sample at a time. The first m samples learn the
/// baseline; afterwards each sample l is scored with
///   TS = l * (mean(monitoring) - mean(baseline)) / sqrt(lrv)
/// and a change is declared when |TS| >= cv * weight(m, l). If a monitoring
/// period reaches `horizon` samples without a trigger the window resets and a
/// fresh period begins; the learned baseline is kept.
class Detector {
public:
    Detector(DetectorParams params, CriticalValue critical);

    // Throws std::logic_error once stopped and DegenerateVarianceError when
    // the learning window turns out to be constant.
    Outcome ingest(double x);

    // Monitoring statistic at sample l of the current period, 1 <= l <=
    // monitor_count(). Returns (E, TS).
    std::pair<double, double> cusum(int l) const;

    // F(m, l) = critical value * weight(m, l).
    double threshold_at(int l) const;

    Phase phase() const { return phase_; }
    int learned_count() const { return learned_; }
    int monitor_count() const { return monitor_count_; }
    double baseline_mean() const { return baseline_mean_; }
    double lrv() const { return lrv_; }
    const DetectorParams& params() const { return params_; }
    const CriticalValue& critical() const { return critical_; }

private:
    DetectorParams params_;
    CriticalValue critical_;
    Phase phase_ = Phase::Learning;
    int learned_ = 0;
    std::vector<double> learn_buf_;
    double baseline_mean_ = 0.0;
    double lrv_ = 0.0;
    double sqrt_lrv_ = 0.0;
    int monitor_count_ = 0;
    std::vector<double> monitor_prefix_;  // prefix sums of monitoring samples
};

// Free-function views of the detector internals, matching the operation
// granularity used by the pipelines.
inline std::pair<double, double> cusum_statistic(const Detector& d, int l) { return d.cusum(l); }

}  // namespace sdnids::cpd
