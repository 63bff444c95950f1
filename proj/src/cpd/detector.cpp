#include "sdnids/cpd/detector.hpp"

#include <algorithm>
#include <cmath>

#include "sdnids/common/text.hpp"

namespace sdnids::cpd {

int DetectorParams::effective_bandwidth() const {
    if (lrv_bandwidth) return *lrv_bandwidth;
    return static_cast<int>(std::floor(std::cbrt(static_cast<double>(learning_window))));
}

void DetectorParams::validate() const {
    if (learning_window < 2)
        throw std::invalid_argument("learning_window must be >= 2, got " +
                                    std::to_string(learning_window));
    if (!(gamma >= 0.0 && gamma < 0.5))
        throw std::invalid_argument("gamma must lie in [0, 0.5), got " + to_text(gamma));
    if (!(confidence > 0.0 && confidence < 1.0))
        throw std::invalid_argument("confidence must lie in (0, 1), got " + to_text(confidence));
    if (horizon < 1)
        throw std::invalid_argument("horizon must be >= 1, got " + std::to_string(horizon));
    if (lrv_bandwidth && *lrv_bandwidth < 0)
        throw std::invalid_argument("lrv_bandwidth must be >= 0");
}

double threshold_weight(int m, int l, double gamma) {
    if (m < 1) throw std::invalid_argument("threshold_weight: m must be >= 1");
    if (l < 1) throw std::invalid_argument("threshold_weight: l must be >= 1");
    if (!(gamma >= 0.0 && gamma < 0.5))
        throw std::invalid_argument("threshold_weight: gamma must lie in [0, 0.5)");
    const double md = static_cast<double>(m);
    const double ld = static_cast<double>(l);
    return std::sqrt(md) * (1.0 + ld / md) * std::pow(ld / (ld + md), gamma);
}

double long_run_variance(std::span<const double> samples, int bandwidth) {
    const std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("long_run_variance: need at least 2 samples");
    if (bandwidth < 0) throw std::invalid_argument("long_run_variance: bandwidth must be >= 0");

    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(n);

    const int max_lag = std::min<int>(bandwidth, static_cast<int>(n) - 1);
    auto acov = [&](int lag) {
        double s = 0.0;
        for (std::size_t t = static_cast<std::size_t>(lag); t < n; ++t)
            s += (samples[t] - mean) * (samples[t - lag] - mean);
        return s / static_cast<double>(n);
    };

    double omega = acov(0);
    for (int j = 1; j <= max_lag; ++j) {
        const double w = 1.0 - static_cast<double>(j) / (bandwidth + 1.0);
        omega += 2.0 * w * acov(j);
    }
    return std::max(omega, 0.0);
}

Detector::Detector(DetectorParams params, CriticalValue critical)
    : params_(params), critical_(critical) {
    params_.validate();
    if (!(critical_.value > 0.0))
        throw std::invalid_argument("Detector: critical value must be positive");
    learn_buf_.reserve(static_cast<std::size_t>(params_.learning_window));
    monitor_prefix_.reserve(static_cast<std::size_t>(params_.horizon) + 1);
    monitor_prefix_.push_back(0.0);
}

Outcome Detector::ingest(double x) {
    if (phase_ == Phase::Stopped)
        throw std::logic_error("Detector::ingest called after the detector stopped");

    if (phase_ == Phase::Learning) {
        learn_buf_.push_back(x);
        ++learned_;
        if (learned_ == params_.learning_window) {
            double mean = 0.0;
            for (double v : learn_buf_) mean += v;
            baseline_mean_ = mean / static_cast<double>(learned_);
            lrv_ = long_run_variance(learn_buf_, params_.effective_bandwidth());
            learn_buf_.clear();
            learn_buf_.shrink_to_fit();
            if (lrv_ <= 0.0) {
                phase_ = Phase::Stopped;
                throw DegenerateVarianceError(
                    "learning window has zero long-run variance; monitoring refused");
            }
            sqrt_lrv_ = std::sqrt(lrv_);
            phase_ = Phase::Monitoring;
        }
        return Outcome{Outcome::Kind::Learning, learned_, {}};
    }

    // Monitoring.
    ++monitor_count_;
    monitor_prefix_.push_back(monitor_prefix_.back() + x);
    const int l = monitor_count_;
    const auto [shift, ts] = cusum(l);
    const double stat = std::fabs(ts);
    const double thr = threshold_at(l);

    if (stat >= thr) {
        phase_ = Phase::Stopped;
        Detection det;
        det.stop_l = l;
        det.cp_estimate = static_cast<long>(params_.learning_window) + l;
        det.statistic = stat;
        det.threshold = thr;
        det.shift_estimate = shift;
        return Outcome{Outcome::Kind::ChangeAt, l, det};
    }

    if (l >= params_.horizon) {
        // Period exhausted: restart monitoring with a fresh window, keeping
        // the learned baseline.
        monitor_count_ = 0;
        monitor_prefix_.assign(1, 0.0);
        return Outcome{Outcome::Kind::HorizonExpired, l, {}};
    }
    return Outcome{Outcome::Kind::NoChange, l, {}};
}

std::pair<double, double> Detector::cusum(int l) const {
    if (phase_ == Phase::Learning)
        throw std::logic_error("cusum: detector is still learning");
    if (l < 1 || l > monitor_count_)
        throw std::invalid_argument("cusum: l out of range");
    if (!(lrv_ > 0.0))
        throw DegenerateVarianceError("cusum: long-run variance is zero");
    const double mon_mean = monitor_prefix_[static_cast<std::size_t>(l)] / l;
    const double shift = mon_mean - baseline_mean_;
    const double ts = static_cast<double>(l) * shift / sqrt_lrv_;
    return {shift, ts};
}

double Detector::threshold_at(int l) const {
    return critical_.value * threshold_weight(params_.learning_window, l, params_.gamma);
}

}  // namespace sdnids::cpd
