#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "sdnids/common/rng.hpp"
#include "sdnids/cpd/calibration.hpp"
#include "sdnids/cpd/detector.hpp"

using namespace sdnids;
using namespace sdnids::cpd;

namespace {

// --- Independent oracle: distribution of sup |W(t)| over [0,1] -------------
//
// P(sup |W| <= x) = (4/pi) * sum_k (-1)^k / (2k+1) * exp(-(2k+1)^2 pi^2 / (8 x^2))
// (reflection principle). Quantiles are obtained by bisection.

double sup_abs_bm_cdf(double x) {
    if (x <= 0.0) return 0.0;
    double sum = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double a = (2.0 * k + 1.0);
        const double term = ((k % 2 == 0) ? 1.0 : -1.0) / a *
                            std::exp(-a * a * M_PI * M_PI / (8.0 * x * x));
        sum += term;
        if (k > 3 && std::fabs(term) < 1e-18) break;
    }
    return 4.0 / M_PI * sum;
}

double sup_abs_bm_quantile(double p) {
    double lo = 1e-3, hi = 20.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (sup_abs_bm_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> gaussian_series(std::uint64_t seed, int n, double mean = 0.0,
                                    double sd = 1.0) {
    Rng rng(seed);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& x : out) x = mean + sd * rng.normal();
    return out;
}

CriticalValue unit_cv(double gamma, double confidence) {
    CalibrationSettings s;
    s.n_paths = 20000;
    s.n_grid = 1000;
    s.seed = 11;
    return critical_value(gamma, confidence, s);
}

}  // namespace

TEST_CASE("threshold weight: known values") {
    CHECK(threshold_weight(100, 100, 0.0) == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(threshold_weight(100, 1, 0.0) == doctest::Approx(10.1).epsilon(1e-12));
    // Independent evaluation: sqrt(400) * (1 + 400/400) * (400/800)^0.25.
    const double expected = 20.0L * 2.0L * std::pow(0.5L, 0.25L);
    CHECK(expected == doctest::Approx(33.6358566).epsilon(1e-7));
    CHECK(threshold_weight(400, 400, 0.25) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("threshold weight: domain checks") {
    CHECK_THROWS_AS(threshold_weight(100, 0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(threshold_weight(100, 1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(threshold_weight(100, 1, -0.01), std::invalid_argument);
}

TEST_CASE("threshold weight: positive and strictly increasing in l") {
    for (double gamma : {0.0, 0.15, 0.25, 0.45, 0.49}) {
        for (int m : {10, 100, 400}) {
            double prev = 0.0;
            for (int l = 1; l <= 200; ++l) {
                const double w = threshold_weight(m, l, gamma);
                CHECK(w > 0.0);
                CHECK(w > prev);
                prev = w;
            }
        }
    }
}

TEST_CASE("long-run variance: constant series is zero") {
    std::vector<double> xs(50, 5.0);
    for (int bw : {0, 1, 3, 10}) CHECK(long_run_variance(xs, bw) == doctest::Approx(0.0));
}

TEST_CASE("long-run variance: bandwidth 0 equals biased sample variance") {
    const auto xs = gaussian_series(42, 500, 1.0, 2.0);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    CHECK(long_run_variance(xs, 0) == doctest::Approx(var).epsilon(1e-12));
}

TEST_CASE("long-run variance: AR(1) closed form") {
    // x_t = 0.5 x_{t-1} + u_t with unit-variance noise has long-run variance
    // 1 / (1 - 0.5)^2 = 4.
    const int m = 100000;
    Rng rng(7);
    std::vector<double> xs(static_cast<std::size_t>(m));
    double x = 0.0;
    for (int t = 0; t < 1000; ++t) x = 0.5 * x + rng.normal();  // burn-in
    for (auto& v : xs) {
        x = 0.5 * x + rng.normal();
        v = x;
    }
    const int bw = static_cast<int>(std::floor(std::cbrt(static_cast<double>(m))));
    const double est = long_run_variance(xs, bw);
    CHECK(est == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("long-run variance: rejects tiny inputs") {
    std::vector<double> none;
    std::vector<double> one{1.0};
    CHECK_THROWS_AS(long_run_variance(none, 1), std::invalid_argument);
    CHECK_THROWS_AS(long_run_variance(one, 1), std::invalid_argument);
}

TEST_CASE("detector params validation") {
    DetectorParams p;
    p.learning_window = 1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.learning_window = 10;
    p.gamma = 0.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.gamma = 0.0;
    p.confidence = 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.confidence = 0.95;
    p.horizon = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.horizon = 10;
    CHECK_NOTHROW(p.validate());
    CHECK(DetectorParams{.learning_window = 200}.effective_bandwidth() == 5);
}

namespace {

Detector learn_gaussian(DetectorParams p, CriticalValue cv, std::uint64_t seed) {
    Detector det(p, cv);
    const auto xs = gaussian_series(seed, p.learning_window);
    for (double x : xs) det.ingest(x);
    return det;
}

}  // namespace

TEST_CASE("cusum statistic: hand-checked values") {
    DetectorParams p;
    p.learning_window = 4;
    p.horizon = 100;
    CriticalValue cv{.gamma = 0.0, .confidence = 0.95, .value = 2.24};

    SUBCASE("zero monitoring samples under zero baseline give zero statistic") {
        Detector det(p, cv);
        for (double x : {0.0, 1.0, -1.0, 0.0}) det.ingest(x);  // baseline mean 0
        det.ingest(0.0);
        det.ingest(0.0);
        const auto [e, ts] = cusum_statistic(det, 2);
        CHECK(e == doctest::Approx(0.0));
        CHECK(ts == doctest::Approx(0.0));
    }

    SUBCASE("constant shift: l * shift / sqrt(lrv)") {
        // Baseline {1,2,1,2}: mean 1.5. Bandwidth 0 -> lrv = 0.25.
        p.lrv_bandwidth = 0;
        Detector det(p, cv);
        for (double x : {1.0, 2.0, 1.0, 2.0}) det.ingest(x);
        CHECK(det.baseline_mean() == doctest::Approx(1.5));
        CHECK(det.lrv() == doctest::Approx(0.25));
        // Monitoring {2,3,4}: mean 3, shift 1.5, TS = 3 * 1.5 / 0.5 = 9.
        for (double x : {2.0, 3.0, 4.0}) det.ingest(x);
        const auto [e, ts] = det.cusum(3);
        CHECK(e == doctest::Approx(1.5));
        CHECK(ts == doctest::Approx(9.0));
        // Same arithmetic with lrv forced to 4 via the documented formula:
        // TS = l * E / sqrt(lrv) = 3 * 1.5 / 2 = 2.25.
        CHECK(3.0 * e / std::sqrt(4.0) == doctest::Approx(2.25));
    }

    SUBCASE("all-equal monitoring mean of +2 with unit lrv") {
        // Baseline alternating +1/-1: mean 0, lrv (bw 0) = 1.
        p.lrv_bandwidth = 0;
        Detector det(p, cv);
        for (double x : {1.0, -1.0, 1.0, -1.0}) det.ingest(x);
        CHECK(det.lrv() == doctest::Approx(1.0));
        for (int i = 0; i < 5; ++i) det.ingest(2.0);
        const auto [e, ts] = det.cusum(5);
        CHECK(e == doctest::Approx(2.0));
        CHECK(ts == doctest::Approx(10.0));
    }
}

TEST_CASE("constant learning window refuses to monitor") {
    DetectorParams p;
    p.learning_window = 10;
    CriticalValue cv{.gamma = 0.0, .confidence = 0.95, .value = 2.24};
    Detector det(p, cv);
    for (int i = 0; i < 9; ++i) CHECK(det.ingest(3.5).kind == Outcome::Kind::Learning);
    CHECK_THROWS_AS(det.ingest(3.5), DegenerateVarianceError);
    CHECK(det.phase() == Phase::Stopped);
}

TEST_CASE("ingest: no trigger path walks NoChange then HorizonExpired") {
    DetectorParams p;
    p.learning_window = 50;
    p.horizon = 20;
    const auto cv = unit_cv(0.0, 0.95);
    Detector det(p, cv);
    const auto learn = gaussian_series(3, p.learning_window);
    for (double x : learn) CHECK(det.ingest(x).kind == Outcome::Kind::Learning);
    // Feed the exact baseline mean: statistic is identically zero and can
    // never cross the positive threshold.
    const double mu = det.baseline_mean();
    for (int period = 0; period < 3; ++period) {
        for (int l = 1; l < p.horizon; ++l) {
            const auto out = det.ingest(mu);
            CHECK(out.kind == Outcome::Kind::NoChange);
            CHECK(out.l == l);
        }
        const auto out = det.ingest(mu);
        CHECK(out.kind == Outcome::Kind::HorizonExpired);
        CHECK(out.l == p.horizon);
        CHECK(det.monitor_count() == 0);  // fresh period
    }
    CHECK(det.phase() == Phase::Monitoring);
}

TEST_CASE("ingest: shift is detected, stopping identities hold") {
    DetectorParams p;
    p.learning_window = 200;
    p.horizon = 60;
    const auto cv = unit_cv(0.0, 0.95);
    auto det = learn_gaussian(p, cv, 12345);
    CHECK(det.phase() == Phase::Monitoring);

    Rng rng(999);
    Outcome out;
    int fed = 0;
    while (true) {
        out = det.ingest(5.0 + rng.normal());
        ++fed;
        REQUIRE(fed < 100);
        if (out.kind == Outcome::Kind::ChangeAt) break;
        REQUIRE(out.kind == Outcome::Kind::NoChange);
    }
    const Detection& d = out.detection;
    CHECK(d.stop_l == fed);
    CHECK(d.cp_estimate == p.learning_window + d.stop_l);        // exact identity
    CHECK(d.statistic >= d.threshold);                           // at the stop
    for (int l = 1; l < d.stop_l; ++l) {                         // never before
        const auto [e, ts] = det.cusum(l);
        (void)e;
        CHECK(std::fabs(ts) < det.threshold_at(l));
    }
    CHECK(d.stop_l <= 12);  // +5 sigma shift is caught almost immediately
    CHECK(det.phase() == Phase::Stopped);
    CHECK_THROWS_AS(det.ingest(0.0), std::logic_error);
}

TEST_CASE("ingest: identical inputs give identical outcome sequences") {
    DetectorParams p;
    p.learning_window = 80;
    p.horizon = 30;
    const auto cv = unit_cv(0.25, 0.9);
    const auto xs = gaussian_series(21, 300);
    auto run = [&]() {
        Detector det(p, cv);
        std::vector<int> kinds;
        for (double x : xs) {
            if (det.phase() == Phase::Stopped) break;
            kinds.push_back(static_cast<int>(det.ingest(x).kind));
        }
        return kinds;
    };
    CHECK(run() == run());
}

TEST_CASE("scale equivariance: positive scaling leaves decisions unchanged") {
    DetectorParams p;
    p.learning_window = 100;
    p.horizon = 40;
    const auto cv = unit_cv(0.15, 0.9);
    auto xs = gaussian_series(77, 400, 0.5, 1.3);
    for (std::size_t i = 250; i < xs.size(); ++i) xs[i] += 2.0;  // mid-stream shift

    auto decisions = [&](double scale) {
        Detector det(p, cv);
        std::vector<int> kinds;
        for (double x : xs) {
            if (det.phase() == Phase::Stopped) break;
            kinds.push_back(static_cast<int>(det.ingest(scale * x).kind));
        }
        return kinds;
    };
    // Power-of-two scaling is exact in binary floating point, so the decision
    // sequence must be bit-identical.
    CHECK(decisions(1.0) == decisions(4.0));
    CHECK(decisions(1.0) == decisions(0.25));
}

TEST_CASE("horizon restart keeps the learned baseline") {
    DetectorParams p;
    p.learning_window = 60;
    p.horizon = 5;
    const auto cv = unit_cv(0.0, 0.99);
    auto det = learn_gaussian(p, cv, 5);
    const double mean = det.baseline_mean();
    const double lrv = det.lrv();
    for (int i = 0; i < 3 * p.horizon; ++i) det.ingest(mean);
    CHECK(det.baseline_mean() == mean);
    CHECK(det.lrv() == lrv);
}

TEST_CASE("critical values: monotone in confidence and deterministic") {
    CalibrationSettings s;
    s.n_paths = 20000;
    s.n_grid = 500;
    s.seed = 3;
    const double confs[] = {0.90, 0.95, 0.99};
    for (double gamma : {0.0, 0.45}) {
        const auto cvs = critical_values(gamma, confs, s);
        CHECK(cvs[0].value < cvs[1].value);
        CHECK(cvs[1].value < cvs[2].value);
        for (const auto& cv : cvs) CHECK(cv.value > 0.0);
        // Same settings, separate call: bit-identical.
        const auto again = critical_value(gamma, 0.95, s);
        CHECK(again.value == cvs[1].value);
    }
}

TEST_CASE("critical values: gamma 0 matches the reflection-principle quantile") {
    const double oracle = sup_abs_bm_quantile(0.95);
    CHECK(oracle == doctest::Approx(2.2414).epsilon(2e-4));  // series oracle sanity
    CalibrationSettings s;
    s.n_paths = 40000;
    s.n_grid = 4000;
    s.seed = 123;
    const auto cv = critical_value(0.0, 0.95, s);
    CHECK(cv.value == doctest::Approx(oracle).epsilon(0.03));
}

TEST_CASE("critical values: agreement with an independently coded simulation") {
    // Second implementation: different generator (std::mt19937 + the library
    // normal_distribution), different seed, plain loop.
    const double gamma = 0.45;
    const long n_paths = 30000, n_grid = 2000;
    std::mt19937 gen(987654321u);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> sups;
    sups.reserve(n_paths);
    const double sd = std::sqrt(1.0 / static_cast<double>(n_grid));
    for (long p = 0; p < n_paths; ++p) {
        double w = 0.0, best = 0.0;
        for (long i = 1; i <= n_grid; ++i) {
            w += sd * nd(gen);
            const double t = static_cast<double>(i) / static_cast<double>(n_grid);
            const double v = std::fabs(w) / std::pow(t, gamma);
            if (v > best) best = v;
        }
        sups.push_back(best);
    }
    std::sort(sups.begin(), sups.end());
    const double reference = sups[static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(n_paths))) - 1];

    CalibrationSettings s;
    s.n_paths = n_paths;
    s.n_grid = n_grid;
    s.seed = 55;
    const auto cv = critical_value(gamma, 0.95, s);
    CHECK(cv.value == doctest::Approx(reference).epsilon(0.02));
}

TEST_CASE("critical values: domain checks") {
    CalibrationSettings s;
    s.n_paths = 10;
    s.n_grid = 10;
    CHECK_THROWS_AS(critical_value(0.0, 0.0, s), std::invalid_argument);
    CHECK_THROWS_AS(critical_value(0.0, 1.0, s), std::invalid_argument);
    CHECK_THROWS_AS(critical_value(0.5, 0.9, s), std::invalid_argument);
    CHECK_THROWS_AS(critical_value(-0.1, 0.9, s), std::invalid_argument);
}

TEST_CASE("critical-value cache: computes once, reloads from disk") {
    const auto path = std::filesystem::temp_directory_path() / "sdnids_cv_cache_test.txt";
    std::filesystem::remove(path);
    CalibrationSettings s;
    s.n_paths = 5000;
    s.n_grid = 200;
    s.seed = 9;
    {
        CriticalValueCache cache(path);
        const auto a = cache.get_or_compute(0.25, 0.95, s);
        const auto b = cache.get_or_compute(0.25, 0.95, s);
        CHECK(a.value == b.value);
        CHECK(cache.size() == 1);
    }
    {
        // Fresh instance parses the file back.
        CriticalValueCache cache(path);
        CHECK(cache.size() == 1);
        const auto c = cache.get_or_compute(0.25, 0.95, s);
        const auto d = critical_value(0.25, 0.95, s);
        CHECK(c.value == d.value);
        // File still has exactly one record (no recompute/append).
        std::ifstream in(path);
        int lines = 0;
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) ++lines;
        CHECK(lines == 1);
    }
    std::filesystem::remove(path);
}

TEST_CASE("critical-value cache: order-insensitive reload") {
    const auto path = std::filesystem::temp_directory_path() / "sdnids_cv_cache_order.txt";
    {
        std::ofstream out(path);
        out << "0.45 0.99 100 50 1 3.5\n";
        out << "0 0.9 100 50 1 1.9\n";
    }
    CriticalValueCache cache(path);
    CHECK(cache.size() == 2);
    CalibrationSettings s;
    s.n_paths = 100;
    s.n_grid = 50;
    s.seed = 1;
    CHECK(cache.get_or_compute(0.0, 0.9, s).value == doctest::Approx(1.9));
    CHECK(cache.get_or_compute(0.45, 0.99, s).value == doctest::Approx(3.5));
    std::filesystem::remove(path);
}

TEST_CASE("one-sided calibration is smaller than two-sided") {
    CalibrationSettings two;
    two.n_paths = 20000;
    two.n_grid = 500;
    two.seed = 31;
    CalibrationSettings one = two;
    one.two_sided = false;
    const auto cv2 = critical_value(0.0, 0.95, two);
    const auto cv1 = critical_value(0.0, 0.95, one);
    CHECK(cv1.value < cv2.value);
    CHECK(cv1.value > 0.0);
}
