#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "sdnids/cpd/detector.hpp"

namespace sdnids::cpd {

struct CalibrationSettings {
    long n_paths = 200000;
    long n_grid = 10000;
    std::uint64_t seed = 7;
    bool two_sided = true;  // sup |W(t)|/t^gamma; one-sided drops the absolute value
    int threads = 0;        // 0 = hardware concurrency
};

// Monte Carlo quantiles of sup over the grid {i/n_grid, i=1..n_grid} of
// |W(t)| / t^gamma. Each path uses an independent generator derived from
// (seed, path index), so the result does not depend on the thread count.
// All confidences are read off one simulated sample, which makes the
// returned values exactly monotone in the confidence level.
std::vector<CriticalValue> critical_values(double gamma, std::span<const double> confidences,
                                           const CalibrationSettings& settings);

CriticalValue critical_value(double gamma, double confidence, const CalibrationSettings& settings);

/// Text-file cache of computed critical values.
///
/// One record per line: gamma confidence n_paths n_grid seed value,
/// plain decimal, order-insensitive. Only the default two-sided values are
/// cached; one-sided calibrations are always recomputed.
class CriticalValueCache {
public:
    explicit CriticalValueCache(std::filesystem::path file);

    // Returns the cached value when present, otherwise computes, appends to
    // the file and returns it. Thread-safe.
    CriticalValue get_or_compute(double gamma, double confidence,
                                 const CalibrationSettings& settings);

    // Batch form; simulates at most once per gamma for the missing entries.
    std::vector<CriticalValue> get_or_compute(double gamma, std::span<const double> confidences,
                                              const CalibrationSettings& settings);

    std::size_t size() const { return entries_.size(); }
    const std::filesystem::path& file() const { return file_; }

private:
    using Key = std::tuple<double, double, long, long, std::uint64_t>;

    void load();
    void append(const CriticalValue& cv);

    std::filesystem::path file_;
    std::map<Key, CriticalValue> entries_;
    std::mutex mutex_;
};

}  // namespace sdnids::cpd
