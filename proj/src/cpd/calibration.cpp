#include "sdnids/cpd/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sdnids/common/rng.hpp"
#include "sdnids/common/text.hpp"

namespace sdnids::cpd {

namespace {

// Supremum of the weighted Brownian functional along one discretized path.
double path_supremum(Rng& rng, long n_grid, double step_sd,
                     const std::vector<double>& inv_tpow, bool two_sided) {
    double w = 0.0;
    double sup = 0.0;
    for (long i = 0; i < n_grid; ++i) {
        w += step_sd * rng.normal();
        const double v = (two_sided ? std::fabs(w) : w) * inv_tpow[static_cast<std::size_t>(i)];
        if (v > sup) sup = v;
    }
    return sup;
}

std::vector<double> simulate_suprema(double gamma, const CalibrationSettings& s) {
    if (!(gamma >= 0.0 && gamma < 0.5))
        throw std::invalid_argument("critical_values: gamma must lie in [0, 0.5)");
    if (s.n_paths < 1 || s.n_grid < 1)
        throw std::invalid_argument("critical_values: n_paths and n_grid must be positive");

    const double step_sd = std::sqrt(1.0 / static_cast<double>(s.n_grid));
    std::vector<double> inv_tpow(static_cast<std::size_t>(s.n_grid));
    for (long i = 0; i < s.n_grid; ++i) {
        const double t = static_cast<double>(i + 1) / static_cast<double>(s.n_grid);
        inv_tpow[static_cast<std::size_t>(i)] = gamma == 0.0 ? 1.0 : std::pow(t, -gamma);
    }

    std::vector<double> sups(static_cast<std::size_t>(s.n_paths));
    unsigned hw = std::thread::hardware_concurrency();
    const int n_threads = s.threads > 0 ? s.threads : static_cast<int>(hw ? hw : 1);

    auto worker = [&](long begin, long end) {
        for (long p = begin; p < end; ++p) {
            Rng rng(mix_seed(s.seed, static_cast<std::uint64_t>(p)));
            sups[static_cast<std::size_t>(p)] =
                path_supremum(rng, s.n_grid, step_sd, inv_tpow, s.two_sided);
        }
    };

    if (n_threads <= 1) {
        worker(0, s.n_paths);
    } else {
        std::vector<std::thread> pool;
        const long chunk = (s.n_paths + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            const long begin = t * chunk;
            const long end = std::min<long>(begin + chunk, s.n_paths);
            if (begin >= end) break;
            pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    std::sort(sups.begin(), sups.end());
    return sups;
}

double quantile_of_sorted(const std::vector<double>& sorted, double confidence) {
    const auto n = static_cast<double>(sorted.size());
    auto idx = static_cast<long>(std::ceil(confidence * n)) - 1;
    idx = std::clamp<long>(idx, 0, static_cast<long>(sorted.size()) - 1);
    return sorted[static_cast<std::size_t>(idx)];
}

}  // namespace

std::vector<CriticalValue> critical_values(double gamma, std::span<const double> confidences,
                                           const CalibrationSettings& settings) {
    for (double c : confidences)
        if (!(c > 0.0 && c < 1.0))
            throw std::invalid_argument("critical_values: confidence must lie in (0, 1)");
    const std::vector<double> sups = simulate_suprema(gamma, settings);
    std::vector<CriticalValue> out;
    out.reserve(confidences.size());
    for (double c : confidences) {
        CriticalValue cv;
        cv.gamma = gamma;
        cv.confidence = c;
        cv.value = quantile_of_sorted(sups, c);
        cv.n_paths = settings.n_paths;
        cv.n_grid = settings.n_grid;
        cv.seed = settings.seed;
        out.push_back(cv);
    }
    return out;
}

CriticalValue critical_value(double gamma, double confidence, const CalibrationSettings& settings) {
    const double cs[] = {confidence};
    return critical_values(gamma, cs, settings).front();
}

CriticalValueCache::CriticalValueCache(std::filesystem::path file) : file_(std::move(file)) {
    load();
}

void CriticalValueCache::load() {
    std::ifstream in(file_);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        CriticalValue cv;
        if (ls >> cv.gamma >> cv.confidence >> cv.n_paths >> cv.n_grid >> cv.seed >> cv.value)
            entries_[{cv.gamma, cv.confidence, cv.n_paths, cv.n_grid, cv.seed}] = cv;
    }
}

void CriticalValueCache::append(const CriticalValue& cv) {
    entries_[{cv.gamma, cv.confidence, cv.n_paths, cv.n_grid, cv.seed}] = cv;
    if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
    std::ofstream out(file_, std::ios::app);
    out << to_text(cv.gamma) << ' ' << to_text(cv.confidence) << ' ' << cv.n_paths << ' '
        << cv.n_grid << ' ' << cv.seed << ' ' << to_text(cv.value) << '\n';
}

CriticalValue CriticalValueCache::get_or_compute(double gamma, double confidence,
                                                 const CalibrationSettings& settings) {
    const double cs[] = {confidence};
    return get_or_compute(gamma, cs, settings).front();
}

std::vector<CriticalValue> CriticalValueCache::get_or_compute(
    double gamma, std::span<const double> confidences, const CalibrationSettings& settings) {
    if (!settings.two_sided) return critical_values(gamma, confidences, settings);

    std::scoped_lock lock(mutex_);
    std::vector<CriticalValue> out(confidences.size());
    std::vector<double> missing;
    for (std::size_t i = 0; i < confidences.size(); ++i) {
        const Key key{gamma, confidences[i], settings.n_paths, settings.n_grid, settings.seed};
        auto it = entries_.find(key);
        if (it != entries_.end())
            out[i] = it->second;
        else
            missing.push_back(confidences[i]);
    }
    if (!missing.empty()) {
        const auto computed = critical_values(gamma, missing, settings);
        for (const auto& cv : computed) append(cv);
        for (std::size_t i = 0; i < confidences.size(); ++i) {
            if (out[i].value > 0.0) continue;
            for (const auto& cv : computed)
                if (cv.confidence == confidences[i]) out[i] = cv;
        }
    }
    return out;
}

}  // namespace sdnids::cpd
