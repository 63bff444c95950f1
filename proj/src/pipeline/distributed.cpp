#include "sdnids/pipeline/distributed.hpp"

#include <algorithm>
#include <stdexcept>

namespace sdnids::pipeline {

DistributedDeployment::DistributedDeployment(sim::NodeMetric metric, int node_count,
                                             const cpd::DetectorParams& params,
                                             const cpd::CriticalValue& cv)
    : metric_(metric) {
    detectors_.reserve(static_cast<std::size_t>(node_count));
    for (int i = 0; i < node_count; ++i) detectors_.emplace_back(cpd::Detector(params, cv));
}

std::vector<AlarmEvent> DistributedDeployment::step(const sim::MetricWindow& window) {
    std::vector<AlarmEvent> fresh;
    const int w = window_++;
    for (std::size_t node = 0; node < detectors_.size(); ++node) {
        auto& det = detectors_[node];
        if (!det) continue;
        const double x = window.per_node[node].metric(metric_);
        try {
            const auto out = det->ingest(x);
            if (out.kind == cpd::Outcome::Kind::ChangeAt) {
                AlarmEvent a;
                a.node = static_cast<sim::NodeId>(node);
                a.window = w;
                a.metric = metric_;
                a.statistic = out.detection.statistic;
                a.threshold = out.detection.threshold;
                fresh.push_back(a);
                alarms_.push_back(a);
                det.reset();  // first alarm only
            }
        } catch (const cpd::DegenerateVarianceError&) {
            excluded_.push_back(static_cast<sim::NodeId>(node));
            det.reset();  // this node is out; the others are untouched
        }
    }
    return fresh;
}

DistributedDeployment run_distributed(sim::NodeMetric metric, const sim::MetricSeries& series,
                                      const cpd::DetectorParams& params,
                                      const cpd::CriticalValue& cv) {
    DistributedDeployment dep(metric, series.node_count, params, cv);
    for (const auto& w : series.windows) dep.step(w);
    return dep;
}

int default_blocks_per_axis(int side) { return side >= 9 ? 3 : 2; }

std::vector<int> grid_groups(int side, int blocks_per_axis) {
    if (side < 2 || blocks_per_axis < 1 || blocks_per_axis > side)
        throw std::invalid_argument("grid_groups: invalid side/blocks_per_axis");
    auto band = [&](int coord) {
        // Contiguous bands of floor/ceil(side / blocks) cells.
        return std::min(coord * blocks_per_axis / side, blocks_per_axis - 1);
    };
    std::vector<int> group_of(static_cast<std::size_t>(side) * side);
    for (int row = 0; row < side; ++row)
        for (int col = 0; col < side; ++col)
            group_of[static_cast<std::size_t>(row) * side + col] =
                band(row) * blocks_per_axis + band(col);
    return group_of;
}

GroupSeries aggregate_group_series(const sim::MetricSeries& series, sim::NodeMetric metric,
                                   std::span<const int> group_of) {
    if (static_cast<int>(group_of.size()) != series.node_count)
        throw std::invalid_argument("aggregate_group_series: partition size mismatch");
    GroupSeries out;
    out.group_of.assign(group_of.begin(), group_of.end());
    out.group_count = group_of.empty() ? 0 : *std::max_element(group_of.begin(), group_of.end()) + 1;
    std::vector<long> members(static_cast<std::size_t>(out.group_count), 0);
    for (int g : group_of) {
        if (g < 0) throw std::invalid_argument("aggregate_group_series: negative group id");
        ++members[static_cast<std::size_t>(g)];
    }
    for (long m : members)
        if (m == 0) throw std::invalid_argument("aggregate_group_series: empty group");

    out.series.assign(static_cast<std::size_t>(out.group_count),
                      std::vector<double>(series.windows.size(), 0.0));
    for (std::size_t w = 0; w < series.windows.size(); ++w)
        for (int node = 0; node < series.node_count; ++node)
            out.series[static_cast<std::size_t>(group_of[static_cast<std::size_t>(node)])][w] +=
                series.windows[w].per_node[static_cast<std::size_t>(node)].metric(metric);
    return out;
}

std::vector<GroupDetection> run_groups(const GroupSeries& groups,
                                       const cpd::DetectorParams& params,
                                       const cpd::CriticalValue& cv) {
    std::vector<GroupDetection> out;
    for (int g = 0; g < groups.group_count; ++g) {
        GroupDetection gd;
        gd.group = g;
        cpd::Detector det(params, cv);
        try {
            for (std::size_t w = 0; w < groups.series[static_cast<std::size_t>(g)].size(); ++w) {
                const auto o = det.ingest(groups.series[static_cast<std::size_t>(g)][w]);
                if (o.kind == cpd::Outcome::Kind::ChangeAt) {
                    gd.alarmed = true;
                    gd.window = static_cast<int>(w);
                    gd.statistic = o.detection.statistic;
                    gd.threshold = o.detection.threshold;
                    break;
                }
            }
        } catch (const cpd::DegenerateVarianceError&) {
            gd.excluded = true;
        }
        out.push_back(gd);
    }
    return out;
}

}  // namespace sdnids::pipeline
