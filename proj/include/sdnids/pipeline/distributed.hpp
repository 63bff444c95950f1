#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sdnids/cpd/detector.hpp"
#include "sdnids/sim/metrics.hpp"

namespace sdnids::pipeline {

struct AlarmEvent {
    sim::NodeId node = -1;  // node id, or group id for group-level alarms
    int window = 0;
    sim::NodeMetric metric{};
    double statistic = 0.0;
    double threshold = 0.0;
};

/// One detector per node over a single local metric. Nodes alarm
/// independently; a node that alarmed stops, the others continue. Nodes
/// whose learning window is constant are excluded and reported, without
/// affecting anyone else.
class DistributedDeployment {
public:
    DistributedDeployment(sim::NodeMetric metric, int node_count,
                          const cpd::DetectorParams& params, const cpd::CriticalValue& cv);

    // Feed one window of per-node samples; returns this window's new alarms
    // (ascending node id).
    std::vector<AlarmEvent> step(const sim::MetricWindow& window);

    const std::vector<AlarmEvent>& alarms() const { return alarms_; }
    const std::vector<sim::NodeId>& excluded() const { return excluded_; }
    sim::NodeMetric metric() const { return metric_; }

private:
    sim::NodeMetric metric_;
    std::vector<std::optional<cpd::Detector>> detectors_;  // nullopt once excluded/alarmed
    std::vector<AlarmEvent> alarms_;
    std::vector<sim::NodeId> excluded_;
    int window_ = 0;
};

// Convenience: run a fresh deployment over a complete series.
DistributedDeployment run_distributed(sim::NodeMetric metric, const sim::MetricSeries& series,
                                      const cpd::DetectorParams& params,
                                      const cpd::CriticalValue& cv);

/// Spatial partition of the grid into g x g contiguous blocks
/// (2 x 2 = 4 groups for side 6, 3 x 3 = 9 groups for side 10).
/// Returns group id per node.
std::vector<int> grid_groups(int side, int blocks_per_axis);
int default_blocks_per_axis(int side);

struct GroupSeries {
    int group_count = 0;
    std::vector<int> group_of;                  // node -> group
    std::vector<std::vector<double>> series;    // [group][window], summed metric
};

// Group sample = sum of member samples per window.
GroupSeries aggregate_group_series(const sim::MetricSeries& series, sim::NodeMetric metric,
                                   std::span<const int> group_of);

struct GroupDetection {
    int group = -1;
    bool alarmed = false;
    int window = 0;
    double statistic = 0.0;
    double threshold = 0.0;
    bool excluded = false;  // degenerate learning window
};

// One detector per group over the aggregated series.
std::vector<GroupDetection> run_groups(const GroupSeries& groups,
                                       const cpd::DetectorParams& params,
                                       const cpd::CriticalValue& cv);

}  // namespace sdnids::pipeline
