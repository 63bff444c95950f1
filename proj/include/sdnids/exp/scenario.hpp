#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "sdnids/cpd/calibration.hpp"
#include "sdnids/pipeline/score.hpp"
#include "sdnids/sim/simulator.hpp"

namespace sdnids::exp {

using json = nlohmann::json;

struct DetectorSpec {
    int learning_window = 200;
    double gamma = 0.0;
    double confidence = 0.95;
    int horizon = 60;
    std::optional<int> lrv_bandwidth;

    cpd::DetectorParams params() const;
};

/// One experiment scenario: simulator setup, detector parameterization,
/// scoring weights and seed list. The content digest keys the output
/// directory, so any change to a scenario field relocates its results.
struct ScenarioConfig {
    std::string name = "scenario";
    sim::SimConfig sim;
    DetectorSpec overhead_detector;
    DetectorSpec delivery_detector{.gamma = 0.0};
    DetectorSpec distributed_detector{.gamma = 0.0, .confidence = 0.99};
    sim::NodeMetric distributed_metric = sim::NodeMetric::CtrlRx;
    bool run_centralized = true;
    bool run_distributed = true;
    bool run_groups = true;
    int exchange_depth = 10;
    std::vector<pipeline::WeightPair> weights = {
        {1.0, 0.0}, {0.8, 0.2}, {0.5, 0.5}, {0.2, 0.8}, {0.0, 1.0}};
    cpd::CalibrationSettings calibration;
    std::vector<std::uint64_t> seeds;

    static ScenarioConfig from_json(const json& j);
    json to_json() const;
    void validate() const;  // throws std::invalid_argument naming the field

    // Hex digest over every scenario field except the seed list.
    std::string digest() const;

    // Samples monitored after the onset; the score normalization horizon.
    int post_onset_samples() const;
};

ScenarioConfig load_scenario(const std::filesystem::path& file);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace sdnids::exp
