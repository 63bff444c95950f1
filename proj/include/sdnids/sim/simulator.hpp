#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdnids/sim/metrics.hpp"
#include "sdnids/sim/packet.hpp"
#include "sdnids/sim/routing.hpp"
#include "sdnids/sim/topology.hpp"

namespace sdnids::sim {

enum class AttackKind { None, FDFF, FNI };
enum class TamperMode { Metric, NodeId };

const char* attack_kind_name(AttackKind k);

struct AttackConfig {
    AttackKind kind = AttackKind::None;
    double fraction = 0.0;
    std::vector<NodeId> attackers;   // explicit placement; empty = draw from placement_seed
    std::uint64_t placement_seed = 1;
    double start_time_s = 28800.0;   // 8 h
    double bogus_flow_period_s = 1.0;
    TamperMode tamper_mode = TamperMode::NodeId;
};

struct TrafficConfig {
    double data_period_s = 30.0;
    double mgmt_period_s = 120.0;
    double report_period_s = 300.0;
    int payload_bytes = 10;
    double timer_jitter = 0.05;       // fractional uniform jitter on all periods
    double link_metric_jitter = 0.0;  // benign wobble of reported link metrics
};

struct CostModel {
    double proc_per_packet_ms = 1.0;
    double tx_per_16_bytes_ms = 0.5;
    double hop_delay_ms = 5.0;
    double controller_service_ms = 5.0;
};

struct SimConfig {
    int side = 6;
    double spacing = 50.0;
    double radio_radius = 1.5;
    TrafficConfig traffic;
    CostModel costs;
    double duration_s = 36000.0;
    double window_s = 120.0;
    double loss_prob = 0.02;
    int flow_table_capacity = 32;
    int ttl = 64;
    double report_change_threshold = 0.2;      // fires an event-triggered report
    double request_min_interval_s = 30.0;      // table-miss request throttling, 0 = off
    AttackConfig attack;
    bool record_trace = false;

    void validate() const;  // throws std::invalid_argument naming the field
    int window_count() const { return static_cast<int>(duration_s / window_s); }
    int attack_start_window() const {
        return attack.kind == AttackKind::None
                   ? -1
                   : static_cast<int>(attack.start_time_s / window_s);
    }
};

// Per-class packet accounting; every originated packet ends in exactly one
// terminal bucket.
struct DropCounts {
    long loss = 0;
    long ttl = 0;
    long no_rule = 0;      // flow-table miss at origin or relay
    long rule_drop = 0;    // explicit Drop action
    long broken_link = 0;  // installed next hop is not a radio neighbor
    long total() const { return loss + ttl + no_rule + rule_drop + broken_link; }
};

struct ClassCounters {
    long originated = 0;
    long consumed = 0;  // reached a Receive rule / final destination
    DropCounts drops;
    long in_flight() const { return originated - consumed - drops.total(); }
};

struct TraceCounters {
    ClassCounters benign_data;
    ClassCounters bogus_data;
    ClassCounters management;
    ClassCounters control;
    long transmissions = 0;
    long receptions = 0;
    long tampered_reports = 0;
    long controller_recomputes = 0;
    long setups_pushed = 0;
    long unroutable_replies = 0;
    long suppressed_requests = 0;
};

struct EventRecord {
    std::int64_t t_us = 0;
    NodeId node = -1;
    const char* event = "";
    PacketKind kind = PacketKind::Data;
    const char* outcome = "";
};

std::string events_to_ndjson(const std::vector<EventRecord>& events);

struct RunOutput {
    Topology topology;
    std::vector<NodeId> attackers;
    int attack_start_window = -1;
    MetricSeries series;
    ExchangeSeries exchanges;
    TraceCounters counters;
    std::vector<EventRecord> events;  // populated when record_trace
};

// Executes one fully deterministic simulation.
RunOutput run(const SimConfig& config, std::uint64_t seed);

}  // namespace sdnids::sim
