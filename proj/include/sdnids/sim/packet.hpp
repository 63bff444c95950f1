#pragma once

#include <cstdint>
#include <vector>

#include "sdnids/sim/topology.hpp"

namespace sdnids::sim {

using FlowId = int;

// Well-known flows installed at bootstrap. Attack traffic uses fresh ids
// outside this range.
inline constexpr FlowId kFlowController = 0;
inline constexpr FlowId kFlowData = 1;
inline constexpr FlowId kFlowMgmt = 2;
inline constexpr FlowId kFirstDynamicFlow = 1000;

enum class PacketKind : std::uint8_t {
    Data,
    FlowRequest,
    FlowSetup,
    FlowIdRegister,
    Ack,
    NeighborReport,
    Management,
};

// Southbound control-plane kinds; Data and Management are excluded from the
// control-overhead metric.
inline bool is_control(PacketKind k) {
    switch (k) {
        case PacketKind::FlowRequest:
        case PacketKind::FlowSetup:
        case PacketKind::FlowIdRegister:
        case PacketKind::Ack:
        case PacketKind::NeighborReport:
            return true;
        default:
            return false;
    }
}

const char* packet_kind_name(PacketKind k);

enum class FlowAction : std::uint8_t { Forward, Drop, Receive };

struct FlowTableEntry {
    FlowId match_flow = -1;  // exactly one of match_flow / match_addr is set
    NodeId match_addr = -1;
    FlowAction action = FlowAction::Forward;
    NodeId next_hop = -1;  // action parameter for Forward
    long usage = 0;        // matches since installed
    long installed_seq = 0;
};

struct NeighborEntry {
    NodeId neighbor = -1;
    double metric = 1.0;
};

struct Packet {
    PacketKind kind = PacketKind::Data;
    NodeId src = -1;
    NodeId dst = -1;   // final destination node (sinks, controller, setup target)
    FlowId flow = -1;  // set on flow-routed packets (Data/Management/requests)
    int ttl = 64;
    int size_bytes = 0;
    std::int64_t created_us = 0;
    int cohort_window = -1;  // emission window, for delivery accounting
    bool bogus = false;      // attack-injected data, excluded from delivery stats
    bool tampered = false;

    // Controller-to-node packets carry their full path.
    std::vector<NodeId> source_route;
    int route_index = 0;

    // FlowRequest payload.
    FlowId requested_flow = -1;

    // FlowSetup payload.
    FlowId setup_flow = -1;
    FlowAction setup_action = FlowAction::Forward;
    NodeId setup_next_hop = -1;

    // NeighborReport payload.
    NodeId reporter = -1;
    std::vector<NeighborEntry> report_entries;

    // FlowIdRegister payload.
    FlowId register_flow = -1;
    NodeId register_owner = -1;
};

}  // namespace sdnids::sim
