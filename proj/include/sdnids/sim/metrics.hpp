#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sdnids/sim/topology.hpp"

namespace sdnids::sim {

// The four per-node series available to distributed detectors.
enum class NodeMetric { ProcTime, TxTime, CtrlRx, CtrlTx };

const char* node_metric_name(NodeMetric m);
NodeMetric node_metric_from_name(const std::string& name);

struct NodeWindow {
    std::int64_t proc_us = 0;  // per-packet handling cost accrued this window
    std::int64_t tx_us = 0;    // transmission cost accrued this window
    int ctrl_rx = 0;           // control packets received
    int ctrl_tx = 0;           // control packets transmitted

    double metric(NodeMetric m) const {
        switch (m) {
            case NodeMetric::ProcTime: return static_cast<double>(proc_us) / 1000.0;
            case NodeMetric::TxTime: return static_cast<double>(tx_us) / 1000.0;
            case NodeMetric::CtrlRx: return ctrl_rx;
            case NodeMetric::CtrlTx: return ctrl_tx;
        }
        return 0.0;
    }
};

struct MetricWindow {
    int index = 0;
    double delivery_rate = 1.0;      // delivered / sent for data emitted this window
    long ctrl_overhead = 0;          // control transmissions network-wide
    std::vector<NodeWindow> per_node;
};

struct MetricSeries {
    int node_count = 0;
    std::vector<MetricWindow> windows;

    std::vector<double> delivery() const;
    std::vector<double> overhead() const;
    std::vector<double> node_series(NodeId node, NodeMetric m) const;

    // CSV with header window,delivery_rate,ctrl_overhead followed by
    // n<id>_proc,n<id>_tx,n<id>_crx,n<id>_ctx for each node.
    std::string to_csv() const;
};

// Packet-exchange counts per window: for every node, (neighbor, count)
// pairs sorted by neighbor id. Feeds the attacker-identification view.
struct ExchangeSeries {
    std::vector<std::vector<std::vector<std::pair<NodeId, int>>>> per_window;

    // Total exchanges of `node` with each peer over windows [first, last].
    std::vector<std::pair<NodeId, long>> totals(NodeId node, int first, int last) const;
};

// Raw accounting accumulated by the engine; window_metrics folds it into the
// exported series. Delivery uses cohort accounting: a data packet counts in
// the window it was emitted, and as delivered there if it eventually reached
// the data sink.
struct WindowTally {
    int node_count = 0;
    int window_count = 0;
    std::vector<long> data_sent;           // by emission window
    std::vector<long> data_delivered;      // by emission window
    std::vector<long> ctrl_tx;             // by transmission window
    std::vector<std::vector<NodeWindow>> node_windows;  // [window][node]
    ExchangeSeries exchanges;
};

MetricSeries window_metrics(const WindowTally& tally);

}  // namespace sdnids::sim
