#include "sdnids/sim/metrics.hpp"

#include <stdexcept>

#include "sdnids/common/text.hpp"

namespace sdnids::sim {

const char* node_metric_name(NodeMetric m) {
    switch (m) {
        case NodeMetric::ProcTime: return "proc_time";
        case NodeMetric::TxTime: return "tx_time";
        case NodeMetric::CtrlRx: return "ctrl_rx";
        case NodeMetric::CtrlTx: return "ctrl_tx";
    }
    return "?";
}

NodeMetric node_metric_from_name(const std::string& name) {
    if (name == "proc_time") return NodeMetric::ProcTime;
    if (name == "tx_time") return NodeMetric::TxTime;
    if (name == "ctrl_rx") return NodeMetric::CtrlRx;
    if (name == "ctrl_tx") return NodeMetric::CtrlTx;
    throw std::invalid_argument("unknown node metric: " + name);
}

std::vector<double> MetricSeries::delivery() const {
    std::vector<double> out;
    out.reserve(windows.size());
    for (const auto& w : windows) out.push_back(w.delivery_rate);
    return out;
}

std::vector<double> MetricSeries::overhead() const {
    std::vector<double> out;
    out.reserve(windows.size());
    for (const auto& w : windows) out.push_back(static_cast<double>(w.ctrl_overhead));
    return out;
}

std::vector<double> MetricSeries::node_series(NodeId node, NodeMetric m) const {
    std::vector<double> out;
    out.reserve(windows.size());
    for (const auto& w : windows) out.push_back(w.per_node[static_cast<std::size_t>(node)].metric(m));
    return out;
}

std::string MetricSeries::to_csv() const {
    std::string out = "window,delivery_rate,ctrl_overhead";
    for (int id = 0; id < node_count; ++id) {
        out += strprintf(",n%d_proc,n%d_tx,n%d_crx,n%d_ctx", id, id, id, id);
    }
    out += '\n';
    for (const auto& w : windows) {
        out += strprintf("%d,%s,%ld", w.index, fixed_text(w.delivery_rate, 6).c_str(),
                         w.ctrl_overhead);
        for (const auto& pn : w.per_node) {
            out += strprintf(",%s,%s,%d,%d", fixed_text(pn.proc_us / 1000.0, 3).c_str(),
                             fixed_text(pn.tx_us / 1000.0, 3).c_str(), pn.ctrl_rx, pn.ctrl_tx);
        }
        out += '\n';
    }
    return out;
}

std::vector<std::pair<NodeId, long>> ExchangeSeries::totals(NodeId node, int first,
                                                            int last) const {
    std::vector<std::pair<NodeId, long>> out;
    if (per_window.empty()) return out;
    first = std::max(first, 0);
    last = std::min(last, static_cast<int>(per_window.size()) - 1);
    for (int w = first; w <= last; ++w) {
        for (const auto& [peer, count] : per_window[static_cast<std::size_t>(w)]
                                                   [static_cast<std::size_t>(node)]) {
            bool merged = false;
            for (auto& [p, c] : out)
                if (p == peer) {
                    c += count;
                    merged = true;
                    break;
                }
            if (!merged) out.push_back({peer, count});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

MetricSeries window_metrics(const WindowTally& tally) {
    MetricSeries series;
    series.node_count = tally.node_count;
    series.windows.reserve(static_cast<std::size_t>(tally.window_count));
    for (int w = 0; w < tally.window_count; ++w) {
        MetricWindow mw;
        mw.index = w;
        const long sent = tally.data_sent[static_cast<std::size_t>(w)];
        const long got = tally.data_delivered[static_cast<std::size_t>(w)];
        mw.delivery_rate = sent == 0 ? 1.0 : static_cast<double>(got) / static_cast<double>(sent);
        mw.ctrl_overhead = tally.ctrl_tx[static_cast<std::size_t>(w)];
        mw.per_node = tally.node_windows[static_cast<std::size_t>(w)];
        series.windows.push_back(std::move(mw));
    }
    return series;
}

}  // namespace sdnids::sim
