#include "sdnids/sim/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <queue>

#include "sdnids/common/rng.hpp"
#include "sdnids/common/text.hpp"

namespace sdnids::sim {

const char* attack_kind_name(AttackKind k) {
    switch (k) {
        case AttackKind::None: return "none";
        case AttackKind::FDFF: return "fdff";
        case AttackKind::FNI: return "fni";
    }
    return "?";
}

void SimConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("SimConfig: " + what); };
    if (side < 3) fail("side must be >= 3");
    if (!(spacing > 0.0)) fail("spacing must be positive");
    if (!(radio_radius > 0.0)) fail("radio_radius must be positive");
    if (!(duration_s > 0.0)) fail("duration_s must be positive");
    if (!(window_s > 0.0) || window_s > duration_s) fail("window_s must lie in (0, duration_s]");
    if (loss_prob < 0.0 || loss_prob >= 1.0) fail("loss_prob must lie in [0, 1)");
    if (flow_table_capacity < 4) fail("flow_table_capacity must be >= 4");
    if (ttl < 1) fail("ttl must be >= 1");
    if (!(traffic.data_period_s > 0.0)) fail("traffic.data_period_s must be positive");
    if (!(traffic.mgmt_period_s > 0.0)) fail("traffic.mgmt_period_s must be positive");
    if (!(traffic.report_period_s > 0.0)) fail("traffic.report_period_s must be positive");
    if (traffic.payload_bytes < 0) fail("traffic.payload_bytes must be >= 0");
    if (traffic.timer_jitter < 0.0 || traffic.timer_jitter > 0.5)
        fail("traffic.timer_jitter must lie in [0, 0.5]");
    if (traffic.link_metric_jitter < 0.0 || traffic.link_metric_jitter > 0.5)
        fail("traffic.link_metric_jitter must lie in [0, 0.5]");
    if (report_change_threshold <= 0.0) fail("report_change_threshold must be positive");
    if (request_min_interval_s < 0.0) fail("request_min_interval_s must be >= 0");
    if (attack.kind != AttackKind::None) {
        if (attack.fraction < 0.0 || attack.fraction > 1.0)
            fail("attack.fraction must lie in [0, 1]");
        if (attack.attackers.empty() && attack.fraction == 0.0)
            fail("attack.fraction is 0 and no explicit attackers given");
        if (attack.start_time_s < 0.0 || attack.start_time_s >= duration_s)
            fail("attack.start_time_s must lie in [0, duration_s)");
        if (!(attack.bogus_flow_period_s > 0.0)) fail("attack.bogus_flow_period_s must be positive");
    } else {
        if (!attack.attackers.empty()) fail("attack.kind is none but attackers are listed");
    }
}

std::string events_to_ndjson(const std::vector<EventRecord>& events) {
    std::string out;
    out.reserve(events.size() * 80);
    for (const auto& e : events) {
        out += strprintf(R"({"t":%.6f,"node":%d,"event":"%s","packet":"%s","outcome":"%s"})",
                         static_cast<double>(e.t_us) / 1e6, e.node, e.event,
                         packet_kind_name(e.kind), e.outcome);
        out += '\n';
    }
    return out;
}

namespace {

enum class EvType { EmitData, EmitMgmt, EmitReport, MetricRefresh, EmitBogus, Arrive, CtrlSend };

struct Ev {
    std::int64_t t = 0;
    long seq = 0;
    EvType type = EvType::Arrive;
    NodeId node = -1;  // emitter / receiver / controller
    NodeId from = -1;  // transmitter, for Arrive
    Packet pkt;
};

struct EvAfter {
    bool operator()(const Ev& a, const Ev& b) const {
        if (a.t != b.t) return a.t > b.t;
        return a.seq > b.seq;
    }
};

constexpr int kHeaderBytes = 8;

class Engine {
public:
    Engine(const SimConfig& cfg, std::uint64_t seed)
        : cfg_(cfg),
          traffic_rng_(mix_seed(seed, 1)),
          loss_rng_(mix_seed(seed, 2)),
          attack_rng_(mix_seed(seed, 3)) {
        cfg_.validate();
        topo_ = build_grid(cfg_.side, cfg_.spacing, cfg_.radio_radius);
        n_ = topo_.node_count();
        duration_us_ = to_us(cfg_.duration_s);
        window_us_ = to_us(cfg_.window_s);
        hop_delay_us_ = to_us(cfg_.costs.hop_delay_ms / 1000.0);
        service_us_ = to_us(cfg_.costs.controller_service_ms / 1000.0);
        proc_us_ = to_us(cfg_.costs.proc_per_packet_ms / 1000.0);
        attack_start_us_ = to_us(cfg_.attack.start_time_s);
        n_windows_ = cfg_.window_count();
    }

    RunOutput execute() {
        setup();
        while (!queue_.empty()) {
            Ev ev = std::move(const_cast<Ev&>(queue_.top()));
            queue_.pop();
            now_ = ev.t;
            flush_windows(now_);
            handle(ev);
        }
        flush_windows(static_cast<std::int64_t>(n_windows_) * window_us_);

        RunOutput out;
        out.topology = std::move(topo_);
        out.attackers = attackers_;
        out.attack_start_window = cfg_.attack_start_window();
        out.series = window_metrics(tally_);
        out.exchanges = std::move(tally_.exchanges);
        out.counters = counters_;
        out.events = std::move(events_);
        return out;
    }

private:
    // ----- setup ------------------------------------------------------------

    static std::int64_t to_us(double seconds) {
        return static_cast<std::int64_t>(std::llround(seconds * 1e6));
    }

    void setup() {
        roles_.assign(static_cast<std::size_t>(n_), Role::Plain);
        roles_[static_cast<std::size_t>(topo_.controller)] = Role::Controller;
        roles_[static_cast<std::size_t>(topo_.data_sink)] = Role::DataSink;
        roles_[static_cast<std::size_t>(topo_.mgmt_sink)] = Role::MgmtSink;

        if (cfg_.attack.kind != AttackKind::None) {
            attackers_ = cfg_.attack.attackers.empty()
                             ? place_attackers(topo_, cfg_.attack.fraction,
                                               cfg_.attack.placement_seed)
                             : cfg_.attack.attackers;
            std::sort(attackers_.begin(), attackers_.end());
            for (std::size_t i = 0; i < attackers_.size(); ++i) {
                const NodeId a = attackers_[i];
                if (a < 0 || a >= n_) throw std::invalid_argument("attacker id out of range");
                if (topo_.is_infrastructure(a))
                    throw std::invalid_argument("attacker on controller/sink cell");
                for (std::size_t j = i + 1; j < attackers_.size(); ++j)
                    if (topo_.are_neighbors(a, attackers_[j]))
                        throw std::invalid_argument("attackers must not be neighbors");
                roles_[static_cast<std::size_t>(a)] = Role::Attacker;
            }
        }

        // Initial routes on the true topology with unit link metrics.
        auto seeded = compute_routes(topo_);
        tables_.assign(static_cast<std::size_t>(n_), {});
        for (auto& [id, table] : seeded) tables_[static_cast<std::size_t>(id)] = std::move(table);

        last_request_us_.assign(static_cast<std::size_t>(n_), -1);

        // Local link metrics start at the nominal 1.0.
        link_metric_.assign(static_cast<std::size_t>(n_), {});
        last_reported_.assign(static_cast<std::size_t>(n_), {});
        for (NodeId u = 0; u < n_; ++u) {
            const auto deg = topo_.neighbors[static_cast<std::size_t>(u)].size();
            link_metric_[static_cast<std::size_t>(u)].assign(deg, 1.0);
            last_reported_[static_cast<std::size_t>(u)].assign(deg, 1.0);
        }

        // Controller bootstrap: view = truth, pushes tracked per node/flow.
        claimed_.assign(static_cast<std::size_t>(n_), {});
        for (NodeId u = 0; u < n_; ++u)
            for (NodeId v : topo_.neighbors[static_cast<std::size_t>(u)])
                claimed_[static_cast<std::size_t>(u)].push_back({v, 1.0});
        trees_valid_ = false;
        registered_[kFlowController] = topo_.controller;
        registered_[kFlowData] = topo_.data_sink;
        registered_[kFlowMgmt] = topo_.mgmt_sink;
        pushed_next_.assign(static_cast<std::size_t>(n_), {-1, -1, -1});
        for (NodeId u = 0; u < n_; ++u)
            for (int f = 0; f < 3; ++f)
                if (const auto* e = tables_[static_cast<std::size_t>(u)].find_flow(f))
                    pushed_next_[static_cast<std::size_t>(u)][static_cast<std::size_t>(f)] =
                        e->action == FlowAction::Receive ? -2 : e->next_hop;

        // Accounting storage.
        tally_.node_count = n_;
        tally_.window_count = n_windows_;
        tally_.data_sent.assign(static_cast<std::size_t>(n_windows_), 0);
        tally_.data_delivered.assign(static_cast<std::size_t>(n_windows_), 0);
        tally_.ctrl_tx.assign(static_cast<std::size_t>(n_windows_), 0);
        tally_.node_windows.assign(static_cast<std::size_t>(n_windows_), {});
        tally_.exchanges.per_window.assign(static_cast<std::size_t>(n_windows_), {});
        cur_node_.assign(static_cast<std::size_t>(n_), {});
        cur_exch_.assign(static_cast<std::size_t>(n_), {});

        // Traffic timers, node order fixed for determinism.
        for (NodeId u = 0; u < n_; ++u) {
            const Role r = roles_[static_cast<std::size_t>(u)];
            if (r == Role::Plain || r == Role::Attacker) {
                schedule(draw_phase(cfg_.traffic.data_period_s), EvType::EmitData, u);
                schedule(draw_phase(cfg_.traffic.mgmt_period_s), EvType::EmitMgmt, u);
            }
            if (u != topo_.controller)
                schedule(draw_phase(cfg_.traffic.report_period_s), EvType::EmitReport, u);
            if (cfg_.traffic.link_metric_jitter > 0.0 && u != topo_.controller)
                schedule(draw_phase(cfg_.traffic.mgmt_period_s), EvType::MetricRefresh, u);
        }
        for (NodeId a : attackers_)
            if (cfg_.attack.kind == AttackKind::FDFF)
                schedule(attack_start_us_ +
                             static_cast<std::int64_t>(attack_rng_.uniform() *
                                                       to_us(cfg_.attack.bogus_flow_period_s)),
                         EvType::EmitBogus, a);

        // Sinks register their flow ids with the controller at startup.
        schedule(to_us(1.0), EvType::CtrlSend, topo_.data_sink, -1,
                 make_register_packet(topo_.data_sink, kFlowData));
        schedule(to_us(1.5), EvType::CtrlSend, topo_.mgmt_sink, -1,
                 make_register_packet(topo_.mgmt_sink, kFlowMgmt));
    }

    std::int64_t draw_phase(double period_s) {
        return static_cast<std::int64_t>(traffic_rng_.uniform() * to_us(period_s));
    }

    Packet make_register_packet(NodeId owner, FlowId flow) {
        Packet p;
        p.kind = PacketKind::FlowIdRegister;
        p.src = owner;
        p.dst = topo_.controller;
        p.flow = kFlowController;
        p.ttl = cfg_.ttl;
        p.size_bytes = kHeaderBytes + 4;
        p.register_flow = flow;
        p.register_owner = owner;
        return p;
    }

    // ----- event plumbing ---------------------------------------------------

    void schedule(std::int64_t t, EvType type, NodeId node, NodeId from = -1, Packet pkt = {}) {
        Ev ev;
        ev.t = t;
        ev.seq = seq_++;
        ev.type = type;
        ev.node = node;
        ev.from = from;
        ev.pkt = std::move(pkt);
        queue_.push(std::move(ev));
    }

    void handle(Ev& ev) {
        switch (ev.type) {
            case EvType::EmitData: emit_periodic(ev.node, PacketKind::Data); break;
            case EvType::EmitMgmt: emit_periodic(ev.node, PacketKind::Management); break;
            case EvType::EmitReport: emit_report(ev.node, /*event_triggered=*/false); break;
            case EvType::MetricRefresh: refresh_metrics(ev.node); break;
            case EvType::EmitBogus: emit_bogus(ev.node); break;
            case EvType::CtrlSend: originate(ev.node, std::move(ev.pkt)); break;
            case EvType::Arrive: arrive(ev.node, ev.from, std::move(ev.pkt)); break;
        }
    }

    int window_of(std::int64_t t) const { return static_cast<int>(t / window_us_); }

    void flush_windows(std::int64_t t) {
        while (cur_window_ < n_windows_ &&
               t >= static_cast<std::int64_t>(cur_window_ + 1) * window_us_) {
            const auto w = static_cast<std::size_t>(cur_window_);
            tally_.node_windows[w] = cur_node_;
            tally_.ctrl_tx[w] = cur_ctrl_tx_;
            auto& exch = tally_.exchanges.per_window[w];
            exch = cur_exch_;
            for (auto& per : exch) std::sort(per.begin(), per.end());
            cur_node_.assign(static_cast<std::size_t>(n_), {});
            for (auto& per : cur_exch_) per.clear();
            cur_ctrl_tx_ = 0;
            ++cur_window_;
        }
    }

    void record(NodeId node, const char* event, PacketKind kind, const char* outcome) {
        if (!cfg_.record_trace) return;
        events_.push_back({now_, node, event, kind, outcome});
    }

    ClassCounters& cls(const Packet& p) {
        switch (p.kind) {
            case PacketKind::Data: return p.bogus ? counters_.bogus_data : counters_.benign_data;
            case PacketKind::Management: return counters_.management;
            default: return counters_.control;
        }
    }

    void add_exchange(NodeId node, NodeId peer) {
        auto& per = cur_exch_[static_cast<std::size_t>(node)];
        for (auto& [p, c] : per)
            if (p == peer) {
                ++c;
                return;
            }
        per.push_back({peer, 1});
    }

    std::int64_t tx_cost_us(int size_bytes) const {
        return static_cast<std::int64_t>(
            std::llround(cfg_.costs.tx_per_16_bytes_ms * 1000.0 * size_bytes) / 16);
    }

    // ----- packet movement --------------------------------------------------

    void originate(NodeId node, Packet&& p) {
        cls(p).originated += 1;
        cur_node_[static_cast<std::size_t>(node)].proc_us += proc_us_;
        record(node, "emit", p.kind, "");
        dispatch(node, std::move(p));
    }

    void physical_tx(NodeId from, NodeId to, Packet&& p) {
        ++counters_.transmissions;
        auto& nw = cur_node_[static_cast<std::size_t>(from)];
        nw.tx_us += tx_cost_us(p.size_bytes);
        if (is_control(p.kind)) {
            ++nw.ctrl_tx;
            ++cur_ctrl_tx_;
        }
        add_exchange(from, to);
        record(from, "tx", p.kind, "");
        if (cfg_.loss_prob > 0.0 && loss_rng_.uniform() < cfg_.loss_prob) {
            cls(p).drops.loss += 1;
            record(from, "drop", p.kind, "loss");
            return;
        }
        schedule(now_ + hop_delay_us_, EvType::Arrive, to, from, std::move(p));
    }

    void arrive(NodeId node, NodeId from, Packet&& p) {
        ++counters_.receptions;
        auto& nw = cur_node_[static_cast<std::size_t>(node)];
        nw.proc_us += proc_us_;
        if (is_control(p.kind)) ++nw.ctrl_rx;
        add_exchange(node, from);
        record(node, "rx", p.kind, "");

        if (p.kind == PacketKind::NeighborReport && p.reporter != node &&
            roles_[static_cast<std::size_t>(node)] == Role::Attacker &&
            cfg_.attack.kind == AttackKind::FNI && now_ >= attack_start_us_)
            fni_tamper(node, p);

        dispatch(node, std::move(p));
    }

    void drop(NodeId node, const Packet& p, const char* reason, long DropCounts::*field) {
        cls(p).drops.*field += 1;
        record(node, "drop", p.kind, reason);
    }

    void dispatch(NodeId node, Packet&& p) {
        // Source-routed control replies follow the embedded path.
        if (!p.source_route.empty()) {
            if (node == p.dst) {
                if (auto* self = tables_[static_cast<std::size_t>(node)].find_addr(node))
                    self->usage += 1;
                consume(node, std::move(p));
                return;
            }
            if (p.route_index + 1 >= static_cast<int>(p.source_route.size())) {
                drop(node, p, "broken_route", &DropCounts::broken_link);
                return;
            }
            const NodeId next = p.source_route[static_cast<std::size_t>(p.route_index) + 1];
            if (!topo_.are_neighbors(node, next)) {
                drop(node, p, "broken_link", &DropCounts::broken_link);
                return;
            }
            p.route_index += 1;
            p.ttl -= 1;
            if (p.ttl <= 0) {
                drop(node, p, "ttl", &DropCounts::ttl);
                return;
            }
            physical_tx(node, next, std::move(p));
            return;
        }

        // Flow-routed traffic consults the local table.
        auto& table = tables_[static_cast<std::size_t>(node)];
        FlowTableEntry* entry = table.find_flow(p.flow);
        if (entry == nullptr) {
            // Table miss: ask the controller for a rule; the packet is lost.
            send_flow_request(node, p.flow);
            drop(node, p, "no_rule", &DropCounts::no_rule);
            return;
        }
        entry->usage += 1;
        switch (entry->action) {
            case FlowAction::Receive:
                consume(node, std::move(p));
                return;
            case FlowAction::Drop:
                drop(node, p, "rule_drop", &DropCounts::rule_drop);
                return;
            case FlowAction::Forward: {
                const NodeId next = entry->next_hop;
                if (next < 0 || !topo_.are_neighbors(node, next)) {
                    drop(node, p, "broken_link", &DropCounts::broken_link);
                    return;
                }
                p.ttl -= 1;
                if (p.ttl <= 0) {
                    drop(node, p, "ttl", &DropCounts::ttl);
                    return;
                }
                physical_tx(node, next, std::move(p));
                return;
            }
        }
    }

    void consume(NodeId node, Packet&& p) {
        cls(p).consumed += 1;
        record(node, "consume", p.kind, "");
        switch (p.kind) {
            case PacketKind::Data:
                if (!p.bogus && node == topo_.data_sink && p.cohort_window >= 0)
                    tally_.data_delivered[static_cast<std::size_t>(p.cohort_window)] += 1;
                break;
            case PacketKind::Management:
                break;
            case PacketKind::FlowRequest:
                if (node == topo_.controller) controller_handle_request(p);
                break;
            case PacketKind::NeighborReport:
                if (node == topo_.controller) controller_handle_report(std::move(p));
                break;
            case PacketKind::FlowSetup:
                install_setup(node, p);
                break;
            case PacketKind::FlowIdRegister:
                if (node == topo_.controller) controller_handle_register(p);
                break;
            case PacketKind::Ack:
                break;
        }
    }

    // ----- node behaviors ---------------------------------------------------

    std::int64_t next_period_us(double period_s) {
        const double j = cfg_.traffic.timer_jitter;
        double factor = 1.0;
        if (j > 0.0) factor += j * (2.0 * traffic_rng_.uniform() - 1.0);
        return static_cast<std::int64_t>(to_us(period_s) * factor);
    }

    void emit_periodic(NodeId node, PacketKind kind) {
        if (now_ >= duration_us_) return;  // stop the timer chain
        Packet p;
        p.kind = kind;
        p.src = node;
        p.dst = kind == PacketKind::Data ? topo_.data_sink : topo_.mgmt_sink;
        p.flow = kind == PacketKind::Data ? kFlowData : kFlowMgmt;
        p.ttl = cfg_.ttl;
        p.size_bytes = kHeaderBytes + cfg_.traffic.payload_bytes;
        p.created_us = now_;
        const int w = window_of(now_);
        if (kind == PacketKind::Data && w < n_windows_) {
            p.cohort_window = w;
            tally_.data_sent[static_cast<std::size_t>(w)] += 1;
        }
        originate(node, std::move(p));
        const double period = kind == PacketKind::Data ? cfg_.traffic.data_period_s
                                                       : cfg_.traffic.mgmt_period_s;
        schedule(now_ + next_period_us(period),
                 kind == PacketKind::Data ? EvType::EmitData : EvType::EmitMgmt, node);
    }

    void emit_report(NodeId node, bool event_triggered) {
        if (now_ >= duration_us_) return;
        Packet p;
        p.kind = PacketKind::NeighborReport;
        p.src = node;
        p.dst = topo_.controller;
        p.flow = kFlowController;
        p.ttl = cfg_.ttl;
        p.created_us = now_;
        p.reporter = node;
        const auto& ns = topo_.neighbors[static_cast<std::size_t>(node)];
        const auto& metrics = link_metric_[static_cast<std::size_t>(node)];
        for (std::size_t i = 0; i < ns.size(); ++i) p.report_entries.push_back({ns[i], metrics[i]});
        p.size_bytes = kHeaderBytes + 4 * static_cast<int>(ns.size());
        last_reported_[static_cast<std::size_t>(node)] = metrics;
        originate(node, std::move(p));
        if (!event_triggered)
            schedule(now_ + next_period_us(cfg_.traffic.report_period_s), EvType::EmitReport, node);
    }

    void refresh_metrics(NodeId node) {
        if (now_ >= duration_us_) return;
        const double j = cfg_.traffic.link_metric_jitter;
        auto& metrics = link_metric_[static_cast<std::size_t>(node)];
        bool significant = false;
        const auto& reported = last_reported_[static_cast<std::size_t>(node)];
        for (std::size_t i = 0; i < metrics.size(); ++i) {
            metrics[i] = 1.0 + j * (2.0 * traffic_rng_.uniform() - 1.0);
            if (std::fabs(metrics[i] - reported[i]) / reported[i] >= cfg_.report_change_threshold)
                significant = true;
        }
        if (significant) emit_report(node, /*event_triggered=*/true);
        schedule(now_ + next_period_us(cfg_.traffic.mgmt_period_s), EvType::MetricRefresh, node);
    }

    void emit_bogus(NodeId node) {
        if (now_ >= duration_us_) return;
        // One data packet with a fresh unknown flow id to each radio neighbor.
        for (NodeId v : topo_.neighbors[static_cast<std::size_t>(node)]) {
            Packet p;
            p.kind = PacketKind::Data;
            p.src = node;
            p.dst = -1;
            p.flow = kFirstDynamicFlow +
                     static_cast<FlowId>(attack_rng_.uniform_int(0, (1 << 29) - 1));
            p.ttl = cfg_.ttl;
            p.size_bytes = kHeaderBytes + cfg_.traffic.payload_bytes;
            p.created_us = now_;
            p.bogus = true;
            cls(p).originated += 1;
            cur_node_[static_cast<std::size_t>(node)].proc_us += proc_us_;
            record(node, "emit", p.kind, "bogus");
            physical_tx(node, v, std::move(p));
        }
        schedule(now_ + next_period_us(cfg_.attack.bogus_flow_period_s), EvType::EmitBogus, node);
    }

    void send_flow_request(NodeId node, FlowId flow) {
        if (node == topo_.controller) {
            // The controller resolves its own misses locally.
            FlowTableEntry e;
            e.match_flow = flow;
            e.action = FlowAction::Drop;
            install_entry(node, e);
            return;
        }
        // Table-miss throttling: at most one request per interval per node.
        auto& last = last_request_us_[static_cast<std::size_t>(node)];
        const auto min_gap = to_us(cfg_.request_min_interval_s);
        if (min_gap > 0 && last >= 0 && now_ - last < min_gap) {
            ++counters_.suppressed_requests;
            return;
        }
        last = now_;
        Packet p;
        p.kind = PacketKind::FlowRequest;
        p.src = node;
        p.dst = topo_.controller;
        p.flow = kFlowController;
        p.ttl = cfg_.ttl;
        p.size_bytes = kHeaderBytes + 4;
        p.created_us = now_;
        p.requested_flow = flow;
        originate(node, std::move(p));
    }

    void install_setup(NodeId node, const Packet& p) {
        FlowTableEntry e;
        e.match_flow = p.setup_flow;
        e.action = p.setup_action;
        e.next_hop = p.setup_next_hop;
        install_entry(node, e);
    }

    void install_entry(NodeId node, FlowTableEntry e) {
        e.installed_seq = seq_++;
        auto& table = tables_[static_cast<std::size_t>(node)];
        FlowTableEntry* existing =
            e.match_flow >= 0 ? table.find_flow(e.match_flow) : table.find_addr(e.match_addr);
        if (existing != nullptr) {
            *existing = e;
            record(node, "install", PacketKind::FlowSetup, "replace");
            return;
        }
        table.entries.push_back(e);
        record(node, "install", PacketKind::FlowSetup, "new");
        if (static_cast<int>(table.entries.size()) > cfg_.flow_table_capacity) {
            // Evict the least-used entry, oldest first on ties.
            std::size_t victim = 0;
            for (std::size_t i = 1; i < table.entries.size(); ++i) {
                const auto& a = table.entries[i];
                const auto& b = table.entries[victim];
                if (a.usage < b.usage ||
                    (a.usage == b.usage && a.installed_seq < b.installed_seq))
                    victim = i;
            }
            table.entries.erase(table.entries.begin() + static_cast<std::ptrdiff_t>(victim));
            record(node, "evict", PacketKind::FlowSetup, "table_full");
        }
    }

    // ----- controller -------------------------------------------------------

    void ensure_trees() {
        if (trees_valid_) return;
        // Union view: an edge exists when either endpoint claims it; the
        // weight averages the claimed metrics when both sides report.
        std::map<std::pair<NodeId, NodeId>, std::pair<double, int>> edges;
        for (NodeId u = 0; u < n_; ++u) {
            for (const auto& entry : claimed_[static_cast<std::size_t>(u)]) {
                const NodeId v = entry.neighbor;
                if (v < 0 || v >= n_ || v == u) continue;
                const auto key = std::minmax(u, v);
                auto& [sum, cnt] = edges[{key.first, key.second}];
                sum += entry.metric;
                cnt += 1;
            }
        }
        WeightedGraph g(static_cast<std::size_t>(n_));
        for (const auto& [key, val] : edges) {
            const double w = val.first / val.second;
            g[static_cast<std::size_t>(key.first)].push_back({key.second, w});
            g[static_cast<std::size_t>(key.second)].push_back({key.first, w});
        }
        view_trees_[0] = shortest_path_tree(g, topo_.controller);
        view_trees_[1] = shortest_path_tree(g, topo_.data_sink);
        view_trees_[2] = shortest_path_tree(g, topo_.mgmt_sink);
        trees_valid_ = true;
    }

    // Controller-to-node path from the controller's view of the network.
    std::optional<std::vector<NodeId>> view_path_to(NodeId target) {
        ensure_trees();
        std::vector<NodeId> rev{target};
        NodeId cur = target;
        while (cur != topo_.controller) {
            const NodeId nh = view_trees_[0].next_hop[static_cast<std::size_t>(cur)];
            if (nh < 0 || static_cast<int>(rev.size()) > n_) return std::nullopt;
            rev.push_back(nh);
            cur = nh;
        }
        std::reverse(rev.begin(), rev.end());
        return rev;
    }

    void controller_send(Packet&& p) {
        schedule(now_ + service_us_, EvType::CtrlSend, topo_.controller, -1, std::move(p));
    }

    void controller_handle_request(const Packet& req) {
        const FlowId f = req.requested_flow;
        const NodeId requester = req.src;
        if (requester == topo_.controller) return;
        auto path = view_path_to(requester);
        if (!path) {
            ++counters_.unroutable_replies;
            record(topo_.controller, "reply_unroutable", PacketKind::FlowSetup, "");
            return;
        }
        Packet p;
        p.kind = PacketKind::FlowSetup;
        p.src = topo_.controller;
        p.dst = requester;
        p.ttl = cfg_.ttl;
        p.size_bytes = kHeaderBytes + 8;
        p.source_route = std::move(*path);
        p.setup_flow = f;
        const auto reg = registered_.find(f);
        if (reg == registered_.end()) {
            p.setup_action = FlowAction::Drop;  // unknown flow: block it at the edge
        } else {
            ensure_trees();
            const std::size_t tree =
                f == kFlowController ? 0 : (f == kFlowData ? 1 : 2);
            const NodeId nh = view_trees_[tree].next_hop[static_cast<std::size_t>(requester)];
            if (requester == reg->second) {
                p.setup_action = FlowAction::Receive;
            } else if (nh < 0) {
                ++counters_.unroutable_replies;
                return;
            } else {
                p.setup_action = FlowAction::Forward;
                p.setup_next_hop = nh;
                if (f >= 0 && f < 3)
                    pushed_next_[static_cast<std::size_t>(requester)]
                                [static_cast<std::size_t>(f)] = nh;
            }
        }
        controller_send(std::move(p));
    }

    void controller_handle_report(Packet&& rep) {
        if (rep.tampered) ++counters_.tampered_reports;
        claimed_[static_cast<std::size_t>(rep.reporter)] = std::move(rep.report_entries);
        trees_valid_ = false;
        ++counters_.controller_recomputes;
        push_route_changes();

        // Acknowledge the report.
        if (auto path = view_path_to(rep.reporter)) {
            Packet ack;
            ack.kind = PacketKind::Ack;
            ack.src = topo_.controller;
            ack.dst = rep.reporter;
            ack.ttl = cfg_.ttl;
            ack.size_bytes = kHeaderBytes;
            ack.source_route = std::move(*path);
            controller_send(std::move(ack));
        } else {
            ++counters_.unroutable_replies;
        }
    }

    void controller_handle_register(const Packet& reg) {
        registered_[reg.register_flow] = reg.register_owner;
        if (auto path = view_path_to(reg.src)) {
            Packet ack;
            ack.kind = PacketKind::Ack;
            ack.src = topo_.controller;
            ack.dst = reg.src;
            ack.ttl = cfg_.ttl;
            ack.size_bytes = kHeaderBytes;
            ack.source_route = std::move(*path);
            controller_send(std::move(ack));
        }
    }

    void push_route_changes() {
        ensure_trees();
        for (NodeId u = 0; u < n_; ++u) {
            for (int f = 0; f < 3; ++f) {
                const NodeId dest = registered_[f];
                if (u == dest || u == topo_.controller) continue;
                const NodeId want = view_trees_[static_cast<std::size_t>(f)]
                                        .next_hop[static_cast<std::size_t>(u)];
                if (want < 0) continue;  // unreachable in view: leave the stale rule
                auto& pushed = pushed_next_[static_cast<std::size_t>(u)][static_cast<std::size_t>(f)];
                if (want == pushed) continue;
                auto path = view_path_to(u);
                if (!path) {
                    ++counters_.unroutable_replies;
                    continue;
                }
                Packet p;
                p.kind = PacketKind::FlowSetup;
                p.src = topo_.controller;
                p.dst = u;
                p.ttl = cfg_.ttl;
                p.size_bytes = kHeaderBytes + 8;
                p.source_route = std::move(*path);
                p.setup_flow = f;
                p.setup_action = FlowAction::Forward;
                p.setup_next_hop = want;
                pushed = want;
                ++counters_.setups_pushed;
                controller_send(std::move(p));
            }
        }
    }

    // ----- attacks ----------------------------------------------------------

    void fni_tamper(NodeId attacker, Packet& p) {
        if (p.report_entries.empty()) return;
        p.tampered = true;
        const auto idx = static_cast<std::size_t>(
            attack_rng_.uniform_int(0, static_cast<std::int64_t>(p.report_entries.size()) - 1));
        if (cfg_.attack.tamper_mode == TamperMode::Metric) {
            p.report_entries[idx].metric = attack_rng_.uniform(1.0, 10.0);
            record(attacker, "tamper", PacketKind::NeighborReport, "metric");
        } else {
            p.report_entries[idx].neighbor =
                static_cast<NodeId>(attack_rng_.uniform_int(0, n_ - 1));
            record(attacker, "tamper", PacketKind::NeighborReport, "node_id");
        }
    }

    // ----- members ----------------------------------------------------------

    SimConfig cfg_;
    Topology topo_;
    int n_ = 0;
    std::int64_t duration_us_ = 0, window_us_ = 0, hop_delay_us_ = 0, service_us_ = 0,
                 proc_us_ = 0, attack_start_us_ = 0;
    int n_windows_ = 0;

    std::vector<Role> roles_;
    std::vector<NodeId> attackers_;
    std::vector<FlowTable> tables_;
    std::vector<std::int64_t> last_request_us_;
    std::vector<std::vector<double>> link_metric_;
    std::vector<std::vector<double>> last_reported_;

    std::vector<std::vector<NeighborEntry>> claimed_;
    std::array<RouteTree, 3> view_trees_;
    bool trees_valid_ = false;
    std::vector<std::array<NodeId, 3>> pushed_next_;
    std::map<FlowId, NodeId> registered_;

    std::priority_queue<Ev, std::vector<Ev>, EvAfter> queue_;
    long seq_ = 0;
    Rng traffic_rng_, loss_rng_, attack_rng_;
    std::int64_t now_ = 0;

    WindowTally tally_;
    int cur_window_ = 0;
    std::vector<NodeWindow> cur_node_;
    std::vector<std::vector<std::pair<NodeId, int>>> cur_exch_;
    long cur_ctrl_tx_ = 0;

    TraceCounters counters_;
    std::vector<EventRecord> events_;
};

}  // namespace

RunOutput run(const SimConfig& config, std::uint64_t seed) {
    Engine engine(config, seed);
    return engine.execute();
}

}  // namespace sdnids::sim
