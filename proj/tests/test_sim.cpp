#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

#include "sdnids/sim/simulator.hpp"

using namespace sdnids::sim;

namespace {

SimConfig desk_config() {
    SimConfig c;
    c.side = 6;
    c.duration_s = 3600.0;
    c.window_s = 120.0;
    c.loss_prob = 0.02;
    c.traffic.report_period_s = 300.0;
    return c;
}

// Independent hop-count oracle.
std::vector<int> bfs_hops(const Topology& t, NodeId dest) {
    std::vector<int> dist(static_cast<std::size_t>(t.node_count()), -1);
    std::deque<NodeId> q{dest};
    dist[static_cast<std::size_t>(dest)] = 0;
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop_front();
        for (NodeId v : t.neighbors[static_cast<std::size_t>(u)])
            if (dist[static_cast<std::size_t>(v)] < 0) {
                dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                q.push_back(v);
            }
    }
    return dist;
}

double mean_of(const std::vector<double>& xs, std::size_t first, std::size_t last) {
    double s = 0.0;
    for (std::size_t i = first; i < last; ++i) s += xs[i];
    return s / static_cast<double>(last - first);
}

}  // namespace

TEST_CASE("grid: counts, roles, neighborhoods") {
    const auto t = build_grid(6);
    CHECK(t.node_count() == 36);
    CHECK(t.controller == 14);  // center cell, lower id on ties
    CHECK(t.data_sink == 32);   // middle of the bottom edge
    CHECK(t.mgmt_sink == 33);

    // Radius 1.5 spacings: interior nodes see all 8 surrounding cells,
    // corners see 3.
    CHECK(t.neighbors[14].size() == 8);
    CHECK(t.neighbors[0].size() == 3);
    CHECK(t.neighbors[5].size() == 3);
    CHECK(t.neighbors[35].size() == 3);

    const auto t10 = build_grid(10);
    CHECK(t10.node_count() == 100);
    CHECK(t10.controller == 44);

    CHECK_THROWS_AS(build_grid(2), std::invalid_argument);
}

TEST_CASE("grid: neighbor relation is symmetric and distance-correct") {
    const auto t = build_grid(6, 50.0, 1.5);
    for (NodeId a = 0; a < t.node_count(); ++a)
        for (NodeId b : t.neighbors[static_cast<std::size_t>(a)]) CHECK(t.are_neighbors(b, a));
    // Enumerate by Euclidean distance as an independent check.
    for (NodeId a = 0; a < t.node_count(); ++a) {
        std::size_t count = 0;
        for (NodeId b = 0; b < t.node_count(); ++b) {
            if (a == b) continue;
            const double dx = t.positions[a].x - t.positions[b].x;
            const double dy = t.positions[a].y - t.positions[b].y;
            if (std::sqrt(dx * dx + dy * dy) <= 1.5 * 50.0 + 1e-9) {
                ++count;
                CHECK(t.are_neighbors(a, b));
            }
        }
        CHECK(t.neighbors[static_cast<std::size_t>(a)].size() == count);
    }
}

TEST_CASE("attacker placement: counts, constraints, determinism") {
    const auto t6 = build_grid(6);
    const auto t10 = build_grid(10);

    const auto a6 = place_attackers(t6, 0.10, 1);
    CHECK(a6.size() == 3);  // floor(0.10 * 36)
    const auto a10 = place_attackers(t10, 0.10, 1);
    CHECK(a10.size() == 10);
    CHECK(place_attackers(t6, 0.05, 1).size() == 1);
    CHECK(place_attackers(t6, 0.20, 1).size() == 7);
    CHECK(place_attackers(t6, 0.0, 1).empty());

    for (const auto& [topo, set] : {std::pair{&t6, &a6}, std::pair{&t10, &a10}}) {
        for (std::size_t i = 0; i < set->size(); ++i) {
            CHECK_FALSE(topo->is_infrastructure((*set)[i]));
            for (std::size_t j = i + 1; j < set->size(); ++j)
                CHECK_FALSE(topo->are_neighbors((*set)[i], (*set)[j]));
        }
    }

    CHECK(place_attackers(t6, 0.10, 42) == place_attackers(t6, 0.10, 42));
    CHECK(place_attackers(t6, 0.10, 42) != place_attackers(t6, 0.10, 43));
}

TEST_CASE("routes: next hops match a BFS oracle with id tie-breaking") {
    const auto t = build_grid(6);
    const auto tables = compute_routes(t);

    const NodeId dests[] = {t.controller, t.data_sink, t.mgmt_sink};
    const FlowId flows[] = {kFlowController, kFlowData, kFlowMgmt};
    for (int i = 0; i < 3; ++i) {
        const auto hops = bfs_hops(t, dests[i]);
        for (NodeId u = 0; u < t.node_count(); ++u) {
            const auto* e = tables.at(u).find_flow(flows[i]);
            REQUIRE(e != nullptr);
            if (u == dests[i]) {
                CHECK(e->action == FlowAction::Receive);
                continue;
            }
            CHECK(e->action == FlowAction::Forward);
            // Next hop is a true neighbor one hop closer...
            CHECK(t.are_neighbors(u, e->next_hop));
            CHECK(hops[static_cast<std::size_t>(e->next_hop)] ==
                  hops[static_cast<std::size_t>(u)] - 1);
            // ...and the smallest-id such neighbor.
            NodeId smallest = -1;
            for (NodeId v : t.neighbors[static_cast<std::size_t>(u)])
                if (hops[static_cast<std::size_t>(v)] == hops[static_cast<std::size_t>(u)] - 1) {
                    smallest = v;
                    break;  // neighbors are sorted ascending
                }
            CHECK(e->next_hop == smallest);
        }
    }

    // One-hop case: a node adjacent to the data sink forwards straight to it.
    const NodeId beside = t.data_sink - 1;
    REQUIRE(t.are_neighbors(beside, t.data_sink));
    CHECK(tables.at(beside).find_flow(kFlowData)->next_hop == t.data_sink);
}

TEST_CASE("routes: disconnected node is reported by name") {
    auto t = build_grid(4);
    t.neighbors[0].clear();  // isolate node 0
    for (auto& ns : t.neighbors) ns.erase(std::remove(ns.begin(), ns.end(), 0), ns.end());
    try {
        compute_routes(t);
        FAIL("expected RoutingError");
    } catch (const RoutingError& e) {
        CHECK(std::string(e.what()).find("node 0") != std::string::npos);
    }
}

TEST_CASE("window metrics: ratio definition and empty-window convention") {
    WindowTally tally;
    tally.node_count = 2;
    tally.window_count = 3;
    tally.data_sent = {100, 0, 40};
    tally.data_delivered = {97, 0, 40};
    tally.ctrl_tx = {5, 7, 0};
    tally.node_windows.assign(3, std::vector<NodeWindow>(2));
    tally.exchanges.per_window.assign(3, {});
    const auto series = window_metrics(tally);
    CHECK(series.windows[0].delivery_rate == doctest::Approx(0.97));
    CHECK(series.windows[1].delivery_rate == doctest::Approx(1.0));  // nothing sent
    CHECK(series.windows[2].delivery_rate == doctest::Approx(1.0));
    CHECK(series.windows[1].ctrl_overhead == 7);
}

TEST_CASE("noiseless steady state: delivery 1.0 and constant overhead") {
    SimConfig c = desk_config();
    c.loss_prob = 0.0;
    c.traffic.timer_jitter = 0.0;
    c.traffic.report_period_s = 120.0;  // aligned periods keep windows identical
    const auto out = run(c, 7);

    REQUIRE(static_cast<int>(out.series.windows.size()) == c.window_count());
    for (const auto& w : out.series.windows) CHECK(w.delivery_rate == 1.0);
    const auto overhead = out.series.overhead();
    for (std::size_t w = 2; w < overhead.size(); ++w) CHECK(overhead[w] == overhead[1]);
    CHECK(overhead[1] > 0.0);

    // Nothing was dropped anywhere.
    CHECK(out.counters.benign_data.drops.total() == 0);
    CHECK(out.counters.control.drops.total() == 0);
    // No forwarding node does less than its own periodic emissions.
    const auto& w5 = out.series.windows[5];
    for (NodeId u = 0; u < 36; ++u) {
        if (out.topology.is_infrastructure(u)) continue;
        CHECK(w5.per_node[static_cast<std::size_t>(u)].tx_us > 0);
    }
}

TEST_CASE("determinism: identical seeds give identical series, different differ") {
    SimConfig c = desk_config();
    const auto a = run(c, 11);
    const auto b = run(c, 11);
    CHECK(a.series.to_csv() == b.series.to_csv());
    CHECK(a.counters.transmissions == b.counters.transmissions);

    const auto d = run(c, 12);
    CHECK(a.series.to_csv() != d.series.to_csv());
}

TEST_CASE("conservation: every packet ends in exactly one bucket") {
    SimConfig c = desk_config();
    c.attack.kind = AttackKind::FDFF;
    c.attack.attackers = {7, 10, 25};
    c.attack.start_time_s = 1200.0;
    const auto out = run(c, 3);

    for (const auto* cc : {&out.counters.benign_data, &out.counters.bogus_data,
                           &out.counters.management, &out.counters.control}) {
        CHECK(cc->in_flight() == 0);
        CHECK(cc->originated == cc->consumed + cc->drops.total());
    }
    CHECK(out.counters.benign_data.originated > 0);
    CHECK(out.counters.bogus_data.originated > 0);
    CHECK(out.counters.control.originated > 0);

    // Network control overhead is exactly the sum of per-node ctrl_tx.
    for (const auto& w : out.series.windows) {
        long sum = 0;
        for (const auto& pn : w.per_node) sum += pn.ctrl_tx;
        CHECK(sum == w.ctrl_overhead);
    }
}

TEST_CASE("fdff: bogus burst per neighbor, silent when disabled") {
    SimConfig c = desk_config();
    c.duration_s = 2400.0;
    c.traffic.timer_jitter = 0.0;  // exact burst counting
    c.attack.kind = AttackKind::FDFF;
    c.attack.attackers = {7};
    c.attack.start_time_s = 1200.0;
    c.attack.bogus_flow_period_s = 30.0;
    const auto out = run(c, 5);

    const auto degree = out.topology.neighbors[7].size();
    CHECK(degree == 8);
    // Bursts at start + phase + k*30s: phase in [0,30) leaves 40 or 41 bursts.
    const long bursts = out.counters.bogus_data.originated / static_cast<long>(degree);
    CHECK(out.counters.bogus_data.originated % static_cast<long>(degree) == 0);
    CHECK(bursts >= 39);
    CHECK(bursts <= 41);
    // Every bogus packet dies in the victim's table (miss or installed drop).
    CHECK(out.counters.bogus_data.consumed == 0);
    CHECK(out.counters.bogus_data.drops.no_rule + out.counters.bogus_data.drops.rule_drop +
              out.counters.bogus_data.drops.loss ==
          out.counters.bogus_data.originated);

    SimConfig none = c;
    none.attack = {};
    const auto quiet = run(none, 5);
    CHECK(quiet.counters.bogus_data.originated == 0);
}

TEST_CASE("fdff: control overhead rises after onset and with more attackers") {
    SimConfig c = desk_config();
    c.duration_s = 4800.0;
    c.attack.kind = AttackKind::FDFF;
    c.attack.start_time_s = 2400.0;  // window 20 of 40

    c.attack.attackers = {7};
    const auto one = run(c, 9);
    const auto overhead = one.series.overhead();
    const double pre = mean_of(overhead, 2, 20);
    const double post = mean_of(overhead, 20, 40);
    CHECK(post >= 1.16 * pre);

    c.attack.attackers = {7, 10, 25};
    const auto three = run(c, 9);
    const double post3 = mean_of(three.series.overhead(), 20, 40);
    CHECK(post3 >= post);
}

TEST_CASE("fni: tampering reaches the controller and hurts delivery") {
    SimConfig c = desk_config();
    c.duration_s = 4800.0;
    c.attack.kind = AttackKind::FNI;
    c.attack.attackers = {7, 9, 25};
    c.attack.start_time_s = 2400.0;
    c.attack.tamper_mode = TamperMode::NodeId;
    const auto fni = run(c, 21);
    CHECK(fni.counters.tampered_reports > 0);
    CHECK(fni.counters.setups_pushed > 0);
    // Phantom next hops produce broken-link drops after onset.
    CHECK(fni.counters.benign_data.drops.broken_link +
              fni.counters.control.drops.broken_link >
          0);

    SimConfig none = c;
    none.attack = {};
    const auto base = run(none, 21);
    const double hurt = mean_of(fni.series.delivery(), 20, 40);
    const double fine = mean_of(base.series.delivery(), 20, 40);
    CHECK(hurt < fine);
    // Pre-onset windows are unaffected by the attack configuration.
    CHECK(mean_of(fni.series.delivery(), 2, 20) ==
          doctest::Approx(mean_of(base.series.delivery(), 2, 20)).epsilon(0.02));
}

TEST_CASE("fni: metric tamper mode detours but keeps routes real") {
    SimConfig c = desk_config();
    c.duration_s = 4800.0;
    c.attack.kind = AttackKind::FNI;
    c.attack.attackers = {7, 9, 25};
    c.attack.start_time_s = 2400.0;
    c.attack.tamper_mode = TamperMode::Metric;
    const auto out = run(c, 30);
    CHECK(out.counters.tampered_reports > 0);
    CHECK(out.counters.setups_pushed > 0);
}

TEST_CASE("ten-hour run shape: 300 windows, onset window 240") {
    SimConfig c;  // paper-scale defaults
    c.attack.kind = AttackKind::FDFF;
    c.attack.attackers = {7, 10, 25};
    CHECK(c.window_count() == 300);
    CHECK(c.attack_start_window() == 240);
}

TEST_CASE("config validation names the offending field") {
    SimConfig c = desk_config();
    c.loss_prob = 1.5;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("loss_prob"), std::invalid_argument);
    c = desk_config();
    c.attack.kind = AttackKind::None;
    c.attack.attackers = {5};
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("attackers"), std::invalid_argument);
    c = desk_config();
    c.attack.kind = AttackKind::FDFF;
    c.attack.fraction = 0.0;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("fraction"), std::invalid_argument);

    // Adjacent explicit attackers are rejected at run time.
    c = desk_config();
    c.attack.kind = AttackKind::FDFF;
    c.attack.attackers = {7, 8};
    CHECK_THROWS_AS(run(c, 1), std::invalid_argument);
}

TEST_CASE("exchange series: totals accumulate and stay neighbor-local") {
    SimConfig c = desk_config();
    c.duration_s = 1200.0;
    const auto out = run(c, 2);
    REQUIRE(out.exchanges.per_window.size() == out.series.windows.size());
    const auto totals = out.exchanges.totals(14, 0, 9);  // controller talks a lot
    CHECK_FALSE(totals.empty());
    long sum = 0;
    for (const auto& [peer, count] : totals) {
        CHECK(out.topology.are_neighbors(14, peer));
        sum += count;
    }
    CHECK(sum > 0);
}

TEST_CASE("event trace: optional, structured, non-empty when enabled") {
    SimConfig c = desk_config();
    c.duration_s = 600.0;
    c.record_trace = true;
    const auto out = run(c, 4);
    CHECK_FALSE(out.events.empty());
    const auto text = events_to_ndjson(out.events);
    CHECK(text.find("\"event\":\"tx\"") != std::string::npos);
    CHECK(text.find("\"packet\":\"neighbor_report\"") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') ==
          static_cast<long>(out.events.size()));

    SimConfig quiet = c;
    quiet.record_trace = false;
    CHECK(run(quiet, 4).events.empty());
}

TEST_CASE("csv export: spec header and full body") {
    SimConfig c = desk_config();
    c.duration_s = 600.0;
    const auto out = run(c, 8);
    const auto csv = out.series.to_csv();
    CHECK(csv.rfind("window,delivery_rate,ctrl_overhead,n0_proc,n0_tx,n0_crx,n0_ctx,n1_proc",
                    0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + c.window_count());
}
