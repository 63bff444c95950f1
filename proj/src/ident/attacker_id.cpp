#include "sdnids/ident/attacker_id.hpp"

#include <algorithm>
#include <set>

namespace sdnids::ident {

namespace {

// First alarm per node only.
std::vector<Alarm> dedupe(std::span<const Alarm> alarms) {
    std::vector<Alarm> sorted(alarms.begin(), alarms.end());
    std::sort(sorted.begin(), sorted.end(), [](const Alarm& a, const Alarm& b) {
        if (a.node != b.node) return a.node < b.node;
        return a.window < b.window;
    });
    std::vector<Alarm> out;
    for (const auto& a : sorted)
        if (out.empty() || out.back().node != a.node) out.push_back(a);
    return out;
}

}  // namespace

TallyResult identify_v1(std::span<const Alarm> alarms,
                        const std::vector<std::vector<sim::NodeId>>& neighbors) {
    TallyResult result;
    for (const auto& alarm : dedupe(alarms)) {
        // One tally per distinct suspect per alarming node.
        for (sim::NodeId s : neighbors[static_cast<std::size_t>(alarm.node)])
            result.tally[s] += 1;
    }
    for (const auto& [suspect, votes] : result.tally)
        if (votes == static_cast<int>(neighbors[static_cast<std::size_t>(suspect)].size()))
            result.declared.push_back(suspect);
    return result;
}

ExchangeView ExchangeView::from_series(std::span<const Alarm> alarms,
                                       const sim::ExchangeSeries& exchanges, int depth) {
    ExchangeView view;
    for (const auto& alarm : dedupe(alarms))
        view.per_node[alarm.node] =
            exchanges.totals(alarm.node, alarm.window - depth + 1, alarm.window);
    return view;
}

TallyResult identify_v2(std::span<const Alarm> alarms, const ExchangeView& exchanges,
                        const std::vector<std::vector<sim::NodeId>>& neighbors) {
    TallyResult result;
    for (const auto& alarm : dedupe(alarms)) {
        const auto it = exchanges.per_node.find(alarm.node);
        if (it == exchanges.per_node.end() || it->second.empty()) {
            result.abstained.push_back(alarm.node);
            continue;
        }
        // Nominate the single busiest peer; ties go to the smaller id.
        sim::NodeId suspect = -1;
        long best = -1;
        for (const auto& [peer, count] : it->second)
            if (count > best) {
                best = count;
                suspect = peer;
            }
        result.tally[suspect] += 1;
    }
    for (const auto& [suspect, votes] : result.tally)
        if (votes == static_cast<int>(neighbors[static_cast<std::size_t>(suspect)].size()))
            result.declared.push_back(suspect);
    return result;
}

RegionRanking region_localize(std::span<const GroupAlarm> group_alarms, int attack_window,
                              int horizon, int node_count) {
    RegionRanking ranking;
    ranking.scale_warning = node_count >= 100;
    for (const auto& ga : group_alarms) {
        GroupEvidence e;
        e.group = ga.group;
        e.stop_window = ga.window;
        const double delay = std::max(0, ga.window - attack_window);
        e.one_minus_s = 1.0 - std::min(1.0, delay / static_cast<double>(horizon));
        ranking.ranked.push_back(e);
    }
    std::sort(ranking.ranked.begin(), ranking.ranked.end(),
              [](const GroupEvidence& a, const GroupEvidence& b) {
                  if (a.stop_window != b.stop_window) return a.stop_window < b.stop_window;
                  return a.group < b.group;
              });
    return ranking;
}

}  // namespace sdnids::ident
