#include "sdnids/sim/routing.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace sdnids::sim {

const char* packet_kind_name(PacketKind k) {
    switch (k) {
        case PacketKind::Data: return "data";
        case PacketKind::FlowRequest: return "flow_request";
        case PacketKind::FlowSetup: return "flow_setup";
        case PacketKind::FlowIdRegister: return "flow_id_register";
        case PacketKind::Ack: return "ack";
        case PacketKind::NeighborReport: return "neighbor_report";
        case PacketKind::Management: return "management";
    }
    return "?";
}

WeightedGraph unit_graph(const Topology& topo) {
    WeightedGraph g(static_cast<std::size_t>(topo.node_count()));
    for (NodeId a = 0; a < topo.node_count(); ++a)
        for (NodeId b : topo.neighbors[static_cast<std::size_t>(a)])
            g[static_cast<std::size_t>(a)].push_back({b, 1.0});
    return g;
}

RouteTree shortest_path_tree(const WeightedGraph& graph, NodeId dest) {
    const auto n = graph.size();
    RouteTree tree;
    tree.next_hop.assign(n, -1);
    tree.distance.assign(n, std::numeric_limits<double>::infinity());
    tree.reachable.assign(n, false);

    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    tree.distance[static_cast<std::size_t>(dest)] = 0.0;
    heap.push({0.0, dest});
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > tree.distance[static_cast<std::size_t>(u)]) continue;
        tree.reachable[static_cast<std::size_t>(u)] = true;
        for (const auto& [v, w] : graph[static_cast<std::size_t>(u)]) {
            const double nd = d + w;
            if (nd < tree.distance[static_cast<std::size_t>(v)]) {
                tree.distance[static_cast<std::size_t>(v)] = nd;
                heap.push({nd, v});
            }
        }
    }

    // Next hop of u = neighbor minimizing (distance + link weight), smaller
    // id on ties. Selecting after the distance pass keeps the tie rule exact.
    for (std::size_t u = 0; u < n; ++u) {
        if (!tree.reachable[u] || static_cast<NodeId>(u) == dest) continue;
        NodeId best = -1;
        double best_cost = std::numeric_limits<double>::infinity();
        for (const auto& [v, w] : graph[u]) {
            const double cost = tree.distance[static_cast<std::size_t>(v)] + w;
            if (cost < best_cost - 1e-12 || (std::abs(cost - best_cost) <= 1e-12 && v < best)) {
                best_cost = cost;
                best = v;
            }
        }
        tree.next_hop[u] = best;
    }
    return tree;
}

FlowTableEntry* FlowTable::find_flow(FlowId flow) {
    for (auto& e : entries)
        if (e.match_flow == flow && e.match_flow >= 0) return &e;
    return nullptr;
}

const FlowTableEntry* FlowTable::find_flow(FlowId flow) const {
    for (const auto& e : entries)
        if (e.match_flow == flow && e.match_flow >= 0) return &e;
    return nullptr;
}

FlowTableEntry* FlowTable::find_addr(NodeId addr) {
    for (auto& e : entries)
        if (e.match_addr == addr && e.match_addr >= 0) return &e;
    return nullptr;
}

std::map<NodeId, FlowTable> compute_routes(const Topology& topo, const WeightedGraph& graph) {
    struct Dest {
        NodeId node;
        FlowId flow;
    };
    const Dest dests[] = {{topo.controller, kFlowController},
                          {topo.data_sink, kFlowData},
                          {topo.mgmt_sink, kFlowMgmt}};

    std::map<NodeId, FlowTable> tables;
    for (NodeId id = 0; id < topo.node_count(); ++id) {
        FlowTableEntry self;
        self.match_addr = id;
        self.action = FlowAction::Receive;
        tables[id].entries.push_back(self);
    }

    for (const auto& [dest, flow] : dests) {
        const auto tree = shortest_path_tree(graph, dest);
        for (NodeId id = 0; id < topo.node_count(); ++id) {
            FlowTableEntry e;
            e.match_flow = flow;
            if (id == dest) {
                e.action = FlowAction::Receive;
            } else {
                if (!tree.reachable[static_cast<std::size_t>(id)])
                    throw RoutingError("compute_routes: node " + std::to_string(id) +
                                       " cannot reach node " + std::to_string(dest));
                e.action = FlowAction::Forward;
                e.next_hop = tree.next_hop[static_cast<std::size_t>(id)];
            }
            tables[id].entries.push_back(e);
        }
    }
    return tables;
}

}  // namespace sdnids::sim
