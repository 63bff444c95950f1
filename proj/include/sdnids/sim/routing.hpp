#pragma once

#include <map>
#include <utility>
#include <vector>

#include "sdnids/sim/packet.hpp"
#include "sdnids/sim/topology.hpp"

namespace sdnids::sim {

class RoutingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Weighted adjacency: per node, (neighbor, link metric) pairs.
using WeightedGraph = std::vector<std::vector<std::pair<NodeId, double>>>;

WeightedGraph unit_graph(const Topology& topo);

// Shortest-path next hop from every node toward `dest` (Dijkstra). Equal-cost
// choices resolve to the smaller next-hop id. Entry for `dest` itself is -1;
// unreachable nodes are -1 with `reachable` false.
struct RouteTree {
    std::vector<NodeId> next_hop;
    std::vector<double> distance;
    std::vector<bool> reachable;
};

RouteTree shortest_path_tree(const WeightedGraph& graph, NodeId dest);

struct FlowTable {
    std::vector<FlowTableEntry> entries;

    FlowTableEntry* find_flow(FlowId flow);
    FlowTableEntry* find_addr(NodeId addr);
    const FlowTableEntry* find_flow(FlowId flow) const;
};

// Seeds every node's flow table with hop-count shortest routes toward the
// controller and the two sinks, plus a Receive entry for the node's own
// address. Throws RoutingError naming the first node that cannot reach one
// of the three destinations.
std::map<NodeId, FlowTable> compute_routes(const Topology& topo, const WeightedGraph& graph);

inline std::map<NodeId, FlowTable> compute_routes(const Topology& topo) {
    return compute_routes(topo, unit_graph(topo));
}

}  // namespace sdnids::sim
