#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sdnids::sim {

using NodeId = int;

struct Position {
    double x = 0.0;
    double y = 0.0;
};

enum class Role { Plain, Attacker, Controller, DataSink, MgmtSink };

class PlacementError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Square sensor grid with unit-disk radio neighborhoods.
///
/// Node ids are row * side + col. The controller sits on the center cell
/// (ties toward the lower id) and the two sinks occupy adjacent cells in the
/// middle of the bottom edge.
struct Topology {
    int side = 0;
    double spacing = 0.0;       // meters between adjacent grid cells
    double radio_radius = 0.0;  // radio range in multiples of spacing
    std::vector<Position> positions;
    NodeId controller = -1;
    NodeId data_sink = -1;
    NodeId mgmt_sink = -1;
    std::vector<std::vector<NodeId>> neighbors;  // sorted ascending per node

    int node_count() const { return static_cast<int>(positions.size()); }
    bool are_neighbors(NodeId a, NodeId b) const;
    bool is_infrastructure(NodeId n) const {
        return n == controller || n == data_sink || n == mgmt_sink;
    }
};

// Builds the grid; side must be >= 3 so an interior center exists.
Topology build_grid(int side, double spacing = 50.0, double radio_radius = 1.5);

// Picks floor(fraction * n) attacker nodes (at least one when fraction > 0),
// none adjacent to another and none on controller/sink cells. Deterministic
// per seed; throws PlacementError when the constraints cannot be met.
std::vector<NodeId> place_attackers(const Topology& topo, double fraction, std::uint64_t seed);

}  // namespace sdnids::sim
