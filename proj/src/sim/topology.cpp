#include "sdnids/sim/topology.hpp"

#include <algorithm>
#include <cmath>

#include "sdnids/common/rng.hpp"

namespace sdnids::sim {

bool Topology::are_neighbors(NodeId a, NodeId b) const {
    const auto& ns = neighbors[static_cast<std::size_t>(a)];
    return std::binary_search(ns.begin(), ns.end(), b);
}

Topology build_grid(int side, double spacing, double radio_radius) {
    if (side < 3) throw std::invalid_argument("build_grid: side must be >= 3");
    if (!(spacing > 0.0) || !(radio_radius > 0.0))
        throw std::invalid_argument("build_grid: spacing and radio_radius must be positive");

    Topology t;
    t.side = side;
    t.spacing = spacing;
    t.radio_radius = radio_radius;
    const int n = side * side;
    t.positions.reserve(static_cast<std::size_t>(n));
    for (int row = 0; row < side; ++row)
        for (int col = 0; col < side; ++col)
            t.positions.push_back({col * spacing, row * spacing});

    // Controller on the cell closest to the geometric center, lower id on ties.
    const double c = (side - 1) / 2.0;
    double best = 1e300;
    for (int id = 0; id < n; ++id) {
        const int row = id / side, col = id % side;
        const double d2 = (row - c) * (row - c) + (col - c) * (col - c);
        if (d2 < best - 1e-12) {
            best = d2;
            t.controller = id;
        }
    }

    // Sinks on adjacent cells in the middle of the bottom edge.
    const int bottom = side - 1;
    const int mid = (side - 1) / 2;
    t.data_sink = bottom * side + mid;
    t.mgmt_sink = bottom * side + mid + 1;

    // Unit-disk neighborhoods; radius measured in multiples of the spacing.
    const double r2 = radio_radius * radio_radius * spacing * spacing;
    t.neighbors.assign(static_cast<std::size_t>(n), {});
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            const double dx = t.positions[a].x - t.positions[b].x;
            const double dy = t.positions[a].y - t.positions[b].y;
            if (dx * dx + dy * dy <= r2 + 1e-9) {
                t.neighbors[static_cast<std::size_t>(a)].push_back(b);
                t.neighbors[static_cast<std::size_t>(b)].push_back(a);
            }
        }
    }
    for (auto& ns : t.neighbors) std::sort(ns.begin(), ns.end());
    return t;
}

std::vector<NodeId> place_attackers(const Topology& topo, double fraction, std::uint64_t seed) {
    if (fraction < 0.0 || fraction > 1.0)
        throw std::invalid_argument("place_attackers: fraction must lie in [0, 1]");
    if (fraction == 0.0) return {};

    const int n = topo.node_count();
    const int want = std::max(1, static_cast<int>(std::floor(fraction * n)));

    std::vector<NodeId> candidates;
    for (NodeId id = 0; id < n; ++id)
        if (!topo.is_infrastructure(id)) candidates.push_back(id);

    Rng rng(mix_seed(seed, 0xa77acull));
    for (int attempt = 0; attempt < 200; ++attempt) {
        auto pool = candidates;
        for (std::size_t i = pool.size(); i > 1; --i)
            std::swap(pool[i - 1], pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
        std::vector<NodeId> picked;
        for (NodeId cand : pool) {
            bool ok = true;
            for (NodeId a : picked)
                if (topo.are_neighbors(cand, a)) {
                    ok = false;
                    break;
                }
            if (ok) {
                picked.push_back(cand);
                if (static_cast<int>(picked.size()) == want) {
                    std::sort(picked.begin(), picked.end());
                    return picked;
                }
            }
        }
    }
    throw PlacementError("place_attackers: could not place " + std::to_string(want) +
                         " non-adjacent attackers");
}

}  // namespace sdnids::sim
