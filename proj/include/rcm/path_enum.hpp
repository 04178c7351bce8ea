#pragma once

#include <concepts>
#include <cstdint>
#include <utility>
#include <vector>

#include "rcm/errors.hpp"
#include "rcm/sampler.hpp"

namespace rcm {

// Anything with indexed vertices, neighbour lists and an adjacency test.
// Vertex 0 is anchor x and vertex 1 is anchor y.
template <class G>
concept AnchoredGraph = requires(const G& g, int u, int v) {
    { g.vertex_count() } -> std::convertible_to<int>;
    { g.adjacent(u, v) } -> std::convertible_to<bool>;
    g.neighbors(u).begin();
    g.neighbors(u).end();
};

struct PathCount {
    int k = 0;
    std::uint64_t count = 0;

    friend bool operator==(const PathCount&, const PathCount&) = default;
};

// Ordered pairs of 3-hop paths split by how the two paths intersect.
struct PairStructureCounts {
    std::uint64_t sigma0 = 0;  // no shared intermediate vertex
    std::uint64_t sigma11 = 0; // one shared vertex, same position (shares an anchor edge)
    std::uint64_t sigma12 = 0; // one shared vertex, opposite positions (no shared edge)
    std::uint64_t sigma21 = 0; // the path paired with itself
    std::uint64_t sigma22 = 0; // same vertex set, intermediates swapped (shares the middle edge)

    std::uint64_t total() const { return sigma0 + sigma11 + sigma12 + sigma21 + sigma22; }

    friend bool operator==(const PairStructureCounts&, const PairStructureCounts&) = default;
};

// Intermediate vertices (z1, z2) of a path x - z1 - z2 - y.
using ThreeHopPath = std::pair<int, int>;

namespace detail {

template <AnchoredGraph G>
std::uint64_t extend_paths(const G& g, int v, int hops_left, std::vector<char>& visited) {
    if (hops_left == 1) return g.adjacent(v, kAnchorY) ? 1 : 0;
    std::uint64_t total = 0;
    for (int u : g.neighbors(v)) {
        if (u == kAnchorY || visited[static_cast<std::size_t>(u)]) continue;
        visited[static_cast<std::size_t>(u)] = 1;
        total += extend_paths(g, u, hops_left - 1, visited);
        visited[static_cast<std::size_t>(u)] = 0;
    }
    return total;
}

} // namespace detail

// Number of simple paths x = z0, z1, ..., zk = y. Depth-bounded DFS from x;
// y is only accepted as the final vertex.
template <AnchoredGraph G>
PathCount count_khop_paths(const G& g, int k) {
    if (k < 1) throw ValidationError("count_khop_paths: k must be at least 1");
    std::vector<char> visited(static_cast<std::size_t>(g.vertex_count()), 0);
    visited[kAnchorX] = 1;
    return {k, detail::extend_paths(g, kAnchorX, k, visited)};
}

template <AnchoredGraph G>
std::vector<ThreeHopPath> list_threehop_paths(const G& g) {
    std::vector<ThreeHopPath> paths;
    for (int a : g.neighbors(kAnchorX)) {
        if (a == kAnchorY) continue;
        for (int b : g.neighbors(a)) {
            if (b == kAnchorX || b == kAnchorY) continue;
            if (g.adjacent(b, kAnchorY)) paths.emplace_back(a, b);
        }
    }
    return paths;
}

// Classifies every ordered pair (P, Q) of the given 3-hop paths.
PairStructureCounts classify_pairs(const std::vector<ThreeHopPath>& paths);

template <AnchoredGraph G>
PairStructureCounts classify_pair_structures(const G& g) {
    return classify_pairs(list_threehop_paths(g));
}

// Brute force over all ordered (k-1)-tuples of distinct non-anchor vertices.
// Throws InstanceTooLarge above kOracleMaxPoints non-anchor vertices.
inline constexpr int kOracleMaxPoints = 12;
PathCount count_khop_paths_oracle(const GraphRealization& g, int k);

} // namespace rcm

namespace rcm {

// Every k-hop path as its vertex sequence x, z1, ..., y. Intended for
// inspection dumps; the count can be large on dense graphs.
template <AnchoredGraph G>
std::vector<std::vector<int>> list_khop_paths(const G& g, int k) {
    if (k < 1) throw ValidationError("list_khop_paths: k must be at least 1");
    std::vector<std::vector<int>> out;
    std::vector<int> path{kAnchorX};
    std::vector<char> visited(static_cast<std::size_t>(g.vertex_count()), 0);
    visited[kAnchorX] = 1;
    auto walk = [&](auto& self, int v, int hops_left) -> void {
        if (hops_left == 1) {
            if (g.adjacent(v, kAnchorY)) {
                out.push_back(path);
                out.back().push_back(kAnchorY);
            }
            return;
        }
        for (int u : g.neighbors(v)) {
            if (u == kAnchorY || visited[static_cast<std::size_t>(u)]) continue;
            visited[static_cast<std::size_t>(u)] = 1;
            path.push_back(u);
            self(self, u, hops_left - 1);
            path.pop_back();
            visited[static_cast<std::size_t>(u)] = 0;
        }
    };
    walk(walk, kAnchorX, k);
    return out;
}

} // namespace rcm
