#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rcm/model.hpp"
#include "rcm/random.hpp"

namespace rcm {

inline constexpr int kAnchorX = 0;
inline constexpr int kAnchorY = 1;

// Anchors followed by a Poisson(rho * area) number of uniform points in the
// sampling region. Deterministic in (seed, replication).
std::vector<Point> sample_conditioned_ppp(const ModelParams& params, std::uint64_t seed,
                                          std::uint64_t replication);

// Same, over an explicit region that must contain both anchors.
std::vector<Point> sample_conditioned_ppp(double rho, double anchor_distance, const Region& region,
                                          ReplicationKey key);

// Whether the pair {i,j} at distance d is joined in the replication `key`.
inline bool edge_present(const ConnectionSpec& spec, const ReplicationKey& key, int i, int j, double d) {
    if (i == j) return false;
    const double p = evaluate_connection(spec, d);
    if (p <= 0.0) return false;
    return key.pair_uniform(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)) < p;
}

struct RealizeOptions {
    // Skip pairs with H(d) below 1e-12. Changes the realization with
    // probability at most 1e-12 per skipped pair; keep off for oracle tests.
    bool distance_cutoff = false;
};

class GraphRealization {
public:
    GraphRealization() = default;
    GraphRealization(std::vector<Point> points, std::vector<std::vector<int>> adjacency,
                     ReplicationKey key);

    // Builds a graph from an explicit edge list (hand-made test fixtures).
    static GraphRealization from_edges(std::vector<Point> points,
                                       const std::vector<std::pair<int, int>>& edges,
                                       ReplicationKey key = {});

    const std::vector<Point>& points() const { return points_; }
    int vertex_count() const { return static_cast<int>(points_.size()); }
    std::span<const int> neighbors(int v) const { return adjacency_[static_cast<std::size_t>(v)]; }
    bool adjacent(int u, int v) const;
    std::size_t edge_count() const;
    std::vector<std::pair<int, int>> edges() const;
    const ReplicationKey& seed_info() const { return key_; }

    // Returns a copy with the undirected edge {u,v} added.
    GraphRealization with_edge(int u, int v) const;

private:
    std::vector<Point> points_;
    std::vector<std::vector<int>> adjacency_; // sorted, symmetric
    ReplicationKey key_;
};

// Draws every pair independently with probability H(dist); O(n^2).
GraphRealization realize_graph(std::vector<Point> points, const ConnectionSpec& spec, std::uint64_t seed,
                               std::uint64_t replication, RealizeOptions options = {});

// The same random graph as realize_graph, but with edges drawn only when
// asked for. Path enumeration from the anchors touches a handful of
// neighbourhoods, so this avoids the quadratic pair sweep.
//
// An optional mask removes vertices without renumbering the others, which is
// how a realization is restricted to a sub-region with identical edge draws.
// Not thread-safe: one instance per replication.
class LazyGraph {
public:
    LazyGraph(std::span<const Point> points, const ConnectionSpec& spec, ReplicationKey key,
              std::vector<bool> active = {});

    int vertex_count() const { return static_cast<int>(points_.size()); }
    const std::vector<int>& neighbors(int v) const;
    bool adjacent(int u, int v) const;
    bool active(int v) const { return active_.empty() || active_[static_cast<std::size_t>(v)]; }

private:
    std::span<const Point> points_;
    ConnectionSpec spec_;
    ReplicationKey key_;
    std::vector<bool> active_;
    mutable std::vector<std::vector<int>> cache_;
    mutable std::vector<bool> cached_;
};

} // namespace rcm
