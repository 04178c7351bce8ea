#include "rcm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rcm/errors.hpp"

namespace rcm {

std::vector<Point> sample_conditioned_ppp(double rho, double anchor_distance, const Region& region,
                                          ReplicationKey key) {
    region.validate();
    if (!(rho > 0.0)) throw ValidationError("sampler: rho must be positive");
    const Point x{0.0, 0.0};
    const Point y{anchor_distance, 0.0};
    if (!region.contains(x) || !region.contains(y)) {
        throw ValidationError("sampler: region must contain both anchors");
    }

    std::mt19937_64 count_engine(key.stream_seed(Stream::PointCount));
    std::poisson_distribution<long long> count_dist(rho * region.area());
    const auto n = static_cast<std::size_t>(count_dist(count_engine));

    std::vector<Point> points;
    points.reserve(n + 2);
    points.push_back(x);
    points.push_back(y);

    const std::uint64_t pos_seed = key.stream_seed(Stream::PointPosition);
    const double w = region.width();
    const double h = region.height();
    for (std::size_t i = 0; i < n; ++i) {
        const double u = to_unit(hash_words({pos_seed, i, 0}));
        const double v = to_unit(hash_words({pos_seed, i, 1}));
        points.push_back({region.min_corner.x + u * w, region.min_corner.y + v * h});
    }
    return points;
}

std::vector<Point> sample_conditioned_ppp(const ModelParams& params, std::uint64_t seed,
                                          std::uint64_t replication) {
    params.validate();
    return sample_conditioned_ppp(params.rho, params.anchor_distance, sampling_region(params),
                                  ReplicationKey{seed, replication});
}

GraphRealization::GraphRealization(std::vector<Point> points, std::vector<std::vector<int>> adjacency,
                                   ReplicationKey key)
    : points_(std::move(points)), adjacency_(std::move(adjacency)), key_(key) {
    adjacency_.resize(points_.size());
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

GraphRealization GraphRealization::from_edges(std::vector<Point> points,
                                              const std::vector<std::pair<int, int>>& edges,
                                              ReplicationKey key) {
    const int n = static_cast<int>(points.size());
    std::vector<std::vector<int>> adj(points.size());
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n || u == v) {
            throw ValidationError("graph: edge references an invalid vertex or is a self-loop");
        }
        auto& nu = adj[static_cast<std::size_t>(u)];
        if (std::find(nu.begin(), nu.end(), v) != nu.end()) continue;
        nu.push_back(v);
        adj[static_cast<std::size_t>(v)].push_back(u);
    }
    return GraphRealization(std::move(points), std::move(adj), key);
}

bool GraphRealization::adjacent(int u, int v) const {
    const auto& nbrs = adjacency_[static_cast<std::size_t>(u)];
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::size_t GraphRealization::edge_count() const {
    std::size_t twice = 0;
    for (const auto& nbrs : adjacency_) twice += nbrs.size();
    return twice / 2;
}

std::vector<std::pair<int, int>> GraphRealization::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < vertex_count(); ++u) {
        for (int v : neighbors(u)) {
            if (u < v) out.emplace_back(u, v);
        }
    }
    return out;
}

GraphRealization GraphRealization::with_edge(int u, int v) const {
    auto e = edges();
    e.emplace_back(u, v);
    return from_edges(points_, e, key_);
}

GraphRealization realize_graph(std::vector<Point> points, const ConnectionSpec& spec, std::uint64_t seed,
                               std::uint64_t replication, RealizeOptions options) {
    spec.validate();
    if (points.size() < 2) throw ValidationError("realize_graph: need at least the two anchors");
    const ReplicationKey key{seed, replication};
    const double cutoff = options.distance_cutoff ? spec.effective_range(1e-12) : INFINITY;

    const int n = static_cast<int>(points.size());
    std::vector<std::vector<int>> adj(points.size());
    for (int i = 0; i < n; ++i) {
        const Point& pi = points[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) {
            const Point& pj = points[static_cast<std::size_t>(j)];
            if (std::abs(pi.x - pj.x) > cutoff || std::abs(pi.y - pj.y) > cutoff) continue;
            const double d = distance(pi, pj);
            if (d > cutoff) continue;
            if (edge_present(spec, key, i, j, d)) {
                adj[static_cast<std::size_t>(i)].push_back(j);
                adj[static_cast<std::size_t>(j)].push_back(i);
            }
        }
    }
    return GraphRealization(std::move(points), std::move(adj), key);
}

LazyGraph::LazyGraph(std::span<const Point> points, const ConnectionSpec& spec, ReplicationKey key,
                     std::vector<bool> active)
    : points_(points), spec_(spec), key_(key), active_(std::move(active)), cache_(points.size()),
      cached_(points.size(), false) {
    spec_.validate();
    if (!active_.empty() && active_.size() != points_.size()) {
        throw ValidationError("lazy graph: mask size does not match the point count");
    }
}

const std::vector<int>& LazyGraph::neighbors(int v) const {
    const auto vi = static_cast<std::size_t>(v);
    if (!cached_[vi]) {
        auto& out = cache_[vi];
        if (active(v)) {
            const Point& pv = points_[vi];
            for (int u = 0; u < vertex_count(); ++u) {
                if (u == v || !active(u)) continue;
                if (edge_present(spec_, key_, u, v, distance(pv, points_[static_cast<std::size_t>(u)]))) {
                    out.push_back(u);
                }
            }
        }
        cached_[vi] = true;
    }
    return cache_[vi];
}

bool LazyGraph::adjacent(int u, int v) const {
    if (u == v || !active(u) || !active(v)) return false;
    return edge_present(spec_, key_, u, v,
                        distance(points_[static_cast<std::size_t>(u)], points_[static_cast<std::size_t>(v)]));
}

} // namespace rcm
