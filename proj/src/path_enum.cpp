#include "rcm/path_enum.hpp"

#include "rcm/errors.hpp"

namespace rcm {

PairStructureCounts classify_pairs(const std::vector<ThreeHopPath>& paths) {
    PairStructureCounts out;
    for (const auto& [p1, p2] : paths) {
        for (const auto& [q1, q2] : paths) {
            if (p1 == q1 && p2 == q2) {
                ++out.sigma21;
            } else if (p1 == q2 && p2 == q1) {
                ++out.sigma22;
            } else if (p1 == q1 || p2 == q2) {
                // Exactly one shared vertex: both-shared cases were handled above.
                ++out.sigma11;
            } else if (p1 == q2 || p2 == q1) {
                ++out.sigma12;
            } else {
                ++out.sigma0;
            }
        }
    }
    return out;
}

namespace {

bool is_path(const GraphRealization& g, const std::vector<int>& tuple) {
    int prev = kAnchorX;
    for (int z : tuple) {
        if (!g.adjacent(prev, z)) return false;
        prev = z;
    }
    return g.adjacent(prev, kAnchorY);
}

// Visits every ordered tuple of distinct pool entries; no pruning.
void enumerate_tuples(std::vector<int>& tuple, const std::vector<int>& pool, std::vector<char>& used,
                      std::size_t depth, const GraphRealization& g, std::uint64_t& count) {
    if (depth == tuple.size()) {
        if (is_path(g, tuple)) ++count;
        return;
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (used[i]) continue;
        used[i] = 1;
        tuple[depth] = pool[i];
        enumerate_tuples(tuple, pool, used, depth + 1, g, count);
        used[i] = 0;
    }
}

} // namespace

PathCount count_khop_paths_oracle(const GraphRealization& g, int k) {
    if (k < 1) throw ValidationError("count_khop_paths_oracle: k must be at least 1");
    const int others = g.vertex_count() - 2;
    if (others > kOracleMaxPoints) {
        throw InstanceTooLarge("count_khop_paths_oracle: " + std::to_string(others) +
                               " non-anchor points exceeds the limit of " + std::to_string(kOracleMaxPoints));
    }
    if (k - 1 > others) return {k, 0};

    std::vector<int> pool;
    for (int v = 2; v < g.vertex_count(); ++v) pool.push_back(v);
    std::vector<int> tuple(static_cast<std::size_t>(k - 1));
    std::vector<char> used(pool.size(), 0);
    std::uint64_t count = 0;
    enumerate_tuples(tuple, pool, used, 0, g, count);
    return {k, count};
}

} // namespace rcm
