#include <map>
#include <random>

#include "doctest.h"
#include "rcm/errors.hpp"
#include "rcm/path_enum.hpp"

using namespace rcm;

namespace {

std::vector<Point> dummy_points(int n) {
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i) pts.push_back({static_cast<double>(i), 0.0});
    return pts;
}

GraphRealization complete_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) e.emplace_back(u, v);
    return GraphRealization::from_edges(dummy_points(n), e);
}

// Random realization with at most `max_others` non-anchor points.
GraphRealization small_instance(std::mt19937_64& rng, std::uint64_t rep, int max_others) {
    std::uniform_real_distribution<double> rho(0.3, 1.5), beta(0.3, 3.0), r(0.0, 1.5);
    for (;;) {
        auto p = make_params(rho(rng), ConnectionSpec::rayleigh(beta(rng)), r(rng), 3);
        p.margin = 0.8;
        auto pts = sample_conditioned_ppp(p, 77, rep);
        if (static_cast<int>(pts.size()) - 2 <= max_others) return realize_graph(pts, p.connection, 77, rep);
        ++rep;
    }
}

// Class counts from vertex-position multiplicities instead of pairwise comparison:
// same-position sharing = sum c(c-1) per position, opposite = 2 sum c1 c2 minus swaps.
PairStructureCounts classes_by_counting(const std::vector<ThreeHopPath>& paths) {
    std::map<int, std::uint64_t> first, second;
    std::map<ThreeHopPath, int> present;
    for (auto [a, b] : paths) {
        ++first[a];
        ++second[b];
        present[{a, b}] = 1;
    }
    PairStructureCounts c;
    c.sigma21 = paths.size();
    for (auto [a, b] : paths) c.sigma22 += present.count({b, a});
    for (auto [v, n] : first) c.sigma11 += n * (n - 1);
    for (auto [v, n] : second) c.sigma11 += n * (n - 1);
    std::uint64_t cross = 0;
    for (auto [v, n] : first) {
        auto it = second.find(v);
        if (it != second.end()) cross += n * it->second;
    }
    c.sigma12 = 2 * cross - 2 * c.sigma22;
    const std::uint64_t total = paths.size() * paths.size();
    c.sigma0 = total - c.sigma11 - c.sigma12 - c.sigma21 - c.sigma22;
    return c;
}

} // namespace

TEST_CASE("hand-built graphs") {
    // x - a - b - y with x=0, y=1, a=2, b=3.
    const auto path = GraphRealization::from_edges(dummy_points(4), {{0, 2}, {2, 3}, {3, 1}});
    CHECK(count_khop_paths(path, 3).count == 1);
    CHECK(count_khop_paths_oracle(path, 3).count == 1);
    CHECK(count_khop_paths(path, 2).count == 0);
    CHECK(count_khop_paths(path, 1).count == 0);

    CHECK(count_khop_paths(complete_graph(4), 3).count == 2);
    CHECK(count_khop_paths(complete_graph(5), 3).count == 6);
    CHECK(count_khop_paths_oracle(complete_graph(5), 3).count == 6);
    CHECK(count_khop_paths(complete_graph(5), 1).count == 1);
    // k = 4 on K5: all 3! orderings of the three intermediates.
    CHECK(count_khop_paths(complete_graph(5), 4).count == 6);

    const auto empty = GraphRealization::from_edges(dummy_points(6), {});
    for (int k = 1; k <= 5; ++k) {
        CHECK(count_khop_paths(empty, k).count == 0);
        CHECK(count_khop_paths_oracle(empty, k).count == 0);
    }
    CHECK_THROWS_AS(count_khop_paths(path, 0), ValidationError);
}

TEST_CASE("too few intermediate points means no k-hop path") {
    const auto k4 = complete_graph(4);
    CHECK(count_khop_paths(k4, 4).count == 0);
    CHECK(count_khop_paths_oracle(k4, 4).count == 0);
    CHECK(count_khop_paths(k4, 5).count == 0);
}

TEST_CASE("oracle refuses large instances") {
    CHECK_THROWS_AS(count_khop_paths_oracle(complete_graph(2 + kOracleMaxPoints + 1), 3), InstanceTooLarge);
    CHECK_NOTHROW(count_khop_paths_oracle(complete_graph(2 + kOracleMaxPoints), 2));
}

TEST_CASE("DFS agrees with brute force on random small realizations") {
    std::mt19937_64 rng(2024);
    int nonzero = 0;
    for (std::uint64_t rep = 0; rep < 1000; ++rep) {
        const auto g = small_instance(rng, rep * 1000, 8);
        for (int k = 1; k <= 4; ++k) {
            const auto fast = count_khop_paths(g, k);
            REQUIRE(fast == count_khop_paths_oracle(g, k));
            nonzero += fast.count > 0 ? 1 : 0;
        }
    }
    CHECK(nonzero > 100);
}

TEST_CASE("pair classification examples") {
    const auto single = GraphRealization::from_edges(dummy_points(4), {{0, 2}, {2, 3}, {3, 1}});
    CHECK(classify_pair_structures(single) == PairStructureCounts{0, 0, 0, 1, 0});

    // Both intermediates shared: self-pairs plus the swapped pair.
    CHECK(classify_pair_structures(complete_graph(4)) == PairStructureCounts{0, 0, 0, 2, 2});

    // x-a-b-y and x-c-d-y share nothing.
    const auto disjoint =
        GraphRealization::from_edges(dummy_points(6), {{0, 2}, {2, 3}, {3, 1}, {0, 4}, {4, 5}, {5, 1}});
    CHECK(classify_pair_structures(disjoint) == PairStructureCounts{2, 0, 0, 2, 0});

    // x-a-b-y and x-a-c-y share a as first hop.
    const auto same_pos =
        GraphRealization::from_edges(dummy_points(5), {{0, 2}, {2, 3}, {3, 1}, {2, 4}, {4, 1}});
    CHECK(classify_pair_structures(same_pos) == PairStructureCounts{0, 2, 0, 2, 0});

    // x-a-b-y and x-c-a-y share a at opposite positions.
    const auto opposite =
        GraphRealization::from_edges(dummy_points(5), {{0, 2}, {2, 3}, {3, 1}, {0, 4}, {4, 2}, {2, 1}});
    const auto paths = list_threehop_paths(opposite);
    CHECK(paths.size() == 2);
    CHECK(classify_pairs(paths) == PairStructureCounts{0, 0, 2, 2, 0});
}

TEST_CASE("pair classes decompose sigma_3 squared on random realizations") {
    const auto p = make_params(1.0, ConnectionSpec::rayleigh(1.0), 1.0, 3);
    for (std::uint64_t rep = 0; rep < 2000; ++rep) {
        const auto pts = sample_conditioned_ppp(p, 31, rep);
        const LazyGraph g(pts, p.connection, {31, rep});
        const auto sigma = count_khop_paths(g, 3).count;
        const auto paths = list_threehop_paths(g);
        REQUIRE(paths.size() == sigma);
        const auto c = classify_pairs(paths);
        REQUIRE(c.total() == sigma * sigma);
        REQUIRE(c.sigma21 == sigma);
        REQUIRE(c.sigma11 % 2 == 0);
        REQUIRE(c.sigma12 % 2 == 0);
        REQUIRE(c.sigma22 % 2 == 0);
        REQUIRE(c == classes_by_counting(paths));
    }
}

TEST_CASE("adding an edge never removes paths") {
    std::mt19937_64 rng(5);
    for (std::uint64_t rep = 0; rep < 200; ++rep) {
        const auto g = small_instance(rng, rep * 1000 + 7, 8);
        const int n = g.vertex_count();
        std::uniform_int_distribution<int> pick(0, n - 1);
        int u = pick(rng), v = pick(rng);
        if (u == v) continue;
        const auto h = g.with_edge(u, v);
        for (int k = 1; k <= 4; ++k) CHECK(count_khop_paths(h, k).count >= count_khop_paths(g, k).count);
    }
}

TEST_CASE("isolated anchors have no paths") {
    auto g = complete_graph(7);
    std::vector<std::pair<int, int>> e;
    for (auto [u, v] : g.edges()) {
        if (u != 1 && v != 1) e.emplace_back(u, v);
    }
    const auto cut = GraphRealization::from_edges(g.points(), e);
    for (int k = 1; k <= 5; ++k) CHECK(count_khop_paths(cut, k).count == 0);
}

TEST_CASE("path listing matches the count") {
    const auto p = make_params(2.0, ConnectionSpec::rayleigh(1.0), 1.0, 4);
    const auto pts = sample_conditioned_ppp(p, 9, 0);
    const auto g = realize_graph(pts, p.connection, 9, 0);
    for (int k = 1; k <= 4; ++k) {
        const auto paths = list_khop_paths(g, k);
        CHECK(paths.size() == count_khop_paths(g, k).count);
        for (const auto& path : paths) {
            REQUIRE(path.size() == static_cast<std::size_t>(k + 1));
            CHECK(path.front() == kAnchorX);
            CHECK(path.back() == kAnchorY);
            for (std::size_t i = 0; i + 1 < path.size(); ++i) CHECK(g.adjacent(path[i], path[i + 1]));
        }
    }
}
