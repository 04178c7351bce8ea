#include <cmath>
#include <set>

#include "doctest.h"
#include "rcm/errors.hpp"
#include "rcm/path_enum.hpp"
#include "rcm/sampler.hpp"

using namespace rcm;

TEST_CASE("vanishing intensity leaves only the anchors") {
    auto p = make_params(1e-12, ConnectionSpec::rayleigh(1.0), 1.0, 3);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto pts = sample_conditioned_ppp(p, seed, 0);
        REQUIRE(pts.size() == 2);
        CHECK(pts[0] == Point{0.0, 0.0});
        CHECK(pts[1] == Point{1.0, 0.0});
    }
}

TEST_CASE("point count is Poisson with mean rho * area") {
    auto p = make_params(2.0, ConnectionSpec::rayleigh(1.0), 1.0, 3);
    p.margin = 5.0; // region [-5,6] x [-5,5], area 110
    const int reps = 10'000;
    double sum = 0.0, sum_sq = 0.0;
    const Region region = sampling_region(p);
    for (int rep = 0; rep < reps; ++rep) {
        const auto pts = sample_conditioned_ppp(p, 99, static_cast<std::uint64_t>(rep));
        for (std::size_t i = 2; i < pts.size(); ++i) REQUIRE(region.contains(pts[i]));
        const double n = static_cast<double>(pts.size() - 2);
        sum += n;
        sum_sq += n * n;
    }
    const double mean = sum / reps;
    const double var = (sum_sq - reps * mean * mean) / (reps - 1);
    const double se = std::sqrt(220.0 / reps);
    CHECK(std::abs(mean + 2.0 - 222.0) < 4.0 * se);
    CHECK(var / mean > 0.95);
    CHECK(var / mean < 1.05);
}

TEST_CASE("sampling is a pure function of (seed, replication)") {
    const auto p = make_params(1.0, ConnectionSpec::rayleigh(1.0), 2.0, 3);
    const auto a = sample_conditioned_ppp(p, 5, 17);
    const auto b = sample_conditioned_ppp(p, 5, 17);
    const auto c = sample_conditioned_ppp(p, 5, 18);
    CHECK(a == b);
    CHECK(a != c);
    CHECK(distance(a[0], a[1]) == doctest::Approx(2.0).epsilon(1e-12));

    const auto ga = realize_graph(a, p.connection, 5, 17);
    const auto gb = realize_graph(b, p.connection, 5, 17);
    CHECK(ga.edges() == gb.edges());
    CHECK(ga.seed_info() == ReplicationKey{5, 17});
}

TEST_CASE("deterministic connection between two anchors") {
    const std::vector<Point> anchors{{0.0, 0.0}, {1.0, 0.0}};
    const auto g = realize_graph(anchors, ConnectionSpec::hard_disk(2.0), 3, 0);
    CHECK(g.adjacent(0, 1));
    CHECK(g.edge_count() == 1);
}

TEST_CASE("rayleigh edge frequency matches H") {
    const std::vector<Point> anchors{{0.0, 0.0}, {1.0, 0.0}};
    const auto spec = ConnectionSpec::rayleigh(1.0);
    const int reps = 100'000;
    int hits = 0;
    for (int rep = 0; rep < reps; ++rep) {
        hits += realize_graph(anchors, spec, 8, static_cast<std::uint64_t>(rep)).adjacent(0, 1) ? 1 : 0;
    }
    const double p = std::exp(-1.0);
    const double se = std::sqrt(p * (1 - p) / reps);
    CHECK(std::abs(static_cast<double>(hits) / reps - p) < 4.0 * se);
}

TEST_CASE("edges of disjoint pairs are uncorrelated") {
    // p = 0.5 for both pairs.
    const double d = std::sqrt(std::log(2.0));
    const std::vector<Point> pts{{0.0, 0.0}, {d, 0.0}, {0.0, 10.0}, {d, 10.0}};
    const auto spec = ConnectionSpec::rayleigh(1.0);
    const int reps = 100'000;
    double sa = 0, sb = 0, sab = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const auto g = realize_graph(pts, spec, 21, static_cast<std::uint64_t>(rep));
        const double a = g.adjacent(0, 1) ? 1.0 : 0.0;
        const double b = g.adjacent(2, 3) ? 1.0 : 0.0;
        sa += a;
        sb += b;
        sab += a * b;
    }
    const double ma = sa / reps, mb = sb / reps;
    const double cov = sab / reps - ma * mb;
    const double corr = cov / std::sqrt(ma * (1 - ma) * mb * (1 - mb));
    CHECK(std::abs(corr) < 0.02);
}

TEST_CASE("realizations are symmetric with no self edges") {
    const auto p = make_params(1.5, ConnectionSpec::rayleigh(0.7), 1.0, 3);
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        const auto g = realize_graph(sample_conditioned_ppp(p, 4, rep), p.connection, 4, rep);
        for (int u = 0; u < g.vertex_count(); ++u) {
            for (int v : g.neighbors(u)) {
                REQUIRE(v >= 0);
                REQUIRE(v < g.vertex_count());
                CHECK(v != u);
                CHECK(g.adjacent(v, u));
            }
        }
    }
}

TEST_CASE("lazy graph draws the same edges as the full realization") {
    const auto p = make_params(1.0, ConnectionSpec::rayleigh(1.0), 1.0, 3);
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
        const auto pts = sample_conditioned_ppp(p, 12, rep);
        const auto full = realize_graph(pts, p.connection, 12, rep);
        const LazyGraph lazy(pts, p.connection, {12, rep});
        for (int v = 0; v < full.vertex_count(); ++v) {
            const auto f = full.neighbors(v);
            const auto& l = lazy.neighbors(v);
            REQUIRE(std::vector<int>(f.begin(), f.end()) == l);
        }
    }
}

TEST_CASE("masked lazy graph drops inactive vertices only") {
    const auto p = make_params(2.0, ConnectionSpec::hard_disk(1.0), 1.0, 2);
    const auto pts = sample_conditioned_ppp(p, 3, 0);
    const auto full = realize_graph(pts, p.connection, 3, 0);
    std::vector<bool> mask(pts.size(), true);
    for (std::size_t i = 2; i < pts.size(); i += 2) mask[i] = false;
    const LazyGraph lazy(pts, p.connection, {3, 0}, mask);
    for (int u = 0; u < full.vertex_count(); ++u) {
        for (int v = 0; v < full.vertex_count(); ++v) {
            const bool expected = full.adjacent(u, v) && mask[static_cast<std::size_t>(u)] && mask[static_cast<std::size_t>(v)];
            REQUIRE(lazy.adjacent(u, v) == expected);
        }
    }
    CHECK_THROWS_AS(LazyGraph(pts, p.connection, {3, 0}, std::vector<bool>(3, true)), ValidationError);
}

TEST_CASE("distance cutoff leaves the realization unchanged in practice") {
    const auto p = make_params(1.0, ConnectionSpec::rayleigh(2.0), 1.0, 3);
    const auto pts = sample_conditioned_ppp(p, 6, 1);
    const auto a = realize_graph(pts, p.connection, 6, 1);
    const auto b = realize_graph(pts, p.connection, 6, 1, {.distance_cutoff = true});
    CHECK(a.edges() == b.edges());
}

TEST_CASE("graph fixtures reject invalid edges") {
    const std::vector<Point> pts{{0, 0}, {1, 0}, {0.5, 0.5}};
    CHECK_THROWS_AS(GraphRealization::from_edges(pts, {{0, 0}}), ValidationError);
    CHECK_THROWS_AS(GraphRealization::from_edges(pts, {{0, 3}}), ValidationError);
    const auto g = GraphRealization::from_edges(pts, {{0, 2}, {2, 0}, {2, 1}});
    CHECK(g.edge_count() == 2);
}
