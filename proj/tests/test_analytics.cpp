#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rcm/analytics.hpp"
#include "rcm/errors.hpp"

using namespace rcm;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Area of the lens between two unit-radius... general radius disks at distance d.
double lens_area(double radius, double d) {
    if (d >= 2 * radius) return 0.0;
    return 2 * radius * radius * std::acos(d / (2 * radius)) - 0.5 * d * std::sqrt(4 * radius * radius - d * d);
}

struct Disk {
    double cx, cy, r;
};

// Midpoint rule in theta after t = a + (b-a)(1-cos theta)/2, which removes the
// square-root behaviour of chord lengths at the ends of [a, b].
template <class F>
double cosine_quadrature(double a, double b, int n, F f) {
    if (!(b > a)) return 0.0;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double th = (i + 0.5) * kPi / n;
        const double t = a + 0.5 * (b - a) * (1 - std::cos(th));
        acc += f(t) * 0.5 * (b - a) * std::sin(th);
    }
    return acc * kPi / n;
}

// Length of the vertical chord of the intersection of the disks at abscissa t.
double chord(const std::vector<Disk>& disks, double t, double& lo, double& hi) {
    lo = -INFINITY;
    hi = INFINITY;
    for (const auto& d : disks) {
        const double dx = t - d.cx;
        if (std::abs(dx) > d.r) return 0.0;
        const double h = std::sqrt(d.r * d.r - dx * dx);
        lo = std::max(lo, d.cy - h);
        hi = std::min(hi, d.cy + h);
    }
    return std::max(0.0, hi - lo);
}

double intersection_area(const std::vector<Disk>& disks, int n) {
    double a = -INFINITY, b = INFINITY;
    for (const auto& d : disks) {
        a = std::max(a, d.cx - d.r);
        b = std::min(b, d.cx + d.r);
    }
    double lo, hi;
    return cosine_quadrature(a, b, n, [&](double t) { return chord(disks, t, lo, hi); });
}

// Hard disk radius 1: sigma22 = rho^2 * integral over Z in the lens of area(lens ∩ B(Z, 1)).
double hard_disk_sigma22_oracle(double rho, double d) {
    const std::vector<Disk> lens{{0, 0, 1}, {d, 0, 1}};
    const int n_outer = 240, n_inner = 1200;
    const double total = cosine_quadrature(d - 1, 1, n_outer, [&](double t) {
        double lo, hi;
        if (chord(lens, t, lo, hi) <= 0.0) return 0.0;
        double acc = 0.0;
        for (int j = 0; j < n_outer; ++j) {
            const double s = lo + (j + 0.5) * (hi - lo) / n_outer;
            acc += intersection_area({{0, 0, 1}, {d, 0, 1}, {t, s, 1}}, n_inner);
        }
        return acc * (hi - lo) / n_outer;
    });
    return rho * rho * total;
}

QuadratureSpec refined(QuadratureSpec q) {
    q.grid_step /= 2.0;
    return q;
}

} // namespace

TEST_CASE("closed-form mean") {
    const auto fig = make_params(1.0, ConnectionSpec::rayleigh(1.0), 1.0, 3);
    const double m = mean_khop_rayleigh(fig);
    CHECK(m == doctest::Approx(2.3572935254524655).epsilon(1e-14));
    CHECK(std::round(m * 100) / 100 == doctest::Approx(2.36));

    CHECK(mean_khop_rayleigh(make_params(3.7, ConnectionSpec::rayleigh(1.0), 2.0, 1)) ==
          doctest::Approx(std::exp(-4.0)).epsilon(1e-14));
    CHECK(mean_khop_rayleigh(make_params(1.0, ConnectionSpec::rayleigh(1.0), 0.0, 2)) ==
          doctest::Approx(kPi / 2).epsilon(1e-14));
    // The k = 2 line of the derivation: (rho pi / 2 beta) exp(-beta r^2 / 2).
    CHECK(mean_khop_rayleigh(make_params(1.3, ConnectionSpec::rayleigh(0.8), 1.7, 2)) ==
          doctest::Approx(1.3 * kPi / 1.6 * std::exp(-0.8 * 1.7 * 1.7 / 2)).epsilon(1e-14));
}

TEST_CASE("closed forms refuse unsupported parameters") {
    CHECK_THROWS_AS(mean_khop_rayleigh(make_params(1.0, ConnectionSpec::rayleigh(1.0, 3.0), 1.0, 3)),
                    UnsupportedClosedForm);
    CHECK_THROWS_AS(mean_khop_rayleigh(make_params(1.0, ConnectionSpec::hard_disk(1.0), 1.0, 3)),
                    UnsupportedClosedForm);
    CHECK_THROWS_AS(variance_threehop_rayleigh(make_params(1.0, ConnectionSpec::rayleigh(1.0), 1.0, 2)),
                    UnsupportedClosedForm);
}

TEST_CASE("closed-form variance and its four terms") {
    const auto fig = make_params(1.0, ConnectionSpec::rayleigh(1.0), 1.0, 3);
    const auto v = variance_threehop_rayleigh(fig);
    REQUIRE(v.variance);
    REQUIRE(v.terms);
    // Frozen from an independent 20-digit evaluation of each exponential term.
    CHECK(v.terms->sigma11 == doctest::Approx(4.7015643625336728).epsilon(1e-13));
    CHECK(v.terms->sigma12 == doctest::Approx(2.4410546714678899).epsilon(1e-13));
    CHECK(v.terms->sigma22 == doctest::Approx(0.45385306895699512).epsilon(1e-13));
    CHECK(v.terms->sigma21 == doctest::Approx(2.3572935254524655).epsilon(1e-13));
    CHECK(*v.variance == doctest::Approx(9.9537656284110233).epsilon(1e-13));
    CHECK(std::round(*v.variance * 100) / 100 == doctest::Approx(9.95));
    CHECK(*v.variance == doctest::Approx(v.mean + v.terms->sigma11 + v.terms->sigma12 + v.terms->sigma22));

    const auto far = variance_threehop_rayleigh(make_params(1.0, ConnectionSpec::rayleigh(1.0), 10.0, 3));
    CHECK(*far.variance / far.mean - 1.0 < 1e-6);
}

TEST_CASE("mean scales as rho^(k-1)") {
    for (int k = 1; k <= 6; ++k) {
        const double a = mean_khop_rayleigh(make_params(0.7, ConnectionSpec::rayleigh(1.3), 1.1, k));
        const double b = mean_khop_rayleigh(make_params(1.4, ConnectionSpec::rayleigh(1.3), 1.1, k));
        CHECK(b / a == doctest::Approx(std::pow(2.0, k - 1)).epsilon(1e-12));
    }
}

TEST_CASE("variance is at least the mean for random parameters") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.01, 6.0);
    for (int i = 0; i < 1000; ++i) {
        const auto v = variance_threehop_rayleigh(make_params(u(rng), ConnectionSpec::rayleigh(u(rng)), u(rng), 3));
        CHECK(v.mean >= 0.0);
        CHECK(*v.variance >= v.mean);
    }
}

TEST_CASE("grid quadrature reproduces the closed-form mean") {
    const auto p3 = make_params(1.0, ConnectionSpec::rayleigh(1.0), 1.0, 3);
    CHECK(rel(mean_khop_numeric(p3, QuadratureSpec::defaults_for(p3)), mean_khop_rayleigh(p3)) < 1e-3);

    const auto p2 = make_params(1.0, ConnectionSpec::rayleigh(1.0), 1.0, 2);
    CHECK(mean_khop_numeric(p2, QuadratureSpec::defaults_for(p2)) ==
          doctest::Approx(kPi / 2 * std::exp(-0.5)).epsilon(1e-3));
    CHECK(mean_khop_numeric(p2, QuadratureSpec::defaults_for(p2)) == doctest::Approx(0.9527).epsilon(1e-4));

    const auto p1 = make_params(1.0, ConnectionSpec::rayleigh(1.0), 1.5, 1);
    CHECK(mean_khop_numeric(p1, QuadratureSpec::defaults_for(p1)) == doctest::Approx(std::exp(-2.25)));
}

TEST_CASE("hard disk two-hop mean is rho times the lens area") {
    for (double r : {0.0, 0.5, 1.0, 1.7}) {
        const auto p = make_params(1.3, ConnectionSpec::hard_disk(1.0), r, 2);
        const double numeric = mean_khop_numeric(p, QuadratureSpec::defaults_for(p));
        CHECK(rel(numeric, 1.3 * lens_area(1.0, r)) < 1e-3);
    }
    const auto apart = make_params(1.0, ConnectionSpec::hard_disk(1.0), 2.5, 2);
    CHECK(mean_khop_numeric(apart, QuadratureSpec::defaults_for(apart)) == 0.0);
}

TEST_CASE("numeric variance terms match the closed forms") {
    for (double r : {0.5, 1.0, 2.0}) {
        const auto p = make_params(1.0, ConnectionSpec::rayleigh(1.0), r, 3);
        const auto num = variance_terms_numeric(p, QuadratureSpec::defaults_for(p));
        const auto cf = variance_threehop_rayleigh(p);
        CHECK(rel(num.mean, cf.mean) < 1e-3);
        CHECK(rel(num.terms->sigma11, cf.terms->sigma11) < 1e-3);
        CHECK(rel(num.terms->sigma12, cf.terms->sigma12) < 1e-3);
        CHECK(rel(num.terms->sigma21, cf.terms->sigma21) < 1e-3);
        CHECK(rel(num.terms->sigma22, cf.terms->sigma22) < 1e-3);
        CHECK(rel(*num.variance, *cf.variance) < 1e-3);
    }
}

TEST_CASE("hard disk sigma22 against chord geometry and a finer grid") {
    const auto p = make_params(1.0, ConnectionSpec::hard_disk(1.0), 0.5, 3);
    const auto q = QuadratureSpec::defaults_for(p);
    const double grid = variance_terms_numeric(p, q).terms->sigma22;
    const double fine = variance_terms_numeric(p, refined(q)).terms->sigma22;
    const double oracle = hard_disk_sigma22_oracle(1.0, 0.5);
    MESSAGE("grid " << grid << " fine " << fine << " chord oracle " << oracle);
    CHECK(rel(grid, oracle) < 1e-3);
    CHECK(rel(grid, fine) < 1e-3);
}

TEST_CASE("terms vanish when the anchors are out of reach") {
    const auto hd = make_params(1.0, ConnectionSpec::hard_disk(1.0), 3.5, 3);
    const auto v = variance_terms_numeric(hd, QuadratureSpec::defaults_for(hd));
    CHECK(std::abs(v.mean) < 1e-12);
    CHECK(std::abs(v.terms->sigma11) < 1e-12);
    CHECK(std::abs(v.terms->sigma12) < 1e-12);
    CHECK(std::abs(v.terms->sigma22) < 1e-12);

    const auto ray = make_params(1.0, ConnectionSpec::rayleigh(1.0), 8.0, 3);
    const auto w = variance_terms_numeric(ray, QuadratureSpec::defaults_for(ray));
    CHECK(*w.variance < 1e-8);
}

TEST_CASE("halving the grid step changes results by less than the tolerance") {
    for (const auto& spec : {ConnectionSpec::rayleigh(1.0), ConnectionSpec::rayleigh(0.5, 3.0),
                             ConnectionSpec::hard_disk(1.0),
                             ConnectionSpec::tabulated({{0.25, 1.0}, {1.0, 0.6}, {1.5, 0.0}})}) {
        const auto p = make_params(1.0, spec, 1.0, 3);
        const auto q = QuadratureSpec::defaults_for(p);
        const auto a = variance_terms_numeric(p, q);
        const auto b = variance_terms_numeric(p, refined(q));
        CHECK(rel(a.mean, b.mean) < 1e-3);
        CHECK(rel(*a.variance, *b.variance) < 1e-3);
    }
}

TEST_CASE("Monte Carlo quadrature agrees with the other routes") {
    const auto p = make_params(1.0, ConnectionSpec::rayleigh(1.0), 1.0, 4);
    auto q = QuadratureSpec::defaults_for(p);
    q.method = QuadratureMethod::MonteCarlo;
    q.mc_samples = 200'000;
    q.rng_seed = 3;
    const auto mc = mean_khop_quadrature(p, q);
    CHECK(std::abs(mc.value - mean_khop_rayleigh(p)) < 4 * mc.standard_error);
    CHECK(mc.standard_error < 0.02 * mc.value);

    const auto hd = make_params(1.0, ConnectionSpec::hard_disk(1.0), 1.0, 3);
    auto qh = QuadratureSpec::defaults_for(hd);
    const double grid = mean_khop_numeric(hd, qh);
    qh.method = QuadratureMethod::MonteCarlo;
    qh.mc_samples = 400'000;
    const auto mch = mean_khop_quadrature(hd, qh);
    CHECK(std::abs(mch.value - grid) < 4 * mch.standard_error);

    const auto v3 = make_params(1.0, ConnectionSpec::rayleigh(1.0), 1.0, 3);
    auto qv = QuadratureSpec::defaults_for(v3);
    qv.method = QuadratureMethod::MonteCarlo;
    qv.mc_samples = 400'000;
    const auto est = variance_terms_quadrature(v3, qv);
    const auto cf = variance_threehop_rayleigh(v3);
    CHECK(std::abs(est.moments.mean - cf.mean) < 4 * est.mean_standard_error);
    CHECK(std::abs(est.moments.terms->sigma11 - cf.terms->sigma11) < 4 * est.standard_errors.sigma11);
    CHECK(std::abs(est.moments.terms->sigma12 - cf.terms->sigma12) < 4 * est.standard_errors.sigma12);
    CHECK(std::abs(est.moments.terms->sigma22 - cf.terms->sigma22) < 4 * est.standard_errors.sigma22);
}

TEST_CASE("quadrature configuration errors") {
    const auto p = make_params(1.0, ConnectionSpec::rayleigh(1.0), 1.0, 3);
    auto q = QuadratureSpec::defaults_for(p);
    CHECK(q.grid_extent >= 5.0);

    auto uneven = q;
    uneven.grid_step = 0.3;
    uneven.grid_extent = 1.0;
    CHECK_THROWS_AS(mean_khop_numeric(p, uneven), ValidationError);

    auto coarse = q;
    coarse.grid_step = 0.5;
    coarse.grid_extent = 8.0;
    coarse.strict = true;
    CHECK_THROWS_AS(mean_khop_numeric(p, coarse), ValidationError);
    coarse.strict = false;
    CHECK_NOTHROW(mean_khop_numeric(p, coarse));

    CHECK_THROWS_AS(quadrature_method_from_string("simpson"), ValidationError);
}
