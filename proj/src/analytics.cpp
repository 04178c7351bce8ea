#include "rcm/analytics.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <random>
#include <string>

#include "convolution.hpp"
#include "rcm/errors.hpp"
#include "rcm/random.hpp"

namespace rcm {

namespace {

constexpr double kPi = std::numbers::pi;

void require_closed_form(const ModelParams& params) {
    params.validate();
    if (!params.connection.has_closed_form()) {
        throw UnsupportedClosedForm("closed form needs a Rayleigh connection with eta = 2; use the numeric route");
    }
}

// H inside integrals. The r = 0 convention only removes self-loops; as an
// integrand the zero-distance value is the right limit.
double integrand_h(const ConnectionSpec& spec, double r) {
    if (r > 0.0) return evaluate_connection(spec, r);
    switch (spec.kind) {
    case ConnectionKind::Rayleigh:
    case ConnectionKind::HardDisk: return 1.0;
    case ConnectionKind::Tabulated: return evaluate_connection(spec, spec.table.front().distance);
    }
    return 0.0;
}

double h_between(const ConnectionSpec& spec, double ax, double ay, double bx, double by) {
    const double dx = ax - bx;
    const double dy = ay - by;
    return integrand_h(spec, std::sqrt(dx * dx + dy * dy));
}

void check_coarseness(const ModelParams& params, const QuadratureSpec& quad) {
    const double limit = kernel_length(params.connection) / 4.0;
    if (quad.method != QuadratureMethod::GridConvolution || quad.grid_step <= limit) return;
    const std::string msg = "quadrature: grid_step " + std::to_string(quad.grid_step) +
                            " exceeds a quarter of the kernel length (" + std::to_string(limit) + ")";
    if (quad.strict) throw ValidationError(msg);
    std::cerr << "warning: " << msg << '\n';
}

detail::GridGeometry geometry_for(const ModelParams& params, const QuadratureSpec& quad) {
    detail::GridGeometry g;
    g.step = quad.grid_step;
    g.n = static_cast<std::size_t>(std::llround(2.0 * quad.grid_extent / quad.grid_step)) + 1;
    g.center_x = 0.5 * params.anchor_distance;
    g.center_y = 0.0;
    return g;
}

// Per-axis spread of the Gaussian proposal for intermediate points.
double proposal_sd(const ModelParams& params) {
    return kernel_length(params.connection) * std::sqrt(static_cast<double>(params.k)) +
           0.5 * params.anchor_distance;
}

struct Accumulator {
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
    }
    double mean(double n) const { return sum / n; }
    double standard_error(double n) const {
        if (n < 2) return 0.0;
        const double m = sum / n;
        const double var = std::max(0.0, (sum_sq - n * m * m) / (n - 1));
        return std::sqrt(var / n);
    }
};

} // namespace

std::string_view to_string(QuadratureMethod m) {
    return m == QuadratureMethod::GridConvolution ? "grid_convolution" : "monte_carlo";
}

QuadratureMethod quadrature_method_from_string(std::string_view name) {
    if (name == "grid_convolution") return QuadratureMethod::GridConvolution;
    if (name == "monte_carlo") return QuadratureMethod::MonteCarlo;
    throw ValidationError("unknown quadrature method '" + std::string(name) + "'");
}

void QuadratureSpec::validate() const {
    if (!(grid_step > 0.0) || !(grid_extent > 0.0)) {
        throw ValidationError("quadrature: grid_step and grid_extent must be positive");
    }
    const double cells = 2.0 * grid_extent / grid_step;
    if (std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells)) {
        throw ValidationError("quadrature: grid_step must divide 2 * grid_extent");
    }
    if (subsamples < 1) throw ValidationError("quadrature: subsamples must be at least 1");
    if (mc_samples < 1) throw ValidationError("quadrature: mc_samples must be positive");
}

double kernel_length(const ConnectionSpec& spec) {
    switch (spec.kind) {
    case ConnectionKind::Rayleigh: return std::pow(spec.beta, -1.0 / spec.eta);
    case ConnectionKind::HardDisk: return spec.r0;
    case ConnectionKind::Tabulated: return spec.table.back().distance;
    }
    return 1.0;
}

QuadratureSpec QuadratureSpec::defaults_for(const ModelParams& params) {
    params.validate();
    const auto& c = params.connection;
    const double len = kernel_length(c);
    const double hops = static_cast<double>(params.k);
    QuadratureSpec q;
    double extent = 0.0;
    if (c.kind == ConnectionKind::Rayleigh) {
        // Ten-plus nodes per kernel standard deviation; tails below 1e-10.
        q.grid_step = len / 20.0;
        extent = 6.0 * std::sqrt(hops) * len;
        if (c.eta < 2.0) extent = std::max(extent, std::pow(30.0 / c.beta, 1.0 / c.eta) * std::sqrt(hops));
        q.subsamples = 1;
    } else {
        // Compact support: every intermediate of a path lies within (k/2) * range of an anchor.
        q.grid_step = len / 40.0;
        extent = 0.5 * hops * len + 0.5 * len;
        q.subsamples = 8;
    }
    extent += 0.5 * params.anchor_distance;
    q.grid_extent = std::ceil(extent / q.grid_step) * q.grid_step;
    return q;
}

double mean_khop_rayleigh(const ModelParams& params) {
    require_closed_form(params);
    const double k = params.k;
    const double b = params.connection.beta;
    const double r = params.anchor_distance;
    return (1.0 / k) * std::pow(params.rho * kPi / b, k - 1.0) * std::exp(-b * r * r / k);
}

AnalyticMoments variance_threehop_rayleigh(const ModelParams& params) {
    require_closed_form(params);
    if (params.k != 3) throw UnsupportedClosedForm("variance closed form is only available for k = 3");
    const double b = params.connection.beta;
    const double r2 = params.anchor_distance * params.anchor_distance;
    const double cube = std::pow(kPi * params.rho / b, 3);
    const double square = std::pow(kPi * params.rho / b, 2);

    AnalyticMoments out;
    out.mean = mean_khop_rayleigh(params);
    VarianceTerms t;
    t.sigma11 = cube / 4.0 * std::exp(-b * r2 / 2.0);
    t.sigma12 = cube / 6.0 * std::exp(-3.0 * b * r2 / 4.0);
    t.sigma22 = square / 8.0 * std::exp(-b * r2);
    t.sigma21 = out.mean;
    out.terms = t;
    out.variance = out.mean + t.sigma11 + t.sigma12 + t.sigma22;
    return out;
}

QuadratureResult mean_khop_quadrature(const ModelParams& params, const QuadratureSpec& quad) {
    params.validate();
    quad.validate();
    const auto& spec = params.connection;
    const double r = params.anchor_distance;
    if (params.k == 1) return {evaluate_connection(spec, r), 0.0};
    check_coarseness(params, quad);

    const int k = params.k;
    const double rho_power = std::pow(params.rho, k - 1);

    if (quad.method == QuadratureMethod::GridConvolution) {
        const auto g = geometry_for(params, quad);
        if (k == 2) {
            // Cell-average the product itself: averaging each factor separately is
            // biased where both kernel edges cross a cell (e.g. coincident anchors).
            const auto lens = detail::tabulate(
                g, [&](double zx, double zy) { return h_between(spec, zx, zy, 0.0, 0.0) * h_between(spec, zx, zy, r, 0.0); },
                quad.subsamples);
            return {rho_power * detail::weighted_sum(g, lens), 0.0};
        }
        auto chain = detail::tabulate(g, [&](double zx, double zy) { return h_between(spec, zx, zy, 0.0, 0.0); },
                                      quad.subsamples);
        {
            const detail::RadialConvolver conv(g, [&](double d) { return integrand_h(spec, d); }, quad.subsamples);
            for (int hop = 2; hop < k; ++hop) chain = conv.apply(chain);
        }
        const auto last = detail::tabulate(g, [&](double zx, double zy) { return h_between(spec, zx, zy, r, 0.0); },
                                           quad.subsamples);
        for (std::size_t i = 0; i < chain.size(); ++i) chain[i] *= last[i];
        return {rho_power * detail::weighted_sum(g, chain), 0.0};
    }

    std::mt19937_64 rng(hash_words({quad.rng_seed, static_cast<std::uint64_t>(Stream::Quadrature)}));
    Accumulator acc;
    const auto n = static_cast<double>(quad.mc_samples);
    if (spec.has_closed_form()) {
        // Random walk with per-hop density beta/pi * exp(-beta d^2) = H / (pi/beta):
        // every weight reduces to (pi/beta)^{k-1} H(|z_{k-1} - y|).
        std::normal_distribution<double> step(0.0, std::sqrt(0.5 / spec.beta));
        const double scale = rho_power * std::pow(kPi / spec.beta, k - 1);
        for (std::uint64_t s = 0; s < quad.mc_samples; ++s) {
            double zx = 0.0;
            double zy = 0.0;
            for (int hop = 1; hop < k; ++hop) {
                zx += step(rng);
                zy += step(rng);
            }
            acc.add(scale * h_between(spec, zx, zy, r, 0.0));
        }
    } else {
        const double cx = 0.5 * r;
        const double ext = quad.grid_extent;
        std::uniform_real_distribution<double> ux(cx - ext, cx + ext);
        std::uniform_real_distribution<double> uy(-ext, ext);
        const double box = 4.0 * ext * ext;
        const double scale = rho_power * std::pow(box, k - 1);
        for (std::uint64_t s = 0; s < quad.mc_samples; ++s) {
            double px = 0.0;
            double py = 0.0;
            double w = scale;
            for (int hop = 1; hop < k && w > 0.0; ++hop) {
                const double zx = ux(rng);
                const double zy = uy(rng);
                w *= h_between(spec, px, py, zx, zy);
                px = zx;
                py = zy;
            }
            if (w > 0.0) w *= h_between(spec, px, py, r, 0.0);
            acc.add(w);
        }
    }
    return {acc.mean(n), acc.standard_error(n)};
}

double mean_khop_numeric(const ModelParams& params, const QuadratureSpec& quad) {
    return mean_khop_quadrature(params, quad).value;
}

VarianceTermsEstimate variance_terms_quadrature(const ModelParams& params, const QuadratureSpec& quad) {
    params.validate();
    quad.validate();
    check_coarseness(params, quad);
    const auto& spec = params.connection;
    const double r = params.anchor_distance;
    const double rho = params.rho;

    VarianceTermsEstimate est;
    VarianceTerms t;

    if (quad.method == QuadratureMethod::GridConvolution) {
        const auto g = geometry_for(params, quad);
        const int sub = quad.subsamples;
        const auto phi_x = detail::tabulate(g, [&](double zx, double zy) { return h_between(spec, zx, zy, 0.0, 0.0); }, sub);
        const auto phi_y = detail::tabulate(g, [&](double zx, double zy) { return h_between(spec, zx, zy, r, 0.0); }, sub);
        const detail::RadialConvolver conv(g, [&](double d) { return integrand_h(spec, d); }, sub);

        // Two-hop reach from each anchor: to_y(U) = int H(|U-z|) H(|z-y|) dz.
        const auto to_x = conv.apply(phi_x);
        const auto to_y = conv.apply(phi_y);
        const auto lens = detail::tabulate(
            g, [&](double zx, double zy) { return h_between(spec, zx, zy, 0.0, 0.0) * h_between(spec, zx, zy, r, 0.0); },
            sub);
        const auto lens_conv = conv.apply(lens);

        double mean = 0.0, s11 = 0.0, s12 = 0.0, s22 = 0.0;
        for (std::size_t i = 0; i < lens.size(); ++i) {
            mean += phi_x[i] * to_y[i];
            s11 += phi_x[i] * to_y[i] * to_y[i] + phi_y[i] * to_x[i] * to_x[i];
            s12 += lens[i] * to_x[i] * to_y[i];
            s22 += lens[i] * lens_conv[i];
        }
        const double area = g.cell_area();
        est.moments.mean = rho * rho * mean * area;
        t.sigma11 = rho * rho * rho * s11 * area;
        // Each shared-vertex configuration yields the ordered pairs (P,Q) and (Q,P).
        t.sigma12 = 2.0 * rho * rho * rho * s12 * area;
        t.sigma22 = rho * rho * s22 * area;
    } else {
        // Importance sampling of (U, z, w) from one proposal shared by all terms:
        // centred Gaussian for Rayleigh, uniform box for compactly supported H.
        std::mt19937_64 rng(hash_words({quad.rng_seed, static_cast<std::uint64_t>(Stream::Quadrature), 3}));
        const double cx = 0.5 * r;
        const bool gaussian = spec.kind == ConnectionKind::Rayleigh;
        const double sd = proposal_sd(params);
        const double ext = quad.grid_extent;
        std::normal_distribution<double> normal(0.0, sd);
        std::uniform_real_distribution<double> unit(-ext, ext);
        auto draw = [&](double& px, double& py) -> double {
            if (gaussian) {
                const double dx = normal(rng);
                const double dy = normal(rng);
                px = cx + dx;
                py = dy;
                return std::exp(-(dx * dx + dy * dy) / (2 * sd * sd)) / (2 * kPi * sd * sd);
            }
            px = cx + unit(rng);
            py = unit(rng);
            return 1.0 / (4.0 * ext * ext);
        };
        Accumulator a_mean, a11, a12, a22;
        const auto n = static_cast<double>(quad.mc_samples);
        for (std::uint64_t s = 0; s < quad.mc_samples; ++s) {
            double ux, uy, zx, zy, wx, wy;
            const double qu = draw(ux, uy);
            const double qz = draw(zx, zy);
            const double qw = draw(wx, wy);
            const double xu = h_between(spec, 0, 0, ux, uy), uy_ = h_between(spec, ux, uy, r, 0);
            const double uz = h_between(spec, ux, uy, zx, zy), uw = h_between(spec, ux, uy, wx, wy);
            const double zy_ = h_between(spec, zx, zy, r, 0), wy_ = h_between(spec, wx, wy, r, 0);
            const double xz = h_between(spec, 0, 0, zx, zy), xw = h_between(spec, 0, 0, wx, wy);
            const double q2 = qu * qz;
            const double q3 = q2 * qw;
            a_mean.add(rho * rho * xu * uz * zy_ / q2);
            a11.add(rho * rho * rho * (xu * uz * zy_ * uw * wy_ + uy_ * uz * xz * uw * xw) / q3);
            a12.add(2.0 * rho * rho * rho * xu * uy_ * xz * uz * uw * wy_ / q3);
            // Z = U, W = z: five links x-U, U-z, z-y, x-z, U-y.
            a22.add(rho * rho * xu * uz * zy_ * xz * uy_ / q2);
        }
        est.moments.mean = a_mean.mean(n);
        est.mean_standard_error = a_mean.standard_error(n);
        t.sigma11 = a11.mean(n);
        t.sigma12 = a12.mean(n);
        t.sigma22 = a22.mean(n);
        est.standard_errors.sigma11 = a11.standard_error(n);
        est.standard_errors.sigma12 = a12.standard_error(n);
        est.standard_errors.sigma22 = a22.standard_error(n);
        est.standard_errors.sigma21 = est.mean_standard_error;
    }
    t.sigma21 = est.moments.mean;
    est.moments.terms = t;
    est.moments.variance = est.moments.mean + t.sigma11 + t.sigma12 + t.sigma22;
    return est;
}

AnalyticMoments variance_terms_numeric(const ModelParams& params, const QuadratureSpec& quad) {
    return variance_terms_quadrature(params, quad).moments;
}

} // namespace rcm
