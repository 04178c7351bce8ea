#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "rcm/model.hpp"

namespace rcm {

// Expected counts of each ordered-pair class beyond the disjoint pairs.
struct VarianceTerms {
    double sigma11 = 0.0; // one shared vertex, shared anchor edge
    double sigma12 = 0.0; // one shared vertex, no shared edge
    double sigma21 = 0.0; // self-pairs, equal to the mean
    double sigma22 = 0.0; // both vertices shared, middle edge shared
};

struct AnalyticMoments {
    double mean = 0.0;
    std::optional<double> variance;     // k = 3 only
    std::optional<VarianceTerms> terms; // k = 3 only
};

enum class QuadratureMethod { GridConvolution, MonteCarlo };

std::string_view to_string(QuadratureMethod m);
QuadratureMethod quadrature_method_from_string(std::string_view name);

struct QuadratureSpec {
    QuadratureMethod method = QuadratureMethod::GridConvolution;
    double grid_extent = 10.0; // half-width of the square box around the anchors' midpoint
    double grid_step = 0.05;
    // Cell supersampling per axis when tabulating H on the grid. Values above 1
    // average H over each cell, which helps discontinuous kernels.
    int subsamples = 1;
    std::uint64_t mc_samples = 1'000'000;
    std::uint64_t rng_seed = 0;
    // Treat a too-coarse grid (step above a quarter of the kernel length) as an error.
    bool strict = false;

    void validate() const;

    // Grid sized to the connection function and the anchors (see analytics.cpp).
    static QuadratureSpec defaults_for(const ModelParams& params);
};

// Length scale of H: beta^{-1/eta}, r0, or the last knot distance.
double kernel_length(const ConnectionSpec& spec);

// Rayleigh, eta = 2: (1/k) (rho*pi/beta)^{k-1} exp(-beta r^2 / k).
double mean_khop_rayleigh(const ModelParams& params);

// Rayleigh, eta = 2, k = 3: mean plus the four pair-structure terms.
AnalyticMoments variance_threehop_rayleigh(const ModelParams& params);

struct QuadratureResult {
    double value = 0.0;
    double standard_error = 0.0; // zero for deterministic grid quadrature
};

// rho^{k-1} times the integral of the H-chain x -> z1 -> ... -> z_{k-1} -> y.
double mean_khop_numeric(const ModelParams& params, const QuadratureSpec& quad);
QuadratureResult mean_khop_quadrature(const ModelParams& params, const QuadratureSpec& quad);

struct VarianceTermsEstimate {
    AnalyticMoments moments;
    VarianceTerms standard_errors; // Monte Carlo only
    double mean_standard_error = 0.0;
};

// General-H integrals for the k = 3 variance terms; variance = mean + sigma11 + sigma12 + sigma22.
AnalyticMoments variance_terms_numeric(const ModelParams& params, const QuadratureSpec& quad);
VarianceTermsEstimate variance_terms_quadrature(const ModelParams& params, const QuadratureSpec& quad);

} // namespace rcm
