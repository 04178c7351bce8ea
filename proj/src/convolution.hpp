#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace rcm::detail {

// Square grid of N x N nodes at center + (i - (N-1)/2) * step.
struct GridGeometry {
    std::size_t n = 0;
    double step = 0.0;
    double center_x = 0.0;
    double center_y = 0.0;

    double node_x(std::size_t i) const { return center_x + (static_cast<double>(i) - half()) * step; }
    double node_y(std::size_t j) const { return center_y + (static_cast<double>(j) - half()) * step; }
    double half() const { return 0.5 * static_cast<double>(n - 1); }
    double cell_area() const { return step * step; }
};

using GridFunction = std::vector<double>; // row-major, index i * n + j (i along x)

// Tabulates f(x, y) on the grid, optionally averaged over sub x sub points per cell.
GridFunction tabulate(const GridGeometry& g, const std::function<double(double, double)>& f, int sub);

// Linear (non-periodic) convolution on the grid with a radial kernel h(|d|):
// out(a) = sum_b in(b) h(a - b) * cell_area. The kernel transform is computed
// once and reused.
class RadialConvolver {
public:
    RadialConvolver(const GridGeometry& g, const std::function<double(double)>& kernel, int sub);
    ~RadialConvolver();
    RadialConvolver(const RadialConvolver&) = delete;
    RadialConvolver& operator=(const RadialConvolver&) = delete;

    GridFunction apply(const GridFunction& in) const;
    const GridGeometry& geometry() const { return geom_; }

private:
    struct Plans;
    GridGeometry geom_;
    std::size_t m_ = 0; // padded transform size per axis
    std::vector<std::complex<double>> kernel_hat_;
    std::unique_ptr<Plans> plans_;
};

double weighted_sum(const GridGeometry& g, const GridFunction& a);

} // namespace rcm::detail
