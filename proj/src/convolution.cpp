#include "convolution.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace rcm::detail {

namespace {

// FFTW planning is not thread-safe; execution on distinct arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::size_t fft_friendly_size(std::size_t at_least) {
    for (std::size_t m = at_least;; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2, 3, 5, 7}) {
            while (r % p == 0) r /= p;
        }
        if (r == 1) return m;
    }
}

double cell_average(const std::function<double(double, double)>& f, double cx, double cy, double step, int sub) {
    if (sub <= 1) return f(cx, cy);
    double acc = 0.0;
    for (int a = 0; a < sub; ++a) {
        const double dx = ((a + 0.5) / sub - 0.5) * step;
        for (int b = 0; b < sub; ++b) {
            const double dy = ((b + 0.5) / sub - 0.5) * step;
            acc += f(cx + dx, cy + dy);
        }
    }
    return acc / (sub * sub);
}

} // namespace

GridFunction tabulate(const GridGeometry& g, const std::function<double(double, double)>& f, int sub) {
    GridFunction out(g.n * g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        for (std::size_t j = 0; j < g.n; ++j) {
            out[i * g.n + j] = cell_average(f, g.node_x(i), g.node_y(j), g.step, sub);
        }
    }
    return out;
}

double weighted_sum(const GridGeometry& g, const GridFunction& a) {
    double acc = 0.0;
    for (double v : a) acc += v;
    return acc * g.cell_area();
}

struct RadialConvolver::Plans {
    double* real = nullptr;
    fftw_complex* spectrum = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::mutex exec; // the buffers are shared between calls

    Plans(std::size_t m) {
        std::lock_guard lock(planner_mutex());
        const int mi = static_cast<int>(m);
        real = fftw_alloc_real(m * m);
        spectrum = fftw_alloc_complex(m * (m / 2 + 1));
        forward = fftw_plan_dft_r2c_2d(mi, mi, real, spectrum, FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_2d(mi, mi, spectrum, real, FFTW_ESTIMATE);
    }
    ~Plans() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
        fftw_free(real);
        fftw_free(spectrum);
    }
};

RadialConvolver::RadialConvolver(const GridGeometry& g, const std::function<double(double)>& kernel, int sub)
    : geom_(g), m_(fft_friendly_size(2 * g.n - 1)), plans_(std::make_unique<Plans>(m_)) {
    const std::size_t m = m_;
    const auto n = static_cast<std::ptrdiff_t>(g.n);
    std::fill(plans_->real, plans_->real + m * m, 0.0);
    auto radial = [&](double dx, double dy) { return kernel(std::sqrt(dx * dx + dy * dy)); };
    for (std::ptrdiff_t di = -(n - 1); di <= n - 1; ++di) {
        const std::size_t ii = static_cast<std::size_t>((di + static_cast<std::ptrdiff_t>(m)) % static_cast<std::ptrdiff_t>(m));
        for (std::ptrdiff_t dj = -(n - 1); dj <= n - 1; ++dj) {
            const std::size_t jj =
                static_cast<std::size_t>((dj + static_cast<std::ptrdiff_t>(m)) % static_cast<std::ptrdiff_t>(m));
            plans_->real[ii * m + jj] =
                cell_average(radial, static_cast<double>(di) * g.step, static_cast<double>(dj) * g.step, g.step, sub);
        }
    }
    fftw_execute(plans_->forward);
    const std::size_t spec_size = m * (m / 2 + 1);
    kernel_hat_.resize(spec_size);
    for (std::size_t i = 0; i < spec_size; ++i) {
        kernel_hat_[i] = {plans_->spectrum[i][0], plans_->spectrum[i][1]};
    }
}

RadialConvolver::~RadialConvolver() = default;

GridFunction RadialConvolver::apply(const GridFunction& in) const {
    const std::size_t m = m_;
    const std::size_t n = geom_.n;
    std::lock_guard lock(plans_->exec);
    std::fill(plans_->real, plans_->real + m * m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) plans_->real[i * m + j] = in[i * n + j];
    }
    fftw_execute(plans_->forward);
    const std::size_t spec_size = m * (m / 2 + 1);
    for (std::size_t i = 0; i < spec_size; ++i) {
        const std::complex<double> z{plans_->spectrum[i][0], plans_->spectrum[i][1]};
        const auto prod = z * kernel_hat_[i];
        plans_->spectrum[i][0] = prod.real();
        plans_->spectrum[i][1] = prod.imag();
    }
    fftw_execute(plans_->backward);
    const double scale = geom_.cell_area() / static_cast<double>(m * m);
    GridFunction out(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out[i * n + j] = plans_->real[i * m + j] * scale;
    }
    return out;
}

} // namespace rcm::detail
