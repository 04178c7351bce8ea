#include "rcm/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rcm/errors.hpp"

namespace rcm {

double distance(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

bool Region::contains(const Point& p) const {
    return p.x >= min_corner.x && p.x <= max_corner.x && p.y >= min_corner.y && p.y <= max_corner.y;
}

void Region::validate() const {
    if (!(max_corner.x > min_corner.x) || !(max_corner.y > min_corner.y)) {
        throw ValidationError("region: max_corner must strictly dominate min_corner");
    }
}

std::string_view to_string(ConnectionKind kind) {
    switch (kind) {
    case ConnectionKind::Rayleigh: return "rayleigh";
    case ConnectionKind::HardDisk: return "hard_disk";
    case ConnectionKind::Tabulated: return "tabulated";
    }
    return "unknown";
}

ConnectionKind connection_kind_from_string(std::string_view name) {
    if (name == "rayleigh") return ConnectionKind::Rayleigh;
    if (name == "hard_disk" || name == "harddisk") return ConnectionKind::HardDisk;
    if (name == "tabulated") return ConnectionKind::Tabulated;
    throw ValidationError("unknown connection kind '" + std::string(name) + "'");
}

ConnectionSpec ConnectionSpec::rayleigh(double beta, double eta) {
    ConnectionSpec s;
    s.kind = ConnectionKind::Rayleigh;
    s.beta = beta;
    s.eta = eta;
    s.validate();
    return s;
}

ConnectionSpec ConnectionSpec::hard_disk(double r0) {
    ConnectionSpec s;
    s.kind = ConnectionKind::HardDisk;
    s.r0 = r0;
    s.validate();
    return s;
}

ConnectionSpec ConnectionSpec::tabulated(std::vector<Knot> knots) {
    ConnectionSpec s;
    s.kind = ConnectionKind::Tabulated;
    s.table = std::move(knots);
    s.validate();
    return s;
}

void ConnectionSpec::validate() const {
    switch (kind) {
    case ConnectionKind::Rayleigh:
        if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("connection: beta must be positive");
        if (!(eta > 0.0) || !std::isfinite(eta)) throw ValidationError("connection: eta must be positive");
        break;
    case ConnectionKind::HardDisk:
        if (!(r0 > 0.0) || !std::isfinite(r0)) throw ValidationError("connection: r0 must be positive");
        break;
    case ConnectionKind::Tabulated:
        if (table.empty()) throw ValidationError("connection: tabulated H needs at least one knot");
        for (std::size_t i = 0; i < table.size(); ++i) {
            const auto& kn = table[i];
            if (!std::isfinite(kn.distance) || kn.distance < 0.0) {
                throw ValidationError("connection: knot distances must be finite and nonnegative");
            }
            if (!(kn.probability >= 0.0 && kn.probability <= 1.0)) {
                throw ValidationError("connection: knot probabilities must lie in [0,1]");
            }
            if (i > 0 && !(kn.distance > table[i - 1].distance)) {
                throw ValidationError("connection: knot distances must be strictly increasing");
            }
        }
        break;
    }
}

double ConnectionSpec::effective_range(double threshold) const {
    switch (kind) {
    case ConnectionKind::Rayleigh: return std::pow(-std::log(threshold) / beta, 1.0 / eta);
    case ConnectionKind::HardDisk: return r0;
    case ConnectionKind::Tabulated: return table.back().distance;
    }
    return 0.0;
}

double evaluate_connection(const ConnectionSpec& spec, double r) {
    if (!(r > 0.0)) return 0.0;
    switch (spec.kind) {
    case ConnectionKind::Rayleigh:
        if (spec.eta == 2.0) return std::exp(-spec.beta * r * r);
        return std::exp(-spec.beta * std::pow(r, spec.eta));
    case ConnectionKind::HardDisk:
        return r <= spec.r0 ? 1.0 : 0.0;
    case ConnectionKind::Tabulated: {
        const auto& t = spec.table;
        if (r > t.back().distance) return 0.0;
        if (r <= t.front().distance) return std::clamp(t.front().probability, 0.0, 1.0);
        auto hi = std::lower_bound(t.begin(), t.end(), r,
                                   [](const Knot& kn, double v) { return kn.distance < v; });
        auto lo = std::prev(hi);
        double w = (r - lo->distance) / (hi->distance - lo->distance);
        return std::clamp(lo->probability + w * (hi->probability - lo->probability), 0.0, 1.0);
    }
    }
    return 0.0;
}

void ModelParams::validate() const {
    std::ostringstream bad;
    if (!(rho > 0.0) || !std::isfinite(rho)) bad << " rho";
    if (!(anchor_distance >= 0.0) || !std::isfinite(anchor_distance)) bad << " anchor_distance";
    if (k < 1) bad << " k";
    if (!(margin > 0.0) || !std::isfinite(margin)) bad << " margin";
    if (!bad.str().empty()) throw ValidationError("model params: invalid field(s):" + bad.str());
    connection.validate();
}

double default_margin(const ConnectionSpec& spec, int k) {
    spec.validate();
    const double hops = static_cast<double>(std::max(k, 1));
    switch (spec.kind) {
    case ConnectionKind::Rayleigh:
        if (spec.eta == 2.0) return 5.0 * std::sqrt(hops / spec.beta);
        // H(m) = e^{-25} per hop for general eta.
        return std::pow(25.0 / spec.beta, 1.0 / spec.eta) * std::sqrt(hops);
    case ConnectionKind::HardDisk: return spec.r0 * hops;
    case ConnectionKind::Tabulated: return spec.table.back().distance * hops;
    }
    return 1.0;
}

ModelParams make_params(double rho, ConnectionSpec connection, double anchor_distance, int k) {
    ModelParams p;
    p.rho = rho;
    p.connection = std::move(connection);
    p.anchor_distance = anchor_distance;
    p.k = k;
    p.margin = default_margin(p.connection, k);
    p.validate();
    return p;
}

Region sampling_region(const ModelParams& params) {
    const double m = params.margin;
    Region r{{-m, -m}, {params.anchor_distance + m, m}};
    r.validate();
    return r;
}

} // namespace rcm
