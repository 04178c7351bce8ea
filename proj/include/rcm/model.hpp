#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rcm {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b);

// Axis-aligned sampling rectangle.
struct Region {
    Point min_corner;
    Point max_corner;

    double width() const { return max_corner.x - min_corner.x; }
    double height() const { return max_corner.y - min_corner.y; }
    double area() const { return width() * height(); }
    bool contains(const Point& p) const;

    void validate() const;
};

enum class ConnectionKind { Rayleigh, HardDisk, Tabulated };

std::string_view to_string(ConnectionKind kind);
ConnectionKind connection_kind_from_string(std::string_view name);

struct Knot {
    double distance = 0.0;
    double probability = 0.0;

    friend bool operator==(const Knot&, const Knot&) = default;
};

// Connection function H(r): probability that two points at distance r are joined.
struct ConnectionSpec {
    ConnectionKind kind = ConnectionKind::Rayleigh;
    double beta = 1.0; // Rayleigh rate, length^-eta
    double eta = 2.0;  // path-loss exponent
    double r0 = 1.0;   // hard-disk radius
    std::vector<Knot> table;

    static ConnectionSpec rayleigh(double beta, double eta = 2.0);
    static ConnectionSpec hard_disk(double r0);
    static ConnectionSpec tabulated(std::vector<Knot> knots);

    // Throws ValidationError when beta/eta/r0 are not positive or the table is
    // unsorted, empty or has probabilities outside [0,1].
    void validate() const;

    // True when the Rayleigh closed forms (eta = 2 in the plane) apply.
    bool has_closed_form() const { return kind == ConnectionKind::Rayleigh && eta == 2.0; }

    // Distance beyond which H is zero, or below `threshold` for Rayleigh.
    double effective_range(double threshold = 1e-12) const;

    friend bool operator==(const ConnectionSpec&, const ConnectionSpec&) = default;
};

// H(r). Zero at r = 0 for every kind: vertices never connect to themselves.
double evaluate_connection(const ConnectionSpec& spec, double r);

struct ModelParams {
    double rho = 1.0; // intensity, points per unit area
    ConnectionSpec connection;
    double anchor_distance = 1.0;
    int k = 3;
    double margin = 1.0;

    void validate() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Box margin making truncation of the plane negligible: 5*sqrt(k/beta) for
// Rayleigh, k*r0 for hard disk, k * last knot for tabulated.
double default_margin(const ConnectionSpec& spec, int k);

// Convenience constructor that fills in the default margin.
ModelParams make_params(double rho, ConnectionSpec connection, double anchor_distance, int k);

// Anchors at (0,0) and (anchor_distance,0), box expanded by the margin.
Region sampling_region(const ModelParams& params);

} // namespace rcm
