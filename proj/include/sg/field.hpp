#pragma once

#include <cmath>
#include <vector>

#include "sg/errors.hpp"

namespace sg {

inline constexpr double two_pi = 6.283185307179586476925286766559;
inline constexpr double eight_pi = 4 * two_pi;

/// Uniform periodic grid on the unit-area torus [0,1)^2, n samples per axis.
/// The quadrature weight of every node is 1/n^2, so the total weight is
/// exactly 1 (unit area).
struct Grid {
    int n = 0; // 0 only in the default-constructed (empty) sentinel

    Grid() = default;
    explicit Grid(int n_) : n(n_) {
        if (n < 16 || n % 2 != 0)
            throw validation_error("grid size must be even and >= 16, got " +
                                   std::to_string(n));
    }

    double spacing() const { return 1.0 / n; }
    double area_element() const { return 1.0 / (double(n) * double(n)); }
    long size() const { return long(n) * long(n); }
    double coord(int i) const { return double(i) / n; }
    int wrap(int i) const {
        int r = i % n;
        return r < 0 ? r + n : r;
    }
    long index(int ix, int iy) const { return long(ix) * n + iy; }
    bool operator==(const Grid& o) const { return n == o.n; }
};

struct Point {
    double x = 0;
    double y = 0;
};

/// Real scalar function sampled at the grid nodes, row-major in x.
/// Default construction yields an empty placeholder (to be assigned later).
struct ScalarField {
    Grid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(Grid g, double fill = 0.0)
        : grid(g), values(size_t(g.size()), fill) {}

    int n() const { return grid.n; }
    double& at(int ix, int iy) { return values[size_t(grid.index(ix, iy))]; }
    double at(int ix, int iy) const { return values[size_t(grid.index(ix, iy))]; }
    double& operator[](size_t i) { return values[i]; }
    double operator[](size_t i) const { return values[i]; }
    size_t size() const { return values.size(); }
};

/// Wraps a displacement to the symmetric fundamental interval [-1/2, 1/2).
inline double min_image(double d) {
    d -= std::floor(d + 0.5);
    return d;
}

/// Periodic (minimum-image) distance between two points of the unit torus.
inline double periodic_dist(Point a, Point b) {
    double dx = min_image(a.x - b.x);
    double dy = min_image(a.y - b.y);
    return std::sqrt(dx * dx + dy * dy);
}

void require_finite(const ScalarField& f, const char* what);

/// Quadrature on the unit torus: (1/n^2) * sum of nodal values.
/// Exact for trigonometric polynomials below the Nyquist frequency.
double integrate(const ScalarField& f);

double field_max(const ScalarField& f);
double field_min(const ScalarField& f);
double max_abs_diff(const ScalarField& a, const ScalarField& b);

/// L2(torus) norm, sqrt(integrate(f^2)).
double l2_norm(const ScalarField& f);

/// Discrete L2 inner product integrate(a*b).
double inner(const ScalarField& a, const ScalarField& b);

} // namespace sg
