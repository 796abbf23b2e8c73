#include "doctest.h"
#include "sg/green.hpp"
#include "test_helpers.hpp"

using namespace sg;
using namespace sgtest;

namespace {
constexpr double pi = two_pi / 2;
} // namespace

TEST_SUITE("green") {

TEST_CASE("cell average constant for the log kernel") {
    // Midpoint-refinement oracle for the mean of log|z| over the unit cell.
    auto quad = [](int n) {
        double s = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double x = (i + 0.5) / n - 0.5, y = (j + 0.5) / n - 0.5;
                s += 0.5 * std::log(x * x + y * y);
            }
        return s / (double(n) * n);
    };
    const double oracle = 2 * quad(2048) - quad(1024); // kill the O(h) tail
    CHECK(log_cell_average_constant() == doctest::Approx(oracle).epsilon(1e-4));
    CHECK(log_cell_average_constant() ==
          doctest::Approx((pi / 2 - 3 - std::log(2.0)) / 2).epsilon(1e-14));
}

TEST_CASE("compatibility and corrected mean") {
    Grid grid(128);
    SpectralWorkspace ws(grid);
    const GreenData gd = green_function(ws, {0.5, 0.5});

    // -Delta G integrates to zero over the torus.
    ScalarField lap = ws.laplacian(gd.g);
    CHECK(std::abs(integrate(lap)) < 1e-10);

    // Quadrature with the singular cell corrected vanishes by construction.
    CHECK(std::abs(green_mean_singular_corrected(gd)) < 1e-6);
}

TEST_CASE("translation covariance on the node lattice") {
    Grid grid(64);
    SpectralWorkspace ws(grid);
    const GreenData ga = green_function(ws, {0.25, 0.5});
    const GreenData gb = green_function(ws, {0.625, 0.125});
    const int di = gb.ip - ga.ip, dj = gb.jp - ga.jp;
    double err = 0;
    for (int ix = 0; ix < grid.n; ++ix)
        for (int iy = 0; iy < grid.n; ++iy)
            err = std::max(err,
                           std::abs(gb.g.at(grid.wrap(ix + di), grid.wrap(iy + dj)) -
                                    ga.g.at(ix, iy)));
    CHECK(err < 1e-10);
    CHECK(ga.regular_part == doctest::Approx(gb.regular_part).epsilon(1e-10));
}

TEST_CASE("pairing identity against band-limited test functions") {
    Grid grid(128);
    SpectralWorkspace ws(grid);
    const GreenData gd = green_function(ws, {0.25, 0.75});
    ScalarField w = random_band_limited(grid, 77, 5, 0.6);
    for (auto& v : w.values) v += 0.9; // nonzero mean exercises the mean term

    auto [gx, gy] = ws.gradient(gd.g);
    auto [wx, wy] = ws.gradient(w);
    const double lhs = inner(gx, wx) + inner(gy, wy);
    const double rhs = eight_pi * (w.at(gd.ip, gd.jp) - integrate(w));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-4));
}

TEST_CASE("laplacian round-trip away from the singular node") {
    Grid grid(128);
    SpectralWorkspace ws(grid);
    const GreenData gd = green_function(ws, {0.5, 0.5});
    ScalarField lap = ws.laplacian(gd.g);
    // Delta G = 8 pi away from p; check outside a 3x3 stencil around p.
    double err = 0;
    for (int ix = 0; ix < grid.n; ++ix) {
        for (int iy = 0; iy < grid.n; ++iy) {
            if (std::abs(ix - gd.ip) <= 1 && std::abs(iy - gd.jp) <= 1) continue;
            err = std::max(err, std::abs(lap.at(ix, iy) - eight_pi));
        }
    }
    CHECK(err < 1e-6);
}

TEST_CASE("regular part is constant across p and converges in n") {
    // Translation symmetry makes A(p) p-independent on the node lattice;
    // the refinement sequence pins the constant, which then serves as the
    // regression oracle.
    std::vector<double> A_by_n;
    for (int n : {128, 256, 512}) {
        Grid grid(n);
        SpectralWorkspace ws(grid);
        const GreenData g1 = green_function(ws, {0.5, 0.5});
        const GreenData g2 = green_function(ws, {0.25, 0.375});
        CHECK(g1.regular_part == doctest::Approx(g2.regular_part).epsilon(1e-6));
        A_by_n.push_back(g1.regular_part);
    }
    CHECK(A_by_n[0] == doctest::Approx(A_by_n[2]).epsilon(1e-4));
    CHECK(A_by_n[1] == doctest::Approx(A_by_n[2]).epsilon(1e-5));
    // Frozen converged value from the refinement sequence
    // (-5.2473934, -5.2474270, -5.2474353 at n = 128, 256, 512).
    CHECK(A_by_n[2] == doctest::Approx(-5.2474353).epsilon(1e-6));
}

TEST_CASE("ring means diverge like -4 log r without the subtraction") {
    Grid grid(128);
    SpectralWorkspace ws(grid);
    const GreenData gd = green_function(ws, {0.5, 0.5});
    // Sample raw G on two rings; the difference tracks -4 log(r2/r1).
    const double h = grid.spacing();
    auto ring_mean = [&](double r) {
        std::vector<Point> pts;
        for (int a = 0; a < 256; ++a) {
            const double th = two_pi * a / 256;
            pts.push_back({0.5 + r * std::cos(th), 0.5 + r * std::sin(th)});
        }
        const auto vals = ws.sample(gd.g, pts);
        double s = 0;
        for (double v : vals) s += v;
        return s / 256;
    };
    // The difference tracks the -4 log r divergence; the residual O(r^2)
    // curvature over the window keeps this a 2% statement.
    const double m1 = ring_mean(4 * h), m2 = ring_mean(16 * h);
    CHECK(m1 - m2 == doctest::Approx(-4 * std::log(4 * h / (16 * h))).epsilon(2e-2));
}

TEST_CASE("expansion coefficients vanish by torus symmetry") {
    Grid grid(256);
    SpectralWorkspace ws(grid);
    const GreenData gd = green_function(ws, {0.5, 0.5});
    CHECK(std::abs(gd.b1) < 1e-4);
    CHECK(std::abs(gd.b2) < 1e-4);
    // Reflected sampling center: same magnitude by symmetry, hence zero.
    const GreenData gq = green_function(ws, {0.125, 0.625});
    CHECK(std::abs(gq.b1) < 1e-4);
    CHECK(std::abs(gq.b2) < 1e-4);
}

TEST_CASE("synthetic first-order term is recovered") {
    // G_p plus the periodic, smooth field 3 sin(2 pi (x - px)) / (2 pi),
    // which equals 3 r cos(theta) + O(r^3) near p: the fit must report
    // b1 = 3 to 1% and leave A unchanged.
    Grid grid(256);
    SpectralWorkspace ws(grid);
    const Point p{0.5, 0.5};
    const GreenData gd = green_function(ws, p);
    ScalarField f = gd.g;
    for (int ix = 0; ix < grid.n; ++ix)
        for (int iy = 0; iy < grid.n; ++iy)
            f.at(ix, iy) +=
                3.0 * std::sin(two_pi * (grid.coord(ix) - p.x)) / two_pi;
    const ExpansionFit fit = fit_log_expansion(ws, f, p);
    CHECK(fit.b1 == doctest::Approx(3.0).epsilon(0.01));
    CHECK(std::abs(fit.b2) < 1e-3);
    CHECK(fit.A == doctest::Approx(gd.regular_part).epsilon(1e-3));
}

TEST_CASE("weight vanishes at the right rate near the singularity") {
    // Ring averages of exp(-G)/r^4 approach exp(-A) as r -> 0; the known
    // -2 pi r^2 curvature of the expansion bounds the window from above.
    Grid grid(256);
    SpectralWorkspace ws(grid);
    const GreenData gd = green_function(ws, {0.5, 0.5});
    const double h = grid.spacing();
    for (double rmult : {4.0, 6.0}) {
        const double r = rmult * h;
        std::vector<Point> pts;
        for (int a = 0; a < 256; ++a) {
            const double th = two_pi * a / 256;
            pts.push_back({0.5 + r * std::cos(th), 0.5 + r * std::sin(th)});
        }
        const auto vals = ws.sample(gd.g, pts);
        double avg = 0;
        for (double v : vals) avg += std::exp(-v) / std::pow(r, 4);
        avg /= 256;
        CHECK(avg == doctest::Approx(std::exp(-gd.regular_part)).epsilon(0.01));
    }
}

TEST_CASE("ring fit rejects an unresolvable window") {
    Grid grid(16);
    SpectralWorkspace ws(grid);
    ScalarField junk = random_band_limited(grid, 5, 4, 1.0);
    // 16 h = 1 > 1/2: the window does not fit in the chart.
    CHECK_THROWS_AS(fit_log_expansion(ws, junk, {0.5, 0.5}), validation_error);
}

} // TEST_SUITE
