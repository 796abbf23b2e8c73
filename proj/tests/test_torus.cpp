#include "doctest.h"
#include "sg/spectral.hpp"
#include "test_helpers.hpp"

using namespace sg;
using namespace sgtest;

TEST_SUITE("torus_core") {

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(Grid(8), validation_error);
    CHECK_THROWS_AS(Grid(17), validation_error);
    Grid g(64);
    CHECK(g.spacing() == doctest::Approx(1.0 / 64));
    CHECK(g.area_element() == doctest::Approx(1.0 / 4096));
}

TEST_CASE("quadrature basics") {
    Grid grid(64);
    CHECK(integrate(ScalarField(grid, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));

    ScalarField s = sample_function(
        grid, [](double x, double) { return std::sin(two_pi * x); });
    CHECK(std::abs(integrate(s)) < 1e-14);

    ScalarField f = sample_function(grid, [](double, double y) {
        return 2.0 + std::cos(two_pi * y);
    });
    CHECK(integrate(f) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("quadrature rejects non-finite input") {
    Grid grid(16);
    ScalarField f(grid, 1.0);
    f[7] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(integrate(f), validation_error);
}

TEST_CASE("laplacian on eigenfunctions") {
    Grid grid(64);
    SpectralWorkspace ws(grid);

    ScalarField c(grid, 3.25);
    ScalarField lap = ws.laplacian(c);
    CHECK(max_abs_diff(lap, ScalarField(grid, 0.0)) < 1e-12);

    ScalarField f = make_cos(grid, 1.0, 1);
    lap = ws.laplacian(f);
    double err = 0;
    for (size_t i = 0; i < f.size(); ++i)
        err = std::max(err, std::abs(lap[i] + two_pi * two_pi * f[i]));
    CHECK(err < 1e-10);

    // cos(2 pi x) cos(4 pi y) has eigenvalue -(2 pi)^2 (1 + 4)
    ScalarField g = sample_function(grid, [](double x, double y) {
        return std::cos(two_pi * x) * std::cos(2 * two_pi * y);
    });
    lap = ws.laplacian(g);
    err = 0;
    for (size_t i = 0; i < g.size(); ++i)
        err = std::max(err, std::abs(lap[i] + 5 * two_pi * two_pi * g[i]));
    CHECK(err < 1e-9);
}

TEST_CASE("poisson eigenfunction inversion and round trip") {
    Grid grid(64);
    SpectralWorkspace ws(grid);

    ScalarField rhs = make_cos(grid, -two_pi * two_pi, 1);
    ScalarField sol = ws.solve_poisson(rhs);
    ScalarField expected = make_cos(grid, 1.0, 1);
    CHECK(max_abs_diff(sol, expected) < 1e-12);

    CHECK(max_abs_diff(ws.solve_poisson(ScalarField(grid, 0.0)),
                       ScalarField(grid, 0.0)) == 0.0);

    ScalarField r = random_band_limited(grid, 42, 10, 1.0);
    const double mean = integrate(r);
    for (auto& v : r.values) v -= mean;
    const double sup = std::max(std::abs(field_max(r)), std::abs(field_min(r)));
    for (auto& v : r.values) v /= sup;
    CHECK(max_abs_diff(ws.laplacian(ws.solve_poisson(r)), r) < 1e-10);
}

TEST_CASE("poisson solvability error reports the mean") {
    Grid grid(32);
    SpectralWorkspace ws(grid);
    ScalarField bad(grid, 0.5);
    CHECK_THROWS_WITH_AS(ws.solve_poisson(bad),
                         doctest::Contains("mean"), validation_error);
}

TEST_CASE("poisson round trip at n = 512") {
    Grid grid(512);
    SpectralWorkspace ws(grid);
    ScalarField r = random_band_limited(grid, 9, 6, 1.0);
    const double mean = integrate(r);
    for (auto& v : r.values) v -= mean;
    const double sup = std::max(std::abs(field_max(r)), std::abs(field_min(r)));
    for (auto& v : r.values) v /= sup;
    CHECK(max_abs_diff(ws.laplacian(ws.solve_poisson(r)), r) < 1e-10);
}

TEST_CASE("dirichlet energy values and finite-difference oracle") {
    Grid grid(64);
    SpectralWorkspace ws(grid);

    CHECK(ws.dirichlet_energy(ScalarField(grid, 5.0)) == 0.0);

    // 1/2 * (2 pi)^2 * mean(sin^2) = pi^2
    const double pi = two_pi / 2;
    CHECK(ws.dirichlet_energy(make_cos(grid, 1.0, 1)) ==
          doctest::Approx(pi * pi).epsilon(1e-12));

    // Second-order finite differences on the same nodes, at n and 2n.
    auto fd_energy = [](const ScalarField& f) {
        const Grid g = f.grid;
        const double h = g.spacing();
        double sum = 0;
        for (int ix = 0; ix < g.n; ++ix) {
            for (int iy = 0; iy < g.n; ++iy) {
                const double fx = (f.at(g.wrap(ix + 1), iy) -
                                   f.at(g.wrap(ix - 1), iy)) /
                                  (2 * h);
                const double fy = (f.at(ix, g.wrap(iy + 1)) -
                                   f.at(ix, g.wrap(iy - 1))) /
                                  (2 * h);
                sum += fx * fx + fy * fy;
            }
        }
        return 0.5 * sum * g.area_element();
    };
    // Same seed and modes sampled at n and 2n; Richardson-extrapolating the
    // FD oracle leaves an O((kh)^4) tail, so keep the band low.
    ScalarField fa = random_band_limited(Grid(256), 7, 2, 0.3);
    ScalarField fb = random_band_limited(Grid(512), 7, 2, 0.3);
    const double fd_extrap = (4 * fd_energy(fb) - fd_energy(fa)) / 3.0;
    SpectralWorkspace ws256(Grid(256));
    const double spectral = ws256.dirichlet_energy(fa);
    CHECK(spectral == doctest::Approx(fd_extrap).epsilon(1e-6));
}

TEST_CASE("integration by parts ties energy to the laplacian") {
    Grid grid(64);
    SpectralWorkspace ws(grid);
    ScalarField f = random_band_limited(grid, 11, 8, 0.5);
    const double de = ws.dirichlet_energy(f);
    const double ibp = -0.5 * inner(f, ws.laplacian(f));
    CHECK(de == doctest::Approx(ibp).epsilon(1e-9));
}

TEST_CASE("resolution consistency of all operators") {
    // Band-limited fields are represented exactly at both resolutions.
    Grid g1(64), g2(128);
    SpectralWorkspace ws1(g1), ws2(g2);
    ScalarField f1 = random_band_limited(g1, 3, 5, 0.4);
    ScalarField f2 = random_band_limited(g2, 3, 5, 0.4);

    CHECK(integrate(f1) == doctest::Approx(integrate(f2)).epsilon(1e-12));
    CHECK(ws1.dirichlet_energy(f1) ==
          doctest::Approx(ws2.dirichlet_energy(f2)).epsilon(1e-10));

    ScalarField l1 = ws1.laplacian(f1), l2 = ws2.laplacian(f2);
    double err = 0;
    for (int ix = 0; ix < g1.n; ++ix)
        for (int iy = 0; iy < g1.n; ++iy)
            err = std::max(err, std::abs(l1.at(ix, iy) - l2.at(2 * ix, 2 * iy)));
    CHECK(err < 1e-8);
}

TEST_CASE("laplacian integrates to zero") {
    Grid grid(64);
    SpectralWorkspace ws(grid);
    ScalarField f = random_band_limited(grid, 5, 12, 1.0);
    CHECK(std::abs(integrate(ws.laplacian(f))) < 1e-12);
}

TEST_CASE("trigonometric sampling is exact at nodes and for band-limited fields") {
    Grid grid(32);
    SpectralWorkspace ws(grid);
    ScalarField f = random_band_limited(grid, 21, 4, 0.7);

    // Node reproduction.
    CHECK(ws.sample(f, {grid.coord(5), grid.coord(17)}) ==
          doctest::Approx(f.at(5, 17)).epsilon(1e-13));

    // Off-grid agreement with the analytic band-limited function.
    ScalarField fine = random_band_limited(Grid(128), 21, 4, 0.7);
    const double v = ws.sample(f, {Grid(128).coord(33), Grid(128).coord(77)});
    CHECK(v == doctest::Approx(fine.at(33, 77)).epsilon(1e-12));

    // Periodicity.
    CHECK(ws.sample(f, {0.3 + 1.0, 0.6 - 2.0}) ==
          doctest::Approx(ws.sample(f, {0.3, 0.6})).epsilon(1e-12));
}

TEST_CASE("gradient matches analytic derivative") {
    Grid grid(64);
    SpectralWorkspace ws(grid);
    ScalarField f = sample_function(grid, [](double x, double y) {
        return std::sin(two_pi * x) * std::cos(two_pi * y);
    });
    auto [fx, fy] = ws.gradient(f);
    double err = 0;
    for (int ix = 0; ix < grid.n; ++ix) {
        for (int iy = 0; iy < grid.n; ++iy) {
            const double x = grid.coord(ix), y = grid.coord(iy);
            err = std::max(err, std::abs(fx.at(ix, iy) -
                                         two_pi * std::cos(two_pi * x) *
                                             std::cos(two_pi * y)));
            err = std::max(err, std::abs(fy.at(ix, iy) +
                                         two_pi * std::sin(two_pi * x) *
                                             std::sin(two_pi * y)));
        }
    }
    CHECK(err < 1e-10);
}

TEST_CASE("helmholtz inversion") {
    Grid grid(32);
    SpectralWorkspace ws(grid);
    // (c - Delta) applied to the inverse returns the input.
    ScalarField r = random_band_limited(grid, 5, 6, 1.0);
    ScalarField z = ws.helmholtz_invert(r, 10.0);
    ScalarField back = ws.laplacian(z);
    for (size_t i = 0; i < back.size(); ++i) back[i] = 10.0 * z[i] - back[i];
    CHECK(max_abs_diff(back, r) < 1e-10);
}

} // TEST_SUITE
