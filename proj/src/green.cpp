#include "sg/green.hpp"

#include <array>
#include <cmath>

namespace sg {

namespace {

// Solves the 2x2 normal equations for y ~ c0 * phi0 + c1 * phi1.
std::array<double, 2> lsq2(const std::vector<double>& phi0,
                           const std::vector<double>& phi1,
                           const std::vector<double>& y) {
    double a00 = 0, a01 = 0, a11 = 0, r0 = 0, r1 = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        a00 += phi0[i] * phi0[i];
        a01 += phi0[i] * phi1[i];
        a11 += phi1[i] * phi1[i];
        r0 += phi0[i] * y[i];
        r1 += phi1[i] * y[i];
    }
    const double det = a00 * a11 - a01 * a01;
    if (det == 0) throw solver_error("ring fit: singular normal equations");
    return {(a11 * r0 - a01 * r1) / det, (a00 * r1 - a01 * r0) / det};
}

} // namespace

ExpansionFit fit_log_expansion(SpectralWorkspace& ws, const ScalarField& f,
                               Point center, const RingFitOptions& opt) {
    const double h = f.grid.spacing();
    const double r_lo = opt.r_lo_mult * h, r_hi = opt.r_hi_mult * h;
    if (r_hi >= 0.5)
        throw validation_error("ring fit: outer radius exceeds the torus chart");

    std::vector<double> radii(size_t(opt.rings));
    for (int j = 0; j < opt.rings; ++j)
        radii[size_t(j)] = r_lo + (r_hi - r_lo) * j / double(opt.rings - 1);

    std::vector<Point> pts;
    pts.reserve(size_t(opt.rings) * size_t(opt.angles));
    for (double r : radii) {
        for (int a = 0; a < opt.angles; ++a) {
            const double th = two_pi * a / opt.angles;
            pts.push_back({center.x + r * std::cos(th), center.y + r * std::sin(th)});
        }
    }
    const std::vector<double> vals = ws.sample(f, pts);

    std::vector<double> ring_mean(radii.size()), ring_cos(radii.size()),
        ring_sin(radii.size());
    for (size_t j = 0; j < radii.size(); ++j) {
        double m = 0, mc = 0, ms = 0;
        for (int a = 0; a < opt.angles; ++a) {
            const double th = two_pi * a / opt.angles;
            const double v = vals[j * size_t(opt.angles) + size_t(a)] +
                             4.0 * std::log(radii[j]);
            m += v;
            mc += v * std::cos(th);
            ms += v * std::sin(th);
        }
        ring_mean[j] = m / opt.angles;
        ring_cos[j] = 2 * mc / opt.angles;
        ring_sin[j] = 2 * ms / opt.angles;
    }

    // Angular mean: A + c2 r^2; first modes: b r + d r^3.
    std::vector<double> ones(radii.size(), 1.0), r2(radii.size()),
        r1v(radii.size()), r3(radii.size());
    for (size_t j = 0; j < radii.size(); ++j) {
        r2[j] = radii[j] * radii[j];
        r1v[j] = radii[j];
        r3[j] = radii[j] * radii[j] * radii[j];
    }
    const auto [A, c2] = lsq2(ones, r2, ring_mean);
    const auto [b1, d1] = lsq2(r1v, r3, ring_cos);
    const auto [b2, d2] = lsq2(r1v, r3, ring_sin);
    (void)d1;
    (void)d2;

    double rms = 0;
    for (size_t j = 0; j < radii.size(); ++j) {
        const double dev = ring_mean[j] - (A + c2 * r2[j]);
        rms += dev * dev;
    }
    rms = std::sqrt(rms / double(radii.size()));

    ExpansionFit fit;
    fit.A = A;
    fit.b1 = b1;
    fit.b2 = b2;
    fit.fit_error = rms;
    return fit;
}

double log_cell_average_constant() {
    // (1/h^2) int over the centered h-cell of log r = log h + K
    return 0.5 * (two_pi / 4 - 3 - std::log(2.0));
}

GreenData green_function(SpectralWorkspace& ws, Point p,
                         const RingFitOptions& opt) {
    const Grid grid = ws.grid();
    const int n = grid.n;
    GreenData gd;
    gd.ip = grid.wrap(int(std::lround(p.x * n)));
    gd.jp = grid.wrap(int(std::lround(p.y * n)));
    gd.p = {grid.coord(gd.ip), grid.coord(gd.jp)};

    // Delta g = 8 pi - 8 pi delta_p, grid delta = n^2 spike.
    ScalarField rhs(grid, eight_pi);
    rhs.at(gd.ip, gd.jp) -= eight_pi * double(grid.size());
    gd.g = ws.solve_poisson(rhs);

    const ExpansionFit fit = fit_log_expansion(ws, gd.g, gd.p, opt);
    if (fit.fit_error > 0.05)
        throw solver_error(
            "green function: ring fit residual " + std::to_string(fit.fit_error) +
            " exceeds 0.05; the grid is too coarse for the expansion window");

    // Renormalize: quadrature with the singular node excluded and its cell
    // replaced by the analytic average of -4 log r + A must vanish.
    const double h = grid.spacing();
    const double cell_estimate =
        -4.0 * (std::log(h) + log_cell_average_constant()) + fit.A;
    const double g_at_p = gd.g.at(gd.ip, gd.jp);
    const double corrected_mean =
        (integrate(gd.g) * double(grid.size()) - g_at_p + cell_estimate) /
        double(grid.size());
    for (double& v : gd.g.values) v -= corrected_mean;
    gd.regular_part = fit.A - corrected_mean;
    gd.b1 = fit.b1;
    gd.b2 = fit.b2;
    gd.fit_error = fit.fit_error;
    return gd;
}

double green_mean_singular_corrected(const GreenData& gd) {
    const Grid grid = gd.g.grid;
    const double h = grid.spacing();
    const double cell_estimate =
        -4.0 * (std::log(h) + log_cell_average_constant()) + gd.regular_part;
    const double g_at_p = gd.g.at(gd.ip, gd.jp);
    return (integrate(gd.g) * double(grid.size()) - g_at_p + cell_estimate) /
           double(grid.size());
}

} // namespace sg
