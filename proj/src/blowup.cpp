#include "sg/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sg {

NormalizedPair normalize(const ScalarField& u, const Model& m,
                         const ScalarField& du_dt) {
    require_finite(u, "normalize");
    const double log_m1 = log_weighted_mass(m.h1, u, +1, "int h1 e^u");
    const double log_m2 = log_weighted_mass(m.h2, u, -1, "int h2 e^-u");
    NormalizedPair pair{ScalarField(u.grid), ScalarField(u.grid),
                        ScalarField(u.grid)};
    for (size_t i = 0; i < u.size(); ++i) {
        pair.u1[i] = u[i] - log_m1;
        pair.u2[i] = -u[i] - log_m2;
        pair.f[i] = du_dt[i] * std::exp(u[i] / 2);
    }
    return pair;
}

namespace {

// Area fraction of a node cell inside the periodic ball, 4x4 subsamples.
double cell_fraction(Grid grid, int ix, int iy, Point center, double delta) {
    const double h = grid.spacing();
    const double x0 = grid.coord(ix), y0 = grid.coord(iy);
    const double outer = delta + 0.7072 * h, inner = delta - 0.7072 * h;
    const double d = periodic_dist({x0, y0}, center);
    if (d <= inner) return 1.0;
    if (d >= outer) return 0.0;
    int in = 0;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const double xs = x0 + (a + 0.5) / 4.0 * h - h / 2;
            const double ys = y0 + (b + 0.5) / 4.0 * h - h / 2;
            if (periodic_dist({xs, ys}, center) <= delta) ++in;
        }
    }
    return in / 16.0;
}

long argmax_index(const ScalarField& f) {
    long best = 0;
    for (long i = 1; i < long(f.size()); ++i)
        if (f[size_t(i)] > f[size_t(best)]) best = i;
    return best;
}

} // namespace

double concentration(const NormalizedPair& pair, const Model& m, Point center,
                     double delta, int which) {
    if (!(delta > 0 && delta < 0.5))
        throw validation_error("concentration: delta must lie in (0, 1/2)");
    if (which != 1 && which != 2)
        throw validation_error("concentration: component must be 1 or 2");
    const ScalarField& u = which == 1 ? pair.u1 : pair.u2;
    const ScalarField& h = which == 1 ? m.h1 : m.h2;
    const double coef = which == 1 ? eight_pi : m.rho2;
    const Grid grid = u.grid;
    double sum = 0, c = 0;
    for (int ix = 0; ix < grid.n; ++ix) {
        for (int iy = 0; iy < grid.n; ++iy) {
            const double w = cell_fraction(grid, ix, iy, center, delta);
            if (w == 0) continue;
            const double term = w * h.at(ix, iy) * std::exp(u.at(ix, iy)) - c;
            const double t = sum + term;
            c = (t - sum) - term;
            sum = t;
        }
    }
    return coef * sum * grid.area_element();
}

namespace {

double green_deviation(SpectralWorkspace& ws, const ScalarField& u,
                       const Model& m, Point x1, double delta) {
    // Smooth correction w_n solving -Delta w = rho2 (h2 e^{-u}/int - 1).
    const double log_m2 = log_weighted_mass(m.h2, u, -1, "int h2 e^-u");
    ScalarField rhs(u.grid);
    for (size_t i = 0; i < rhs.size(); ++i)
        rhs[i] = -m.rho2 * (m.h2[i] * std::exp(-u[i] - log_m2) - 1.0);
    const double mean_rhs = integrate(rhs);
    for (double& v : rhs.values) v -= mean_rhs; // quadrature dust only
    ScalarField wn = ws.solve_poisson(rhs);

    const GreenData gx = green_function(ws, x1);
    const double mean_u = integrate(u);
    // RMS of (u - mean + w_n) - G_{x1} over the annulus delta <= r <= 2 delta.
    const Grid grid = u.grid;
    double sum = 0;
    long count = 0;
    for (int ix = 0; ix < grid.n; ++ix) {
        for (int iy = 0; iy < grid.n; ++iy) {
            const double r =
                periodic_dist({grid.coord(ix), grid.coord(iy)}, gx.p);
            if (r < delta || r > 2 * delta) continue;
            const double d =
                (u.at(ix, iy) - mean_u + wn.at(ix, iy)) - gx.g.at(ix, iy);
            sum += d * d;
            ++count;
        }
    }
    return count ? std::sqrt(sum / double(count)) : 0.0;
}

} // namespace

BlowupReport track(SpectralWorkspace& ws, const std::vector<FieldSample>& samples,
                   const Model& m, const std::vector<double>& deltas,
                   const TrackOptions& opt) {
    if (samples.empty())
        throw validation_error("track: no field samples retained");
    BlowupReport rep;
    rep.deltas = deltas;
    const Grid grid = samples.front().u.grid;
    const double h = grid.spacing();

    double smallest_resolved = 0;
    for (double d : deltas)
        if (d >= 4 * h && (smallest_resolved == 0 || d < smallest_resolved))
            smallest_resolved = d;

    double u2max0 = 0;
    double prev_c1 = 0;
    for (size_t s = 0; s < samples.size(); ++s) {
        const FieldSample& fs = samples[s];
        const NormalizedPair pair = normalize(fs.u, m, fs.du_dt);
        BlowupRow row;
        row.t = fs.t;
        row.dissipation = fs.dissipation;

        const long i1 = argmax_index(pair.u1);
        const long i2 = argmax_index(pair.u2);
        row.x1 = {grid.coord(int(i1 / grid.n)), grid.coord(int(i1 % grid.n))};
        row.x2 = {grid.coord(int(i2 / grid.n)), grid.coord(int(i2 % grid.n))};
        row.c1 = pair.u1[size_t(i1)];
        row.c2 = pair.u2[size_t(i2)];
        row.r1 = std::exp(-row.c1 / 2);
        row.r2 = std::exp(-row.c2 / 2);
        row.u2max = row.c2;
        for (double d : deltas)
            row.mu1.push_back(concentration(pair, m, row.x1, d, 1));

        // Pointwise selection-bound monitor max(u1 + 2 log dist(x, x1)).
        double sb = -std::numeric_limits<double>::infinity();
        for (int ix = 0; ix < grid.n; ++ix) {
            for (int iy = 0; iy < grid.n; ++iy) {
                const double r = periodic_dist(
                    {grid.coord(ix), grid.coord(iy)}, row.x1);
                if (r < h / 2) continue;
                sb = std::max(sb, pair.u1.at(ix, iy) + 2 * std::log(r));
            }
        }
        row.selection_bound = sb;

        if (s == 0) {
            u2max0 = row.u2max;
            prev_c1 = row.c1;
        }

        if (s > 0 && s + 1 < samples.size()) {
            if (fs.dissipation <= samples[s - 1].dissipation &&
                fs.dissipation <= samples[s + 1].dissipation)
                row.flags += "TN;";
        }
        if (row.r1 < opt.exhaust_factor * h) {
            row.flags += "EXHAUSTED;";
            rep.resolution_exhausted = true;
            rep.rows.push_back(std::move(row));
            break;
        }
        if (smallest_resolved > 0 && s > 0 && row.c1 > prev_c1) {
            const size_t di = size_t(std::find(deltas.begin(), deltas.end(),
                                               smallest_resolved) -
                                     deltas.begin());
            if (row.mu1[di] >= opt.mu1_fraction * eight_pi) {
                row.flags += "SINGLE-POINT-CONCENTRATION;";
                rep.single_point_concentration = true;
                if (opt.green_deviation)
                    row.green_dev =
                        green_deviation(ws, fs.u, m, row.x1, smallest_resolved);
            }
        }
        if (row.u2max > u2max0 + opt.never_s_margin) {
            row.flags += "NEVER-S-VIOLATION;";
            rep.never_s_violation = true;
        }
        prev_c1 = row.c1;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

} // namespace sg
