#include "sg/mfe.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace sg {

ScalarField singular_weight(const GreenData& gp, const ScalarField& h2) {
    ScalarField w(h2.grid);
    for (size_t i = 0; i < w.size(); ++i) w[i] = h2[i] * std::exp(-gp.g[i]);
    w.at(gp.ip, gp.jp) = 0.0;
    return w;
}

double tilde_j(SpectralWorkspace& ws, const ScalarField& w,
               const ScalarField& weight, double rho2) {
    require_finite(w, "tilde_j");
    if (std::abs(integrate(w)) > 1e-10)
        throw validation_error("tilde_j: argument must have zero mean");
    const double lm = log_weighted_mass(weight, w, +1, "int h2 e^{-G_p} e^w");
    return ws.dirichlet_energy(w) - rho2 * lm;
}

ScalarField mfe_residual_field(SpectralWorkspace& ws, const ScalarField& w,
                               const ScalarField& weight, double rho2) {
    const double lm = log_weighted_mass(weight, w, +1, "int h2 e^{-G_p} e^w");
    ScalarField res = ws.laplacian(w);
    for (size_t i = 0; i < res.size(); ++i)
        res[i] = -res[i] - rho2 * (weight[i] * std::exp(w[i] - lm) - 1.0);
    return res;
}

namespace {

void project_mean_zero(ScalarField& w) {
    const double mean = integrate(w);
    for (double& v : w.values) v -= mean;
}

struct DescentResult {
    ScalarField w;
    double energy;
    double residual;
    int iterations;
    std::vector<double> trace;
    bool converged;
};

// Matrix-free Hessian action of tilde_j at w, restricted to mean-zero
// fields: H v = -Delta v - rho2 (nu v - nu * int(nu v)) with the
// normalized density nu = W e^w / int(W e^w), int(nu) = 1. Preserves the
// zero-mean property of v.
ScalarField hessian_apply(SpectralWorkspace& ws, const ScalarField& v,
                          const ScalarField& nu, double rho2) {
    ScalarField hv = ws.laplacian(v);
    const double nv = inner(nu, v);
    for (size_t i = 0; i < hv.size(); ++i)
        hv[i] = -hv[i] - rho2 * (nu[i] * v[i] - nu[i] * nv);
    return hv;
}

// Inexact Newton correction: CG on H d = -r over mean-zero fields with the
// inverse Laplacian as preconditioner. Quadratic tail convergence where the
// Armijo phase hits the floating-point floor of energy comparisons.
ScalarField newton_direction(SpectralWorkspace& ws, const ScalarField& w,
                             const ScalarField& r, const ScalarField& weight,
                             double rho2) {
    const double lm = log_weighted_mass(weight, w, +1, "int h2 e^{-G_p} e^w");
    ScalarField nu(w.grid);
    for (size_t i = 0; i < nu.size(); ++i)
        nu[i] = rho2 * weight[i] * std::exp(w[i] - lm);

    ScalarField d(w.grid, 0.0);
    ScalarField res = r; // solving H d = -r, d0 = 0 -> residual -r... sign:
    for (double& v : res.values) v = -v;
    ScalarField z = ws.solve_poisson(res);
    for (double& v : z.values) v = -v; // z = (-Delta)^{-1} res
    ScalarField p = z;
    double rz = inner(res, z);
    const double target = 0.05 * l2_norm(res);
    for (int it = 0; it < 200; ++it) {
        if (l2_norm(res) <= target) break;
        ScalarField hp = hessian_apply(ws, p, nu);
        const double php = inner(p, hp);
        if (!(php > 0)) break; // curvature lost; return what we have
        const double alpha = rz / php;
        for (size_t i = 0; i < d.size(); ++i) d[i] += alpha * p[i];
        for (size_t i = 0; i < res.size(); ++i) res[i] -= alpha * hp[i];
        z = ws.solve_poisson(res);
        for (double& v : z.values) v = -v;
        const double rz_new = inner(res, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
    }
    return d;
}

DescentResult descend(SpectralWorkspace& ws, ScalarField w0,
                      const ScalarField& weight, double rho2,
                      const MfeOptions& opt) {
    project_mean_zero(w0);
    DescentResult res{std::move(w0), 0, 0, 0, {}, false};
    res.energy = tilde_j(ws, res.w, weight, rho2);
    res.trace.push_back(res.energy);
    double step0 = 1.0;
    int it = 0;

    // Phase 1: inverse-Laplacian preconditioned descent with Armijo
    // backtracking; at unit step this is the Picard map.
    for (; it < opt.max_iterations; ++it) {
        ScalarField r = mfe_residual_field(ws, res.w, weight, rho2);
        res.residual = l2_norm(r);
        res.iterations = it;
        if (res.residual <= opt.tol_residual) {
            res.converged = true;
            return res;
        }
        if (res.residual <= 1e-5) break; // hand over to the Newton tail
        ScalarField d = ws.solve_poisson(r);
        const double slope = inner(r, d); // = -<r, (-Delta)^{-1} r> < 0
        if (!(slope < 0)) break;
        double s = step0;
        bool accepted = false;
        while (s > 1e-14) {
            ScalarField trial = res.w;
            for (size_t i = 0; i < trial.size(); ++i) trial[i] += s * d[i];
            project_mean_zero(trial);
            const double e = tilde_j(ws, trial, weight, rho2);
            if (e <= res.energy + opt.armijo_c * s * slope) {
                res.w = std::move(trial);
                res.energy = e;
                res.trace.push_back(e);
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) break; // energy differences at the fp floor
        step0 = std::min(2.0 * s, 1.0);
    }

    // Phase 2: Newton tail with residual-decrease acceptance.
    for (int newton = 0; newton < 25 && it < opt.max_iterations; ++newton, ++it) {
        ScalarField r = mfe_residual_field(ws, res.w, weight, rho2);
        res.residual = l2_norm(r);
        res.iterations = it;
        if (res.residual <= opt.tol_residual) {
            res.converged = true;
            break;
        }
        if (res.residual > 1e-3) break; // too far out for the tail phase
        ScalarField d = newton_direction(ws, res.w, r, weight, rho2);
        double s = 1.0;
        bool accepted = false;
        while (s > 1e-3) {
            ScalarField trial = res.w;
            for (size_t i = 0; i < trial.size(); ++i) trial[i] += s * d[i];
            project_mean_zero(trial);
            const double rn =
                l2_norm(mfe_residual_field(ws, trial, weight, rho2));
            if (rn < res.residual) {
                res.w = std::move(trial);
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) break;
    }

    ScalarField r = mfe_residual_field(ws, res.w, weight, rho2);
    res.residual = l2_norm(r);
    res.converged = res.residual <= opt.tol_residual;
    res.energy = tilde_j(ws, res.w, weight, rho2);
    return res;
}

ScalarField bubble_start(Grid grid, Point c, double eps) {
    ScalarField f(grid);
    const double pi = two_pi / 2;
    for (int ix = 0; ix < grid.n; ++ix) {
        for (int iy = 0; iy < grid.n; ++iy) {
            const double r = periodic_dist({grid.coord(ix), grid.coord(iy)}, c);
            const double q = r * r + eps;
            f.at(ix, iy) = std::log(eps / (pi * q * q));
        }
    }
    project_mean_zero(f);
    return f;
}

} // namespace

MFESolution solve_mfe(SpectralWorkspace& ws, const GreenData& gp,
                      const Model& m, const MfeOptions& opt) {
    const ScalarField weight = singular_weight(gp, m.h2);
    if (!(integrate(weight) > 0))
        throw validation_error("mean-field solve: weight h2 e^{-G_p} has zero mass");

    std::vector<ScalarField> starts;
    starts.emplace_back(weight.grid, 0.0);
    if (opt.multistart) {
        for (auto [ox, oy] : {std::pair{0.25, 0.25}, {0.25, -0.25},
                              {-0.25, 0.25}, {-0.25, -0.25}})
            starts.push_back(
                bubble_start(weight.grid, {gp.p.x + ox, gp.p.y + oy}, 1e-2));
    }

    std::optional<DescentResult> best;
    double last_residual = std::numeric_limits<double>::quiet_NaN();
    int total_iters = 0;
    for (auto& s : starts) {
        DescentResult r = descend(ws, std::move(s), weight, m.rho2, opt);
        total_iters += r.iterations;
        last_residual = r.residual;
        if (r.converged && (!best || r.energy < best->energy)) best = std::move(r);
    }
    if (!best) {
        std::ostringstream msg;
        msg << "mean-field solve did not converge within " << opt.max_iterations
            << " iterations; last residual " << last_residual << " (target "
            << opt.tol_residual << ")";
        throw solver_error(msg.str());
    }

    MFESolution sol;
    sol.p = gp.p;
    sol.w = std::move(best->w);
    sol.energy_tilde = best->energy;
    sol.residual = best->residual;
    sol.iterations = total_iters;
    sol.weight_mass =
        std::exp(log_weighted_mass(weight, sol.w, +1, "int h2 e^{-G_p} e^w"));
    sol.energy_trace = std::move(best->trace);
    return sol;
}

double barrier_additive_constant() {
    const double pi = two_pi / 2;
    return -eight_pi * std::log(pi) - eight_pi;
}

namespace {

BarrierRow scan_point(SpectralWorkspace& ws, const Model& m, Point p,
                      const MfeOptions& opt) {
    BarrierRow row;
    const GreenData gp = green_function(ws, p);
    row.p = gp.p;
    row.A = gp.regular_part;
    row.h1_at_p = m.h1.at(gp.ip, gp.jp);
    if (row.h1_at_p <= 0) {
        row.score = std::numeric_limits<double>::infinity();
        row.jtilde = std::numeric_limits<double>::quiet_NaN();
        row.solved = true; // excluded by the h1 zero set, not a failure
        return row;
    }
    const MFESolution sol = solve_mfe(ws, gp, m, opt);
    row.jtilde = sol.energy_tilde;
    row.score = row.jtilde - 4 * (two_pi / 2) * row.A -
                eight_pi * std::log(row.h1_at_p);
    row.solved = true;
    return row;
}

} // namespace

BarrierScan barrier_level(SpectralWorkspace& ws, const Model& m,
                          int p_resolution, const MfeOptions& opt, bool refine) {
    if (p_resolution < 4)
        throw validation_error("barrier scan: p_resolution must be >= 4");
    BarrierScan scan;
    scan.p_resolution = p_resolution;
    scan.min_score = std::numeric_limits<double>::infinity();
    for (int i = 0; i < p_resolution; ++i) {
        for (int j = 0; j < p_resolution; ++j) {
            const Point p{double(i) / p_resolution, double(j) / p_resolution};
            try {
                BarrierRow row = scan_point(ws, m, p, opt);
                if (row.score < scan.min_score) {
                    scan.min_score = row.score;
                    scan.p0 = row.p;
                }
                scan.rows.push_back(std::move(row));
            } catch (const solver_error&) {
                BarrierRow row;
                row.p = p;
                row.score = std::numeric_limits<double>::infinity();
                row.jtilde = std::numeric_limits<double>::quiet_NaN();
                row.solved = false;
                scan.rows.push_back(row);
                ++scan.failures;
            }
        }
    }
    if (!std::isfinite(scan.min_score))
        throw solver_error("barrier scan: no scan point produced a finite score");

    if (refine) {
        const double half = 0.5 / p_resolution;
        for (int di = -1; di <= 1; ++di) {
            for (int dj = -1; dj <= 1; ++dj) {
                if (di == 0 && dj == 0) continue;
                const Point p{scan.p0.x + di * half, scan.p0.y + dj * half};
                try {
                    BarrierRow row = scan_point(ws, m, p, opt);
                    if (row.score < scan.min_score) {
                        scan.min_score = row.score;
                        scan.p0 = row.p;
                    }
                    scan.rows.push_back(std::move(row));
                } catch (const solver_error&) {
                    ++scan.failures;
                }
            }
        }
    }
    scan.l_star = scan.min_score + barrier_additive_constant();
    return scan;
}

} // namespace sg
