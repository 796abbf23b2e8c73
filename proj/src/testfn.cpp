#include "sg/testfn.hpp"

#include <cmath>
#include <sstream>

namespace sg {

namespace {

constexpr double pi = two_pi / 2;

double alpha_of_epsilon(double eps) {
    // alpha^4 eps = 1 / log(-log eps)
    return std::pow(1.0 / (eps * std::log(-std::log(eps))), 0.25);
}

// C2 radial cutoff: 1 at rho=0, 0 at rho=1.
double quintic_cutoff(double rho) {
    if (rho <= 0) return 1.0;
    if (rho >= 1) return 0.0;
    const double s = rho * rho * rho * (10 + rho * (-15 + 6 * rho));
    return 1.0 - s;
}

} // namespace

std::pair<double, double> admissible_epsilon_window(Grid grid) {
    // Bisection on the monotone map eps -> alpha sqrt(eps).
    auto chart = [](double eps) {
        return alpha_of_epsilon(eps) * std::sqrt(eps);
    };
    auto solve_for = [&](double target) {
        double lo = 1e-14, hi = std::exp(-std::exp(1.0)) - 1e-9;
        for (int it = 0; it < 200; ++it) {
            const double mid = std::sqrt(lo * hi);
            (chart(mid) < target ? lo : hi) = mid;
        }
        return std::sqrt(lo * hi);
    };
    return {solve_for(8.0 * grid.spacing()), solve_for(0.125)};
}

TestFunctionParams make_test_function_params(double epsilon,
                                             const GreenData& gp, Grid grid) {
    if (!(epsilon > 0) || epsilon >= std::exp(-std::exp(1.0)))
        throw validation_error(
            "test function: epsilon must lie in (0, e^-e); got " +
            std::to_string(epsilon));
    TestFunctionParams tp;
    tp.epsilon = epsilon;
    tp.alpha = alpha_of_epsilon(epsilon);
    tp.p0 = gp.p;
    tp.A = gp.regular_part;
    tp.b1 = gp.b1;
    tp.b2 = gp.b2;
    tp.r_inner = tp.alpha * std::sqrt(epsilon);
    tp.r_outer = 2 * tp.r_inner;
    if (tp.r_inner >= 0.125) {
        std::ostringstream msg;
        msg << "test function: bubble chart alpha*sqrt(eps) = " << tp.r_inner
            << " must be < 1/8 to fit the fundamental domain; decrease epsilon";
        throw validation_error(msg.str());
    }
    if (tp.r_inner < 8 * grid.spacing()) {
        std::ostringstream msg;
        msg << "test function: bubble chart alpha*sqrt(eps) = " << tp.r_inner
            << " is below 8 grid spacings (= " << 8 * grid.spacing()
            << ") and cannot be resolved at n = " << grid.n
            << "; increase epsilon or refine the grid";
        throw validation_error(msg.str());
    }
    return tp;
}

ScalarField build_test_function(const TestFunctionParams& tp,
                                const GreenData& gp, const ScalarField& w_p0) {
    const Grid grid = gp.g.grid;
    const double eps = tp.epsilon;
    const double far_const =
        -2 * std::log((tp.alpha * tp.alpha + 1) / (tp.alpha * tp.alpha)) -
        tp.A + std::log(eps);
    ScalarField phi(grid);
    for (int ix = 0; ix < grid.n; ++ix) {
        for (int iy = 0; iy < grid.n; ++iy) {
            const double dx = min_image(grid.coord(ix) - tp.p0.x);
            const double dy = min_image(grid.coord(iy) - tp.p0.y);
            const double r = std::sqrt(dx * dx + dy * dy);
            const double bterm = tp.b1 * dx + tp.b2 * dy;
            double v;
            if (r <= tp.r_inner) {
                v = -2 * std::log(r * r + eps) + bterm + std::log(eps);
            } else if (r <= tp.r_outer) {
                const double G = gp.g.at(ix, iy);
                const double beta = G + 4 * std::log(r) - tp.A - bterm;
                const double eta =
                    quintic_cutoff((r - tp.r_inner) / (tp.r_outer - tp.r_inner));
                v = G - eta * beta + far_const;
            } else {
                v = gp.g.at(ix, iy) + far_const;
            }
            phi.at(ix, iy) = v - w_p0.at(ix, iy);
        }
    }
    return phi;
}

double condition_check(SpectralWorkspace& ws, Point p, const Model& m) {
    const Grid grid = m.h1.grid;
    const int n = grid.n;
    const int ip = grid.wrap(int(std::lround(p.x * n)));
    const int jp = grid.wrap(int(std::lround(p.y * n)));
    const double h1p = m.h1.at(ip, jp);
    if (h1p <= 0)
        throw validation_error(
            "condition check: h1(p) must be positive (the condition is "
            "undefined at zeros of h1)");

    double lap_log_h1;
    if (field_min(m.h1) > 0) {
        ScalarField logh(grid);
        for (size_t i = 0; i < logh.size(); ++i) logh[i] = std::log(m.h1[i]);
        lap_log_h1 = ws.laplacian(logh).at(ip, jp);
    } else {
        // log h1 is not a grid field when h1 has zeros; fall back to a local
        // 5-point stencil at p.
        const double h = grid.spacing();
        auto lg = [&](int di, int dj) {
            const double v = m.h1.at(grid.wrap(ip + di), grid.wrap(jp + dj));
            if (v <= 0)
                throw validation_error(
                    "condition check: h1 vanishes next to p; Delta log h1 is "
                    "not computable there");
            return std::log(v);
        };
        lap_log_h1 = (lg(1, 0) + lg(-1, 0) + lg(0, 1) + lg(0, -1) - 4 * lg(0, 0)) /
                     (h * h);
    }
    return eight_pi - m.rho2 + lap_log_h1;
}

double barrier_gap(SpectralWorkspace& ws, const TestFunctionParams& tp,
                   const Model& m, const GreenData& gp,
                   const ScalarField& w_p0, double l_star) {
    const ScalarField phi = build_test_function(tp, gp, w_p0);
    return energy_j(ws, phi, m) - l_star;
}

ExpansionFitReport expansion_fit(SpectralWorkspace& ws,
                                 const std::vector<double>& eps_list,
                                 const Model& m, const GreenData& gp,
                                 const ScalarField& w_p0) {
    if (eps_list.size() < 4)
        throw validation_error(
            "expansion fit: need at least 4 epsilon values, got " +
            std::to_string(eps_list.size()));
    ExpansionFitReport rep;
    for (double eps : eps_list) {
        const TestFunctionParams tp =
            make_test_function_params(eps, gp, gp.g.grid);
        const ScalarField phi = build_test_function(tp, gp, w_p0);
        rep.epsilons.push_back(eps);
        rep.x.push_back(eps * (-std::log(eps)));
        rep.j_values.push_back(energy_j(ws, phi, m));
    }
    // Normal equations for [1, x].
    const size_t k = rep.x.size();
    double sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (size_t i = 0; i < k; ++i) {
        sx += rep.x[i];
        sxx += rep.x[i] * rep.x[i];
        sy += rep.j_values[i];
        sxy += rep.x[i] * rep.j_values[i];
    }
    const double nk = double(k);
    const double det = nk * sxx - sx * sx;
    if (det <= 0) throw solver_error("expansion fit: singular design");
    rep.c0 = (sxx * sy - sx * sxy) / det;
    rep.c1 = (nk * sxy - sx * sy) / det;

    double rms = 0;
    for (size_t i = 0; i < k; ++i) {
        const double d = rep.j_values[i] - (rep.c0 + rep.c1 * rep.x[i]);
        rms += d * d;
    }
    rep.rms_residual = std::sqrt(rms / nk);

    // Condition number of the 2x2 normal matrix.
    const double tr = nk + sxx;
    const double disc = std::sqrt(tr * tr / 4 - det);
    rep.condition_number = (tr / 2 + disc) / (tr / 2 - disc);
    if (!(rep.condition_number < 1e14)) {
        std::ostringstream msg;
        msg << "expansion fit is ill-conditioned (condition number "
            << rep.condition_number << "); spread the epsilon list";
        throw solver_error(msg.str());
    }
    return rep;
}

double c1_prediction(SpectralWorkspace& ws, const Model& m, const GreenData& gp,
                     const ScalarField& w_p0) {
    const Grid grid = m.h1.grid;
    const double h1p = m.h1.at(gp.ip, gp.jp);
    if (h1p <= 0)
        throw validation_error("c1 prediction: h1(p0) must be positive");
    const double cond = condition_check(ws, gp.p, m);

    // (k1, k2) = grad(h1 e^{-w}) at p0, through spectral differentiation.
    ScalarField prod(grid);
    for (size_t i = 0; i < prod.size(); ++i)
        prod[i] = m.h1[i] * std::exp(-w_p0[i]);
    auto [px, py] = ws.gradient(prod);
    const double denom = prod.at(gp.ip, gp.jp);
    const double t1 = gp.b1 + px.at(gp.ip, gp.jp) / denom;
    const double t2 = gp.b2 + py.at(gp.ip, gp.jp) / denom;
    return -two_pi * (cond + t1 * t1 + t2 * t2);
}

} // namespace sg
