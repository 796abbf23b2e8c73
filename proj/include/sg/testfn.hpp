#pragma once

#include "sg/mfe.hpp"

namespace sg {

/// Parameters of the concentrating test profile. alpha is determined from
/// epsilon by alpha^4 epsilon = 1 / log(-log epsilon); the bubble chart
/// alpha*sqrt(epsilon) must fit inside the fundamental domain (< 1/8) and
/// must be resolved by the grid (>= 8 spacings).
struct TestFunctionParams {
    double epsilon = 0;
    double alpha = 0;
    Point p0;
    double A = 0;
    double b1 = 0;
    double b2 = 0;
    double r_inner = 0; // alpha sqrt(eps)
    double r_outer = 0; // 2 alpha sqrt(eps)
};

TestFunctionParams make_test_function_params(double epsilon,
                                             const GreenData& gp, Grid grid);

/// Admissible epsilon window [lo, hi] at this resolution.
std::pair<double, double> admissible_epsilon_window(Grid grid);

/// Grid sampling of the sub-barrier profile: the concentrating bubble glued
/// to the Green function through a quintic cutoff, minus the mean-field
/// minimizer w_p0. Value at p0 is -log(epsilon).
ScalarField build_test_function(const TestFunctionParams& tp,
                                const GreenData& gp, const ScalarField& w_p0);

/// Hypothesis of the convergence theorem at p (flat torus, K = 0):
///   8 pi - rho2 + Delta log h1 (p).
/// Spectral Laplacian when h1 > 0 everywhere; a 5-point stencil at p when
/// h1 has zeros elsewhere (log h1 is then not a grid field).
double condition_check(SpectralWorkspace& ws, Point p, const Model& m);

/// J(test function) - L*; strictly negative for small epsilon whenever the
/// condition above is positive at p0.
double barrier_gap(SpectralWorkspace& ws, const TestFunctionParams& tp,
                   const Model& m, const GreenData& gp,
                   const ScalarField& w_p0, double l_star);

struct ExpansionFitReport {
    double c0 = 0;
    double c1 = 0;
    double rms_residual = 0;
    double condition_number = 0;
    std::vector<double> epsilons;
    std::vector<double> x;        // eps * (-log eps)
    std::vector<double> j_values; // J(test function)
};

/// Least-squares fit J(eps) ~ c0 + c1 * eps(-log eps) over >= 4 admissible
/// epsilon values. c0 estimates the barrier level; c1 the first-order
/// energy deficit coefficient.
ExpansionFitReport expansion_fit(SpectralWorkspace& ws,
                                 const std::vector<double>& eps_list,
                                 const Model& m, const GreenData& gp,
                                 const ScalarField& w_p0);

/// The predicted eps(-log eps) coefficient (flat torus):
///   -2 pi (8 pi - rho2 + Delta log h1(p0) + sum_i (b_i + k_i / (h1 e^{-w})(p0))^2),
/// with (k1, k2) = grad(h1 e^{-w_p0})(p0).
double c1_prediction(SpectralWorkspace& ws, const Model& m, const GreenData& gp,
                     const ScalarField& w_p0);

} // namespace sg
