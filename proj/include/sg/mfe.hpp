#pragma once

#include <vector>

#include "sg/energy.hpp"
#include "sg/green.hpp"

namespace sg {

/// Singular weight h2 * exp(-G_p). Vanishes like dist^4 at p; the value at
/// the singular node is set to exactly 0 (its continuum limit).
ScalarField singular_weight(const GreenData& gp, const ScalarField& h2);

/// The reduced functional
///   1/2 int |grad w|^2 - rho2 log int (h2 e^{-G_p}) e^w
/// over mean-zero w; its critical points solve the singular mean-field
/// equation. Requires |mean(w)| <= 1e-10 and positive weighted mass.
double tilde_j(SpectralWorkspace& ws, const ScalarField& w,
               const ScalarField& weight, double rho2);

/// Residual field of the singular mean-field equation,
///   -Delta w - rho2 (W e^w / int W e^w - 1),  W = h2 e^{-G_p}.
ScalarField mfe_residual_field(SpectralWorkspace& ws, const ScalarField& w,
                               const ScalarField& weight, double rho2);

struct MfeOptions {
    double tol_residual = 1e-8;
    int max_iterations = 1000;
    double armijo_c = 1e-4;
    bool multistart = false; // also descend from 4 off-center bubble starts
};

struct MFESolution {
    Point p;
    ScalarField w; // mean-zero minimizer
    double energy_tilde = 0;
    double residual = 0;
    int iterations = 0;
    double weight_mass = 0; // int h2 e^{-G_p} e^w
    std::vector<double> energy_trace;
};

/// Minimizes tilde_j by inverse-Laplacian preconditioned gradient descent
/// with Armijo backtracking; the energy decreases strictly across accepted
/// iterations. Success is certified by the equation residual itself.
MFESolution solve_mfe(SpectralWorkspace& ws, const GreenData& gp,
                      const Model& m, const MfeOptions& opt = {});

struct BarrierRow {
    Point p;
    double A = 0;
    double jtilde = 0;
    double h1_at_p = 0;
    double score = 0; // jtilde - 4 pi A - 8 pi log h1(p); +inf where h1 = 0
    bool solved = false;
};

struct BarrierScan {
    int p_resolution = 0;
    std::vector<BarrierRow> rows;
    Point p0;             // argmin of the score
    double min_score = 0; // inf over scanned p
    double l_star = 0;    // min_score - 8 pi log pi - 8 pi
    int failures = 0;
};

/// Scans p over a p_resolution^2 sub-lattice of grid nodes, solves the
/// mean-field equation at each p with h1(p) > 0, and assembles the barrier
/// level. Points where the inner solve fails are excluded with a warning
/// count; all-point failure is an error. With refine = true the argmin is
/// polished by one half-lattice-step local scan.
BarrierScan barrier_level(SpectralWorkspace& ws, const Model& m,
                          int p_resolution, const MfeOptions& opt = {},
                          bool refine = true);

/// The additive constant -8 pi log(pi) - 8 pi of the barrier level.
double barrier_additive_constant();

} // namespace sg
