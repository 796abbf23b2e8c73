#pragma once

#include "sg/spectral.hpp"

namespace sg {

/// Sampled problem data: interaction strengths and non-negative weights.
/// rho1 defaults to the critical value 8*pi; subcritical rho1 < 8*pi gives
/// convergence baselines. Requires 0 < rho2 < 8*pi, 0 < rho1 <= 8*pi,
/// h1, h2 >= 0 pointwise and h1*h2 not identically zero.
struct Model {
    double rho1;
    double rho2;
    ScalarField h1;
    ScalarField h2;
};

Model make_model(double rho1, double rho2, ScalarField h1, ScalarField h2);

/// log of integrate(h * exp(s*u)), computed with an exp-shift by max(s*u)
/// so near-concentration peaks do not overflow. Throws if the weighted
/// mass degenerates to zero; `what` names the integral in the message.
double log_weighted_mass(const ScalarField& h, const ScalarField& u, double s,
                         const char* what);

/// The energy functional driving the flow:
///   1/2 |grad u|^2 - rho1 log(int h1 e^u) - rho2 log(int h2 e^-u)
///     + (rho1 - rho2) mean(u).
/// Invariant under u -> u + const for every weight pair.
double energy_j(SpectralWorkspace& ws, const ScalarField& u, const Model& m);

/// Trudinger-Moser diagnostic:
///   (1/16 pi) |grad u|^2_2 - log(int e^{u-mean}) - log(int e^{-u+mean}).
/// Bounded below by a universal constant; reported raw, never asserted
/// against a specific constant.
double mt_gap(SpectralWorkspace& ws, const ScalarField& u);

/// L2 gradient of energy_j at u:
///   -Delta u - rho1 (h1 e^u / int - 1) + rho2 (h2 e^-u / int - 1).
/// Vanishes exactly at discrete stationary solutions.
ScalarField energy_gradient(SpectralWorkspace& ws, const ScalarField& u,
                            const Model& m);

/// L2 norm of energy_gradient; the stationarity certificate.
double elliptic_residual(SpectralWorkspace& ws, const ScalarField& u,
                         const Model& m);

/// The nonlocal reaction term of the evolution equation (no Laplacian):
///   rho1 (h1 e^u / int - 1) - rho2 (h2 e^-u / int - 1).
/// Has exactly zero discrete mean.
ScalarField reaction_term(const ScalarField& u, const Model& m);

} // namespace sg
