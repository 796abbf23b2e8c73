#pragma once

#include "sg/spectral.hpp"

namespace sg {

/// Least-squares expansion of a log-singular field about a node:
///   f(r, theta) = -4 log r + A + b1 r cos(theta) + b2 r sin(theta) + O(r^2),
/// estimated on sampling rings and extrapolated to r = 0.
struct ExpansionFit {
    double A = 0;
    double b1 = 0;
    double b2 = 0;
    double fit_error = 0; // rms deviation of ring means from the r^2 model
};

struct RingFitOptions {
    double r_lo_mult = 4;  // inner radius in units of the grid spacing
    double r_hi_mult = 16; // outer radius in units of the grid spacing
    int rings = 9;
    int angles = 128;
};

ExpansionFit fit_log_expansion(SpectralWorkspace& ws, const ScalarField& f,
                               Point center, const RingFitOptions& opt = {});

/// Green function of -Delta G = 8 pi (delta_p - 1) with zero mean, plus its
/// extracted regular part and first-order expansion coefficients.
///
/// The grid delta is a single-node spike of weight n^2. After the spectral
/// solve the field is renormalized so that the quadrature excluding the
/// singular node, with that node's cell replaced by the analytic cell
/// average of -4 log r + A, has zero mean. The value stored at the
/// singular node is the (finite) spectral nodal value; it must be skipped
/// in any quadrature of log-singular integrands.
struct GreenData {
    Point p;            // snapped to the nearest grid node
    int ip = 0, jp = 0; // node indices of p
    ScalarField g;
    double regular_part = 0;
    double b1 = 0;
    double b2 = 0;
    double fit_error = 0;
};

GreenData green_function(SpectralWorkspace& ws, Point p,
                         const RingFitOptions& opt = {});

/// Mean of -4 log|z| over the unit square cell centered at the origin,
/// h times rescaled: (1/h^2) int_cell -4 log r = -4 (log h + K), with
/// K = (pi/2 - 3 - log 2)/2.
double log_cell_average_constant();

/// Quadrature of G excluding the singular node, its cell replaced by the
/// analytic estimate; the normalization makes this vanish.
double green_mean_singular_corrected(const GreenData& gd);

} // namespace sg
