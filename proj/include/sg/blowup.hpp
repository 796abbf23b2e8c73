#pragma once

#include <string>
#include <vector>

#include "sg/flow.hpp"
#include "sg/green.hpp"

namespace sg {

/// Normalized components of a time slice:
///   u1 = u - log int h1 e^u,   u2 = -u - log int h2 e^{-u},
///   f  = (du/dt) e^{u/2}.
/// By construction int h1 e^{u1} = int h2 e^{u2} = 1.
struct NormalizedPair {
    ScalarField u1;
    ScalarField u2;
    ScalarField f;
};

NormalizedPair normalize(const ScalarField& u, const Model& m,
                         const ScalarField& du_dt);

/// Concentration mass of a periodic metric ball:
///   which = 1:  8 pi  int_{B_delta(center)} h1 e^{u1}
///   which = 2:  rho2  int_{B_delta(center)} h2 e^{u2}
/// Boundary cells enter with their covered area fraction (4x4 subsampling).
double concentration(const NormalizedPair& pair, const Model& m, Point center,
                     double delta, int which);

struct BlowupRow {
    double t = 0;
    Point x1, x2;           // argmax nodes of u1, u2
    double c1 = 0, c2 = 0;  // max values
    double r1 = 0, r2 = 0;  // scales exp(-c/2)
    std::vector<double> mu1; // ball masses of 8 pi h1 e^{u1}, one per delta
    double u2max = 0;
    double green_dev = std::numeric_limits<double>::quiet_NaN();
    std::string flags;
    double dissipation = 0;
    double selection_bound = 0; // max over grid of u1 + 2 log dist(x, x1)
};

struct TrackOptions {
    double mu1_fraction = 0.95;   // single-point concentration threshold
    double never_s_margin = 1.0;  // allowed growth of max u2 over the run
    double exhaust_factor = 4.0;  // r1 < factor*h stops the diagnostics
    bool green_deviation = true;  // annulus comparison against G_{x1}
};

struct BlowupReport {
    std::vector<double> deltas;
    std::vector<BlowupRow> rows;
    bool single_point_concentration = false;
    bool never_s_violation = false;
    bool resolution_exhausted = false;
};

/// Per-sample diagnostics over retained field snapshots. Samples at local
/// minima of the dissipation are tagged TN (the discrete stand-in for the
/// vanishing time-derivative subsequence); SINGLE-POINT-CONCENTRATION fires
/// when the smallest resolved ball holds >= mu1_fraction of the total mass
/// 8 pi while c1 is growing; NEVER-S-VIOLATION fires when max u2 exceeds its
/// initial value by more than the margin. Diagnostics stop at resolution
/// exhaustion (r1 below exhaust_factor grid spacings).
BlowupReport track(SpectralWorkspace& ws, const std::vector<FieldSample>& samples,
                   const Model& m, const std::vector<double>& deltas,
                   const TrackOptions& opt = {});

} // namespace sg
