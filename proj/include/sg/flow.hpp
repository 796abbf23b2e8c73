#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "sg/energy.hpp"

namespace sg {

/// Snapshot of the evolving solution with cached integrals.
/// Cache coherence (mass_eu == integrate(exp(u)) to 1e-12 relative) is a
/// checked invariant; the weighted masses must stay strictly positive
/// along any run.
struct FlowState {
    ScalarField u;
    double t = 0;
    double mass_eu = 0;
    double mass_h1 = 0;
    double mass_h2 = 0;
    double energy = 0;
    long step_count = 0;
    ScalarField du_dt;      // increment of the last accepted step / dt
    double dissipation = 0; // int |du/dt|^2 e^u of the last accepted step
    double last_dt = 0;
};

FlowState make_flow_state(SpectralWorkspace& ws, ScalarField u0, const Model& m);

struct HelmholtzStats {
    int iterations = 0;
    double rel_residual = 0;
    bool converged = false;
};

/// Conjugate gradients for (m/dt - Delta) x = b, preconditioned by the
/// constant-coefficient spectral inverse (mean(m)/dt - Delta)^-1.
/// x carries the initial guess in and the solution out.
HelmholtzStats helmholtz_pcg(SpectralWorkspace& ws, const ScalarField& m,
                             double dt, const ScalarField& b, ScalarField& x,
                             double rel_tol = 1e-10, int max_iter = 4000);

struct StepOutcome {
    FlowState next;
    HelmholtzStats inner;
};

/// One linearly implicit step of the flow: freezes the mass e^{u_old} and
/// the nonlocal reaction at the old time, treats the Laplacian implicitly:
///   (e^{u_old}/dt - Delta) u_new = e^{u_old} u_old / dt + reaction(u_old),
/// then shifts u_new by the O(dt^2) constant that restores int e^u (the
/// conserved quantity; the energy is blind to constant shifts).
/// Does not throw on inner non-convergence (inspect outcome.inner); the
/// run loop uses that signal for step-size control.
StepOutcome step_once(SpectralWorkspace& ws, const FlowState& s, const Model& m,
                      double dt, int max_inner_iters = 4000);

/// Like step_once but throws solver_error when the inner solve fails.
FlowState step(SpectralWorkspace& ws, const FlowState& s, const Model& m,
               double dt);

struct TrajectorySample {
    double t, energy, mass_eu, mass_h1, mass_h2, umax, umin, dissipation,
        residual;
};

/// Field snapshot retained for post-processing (concentration diagnostics).
struct FieldSample {
    double t = 0;
    ScalarField u;
    ScalarField du_dt;
    double dissipation = 0;
};

struct TrajectoryRecord {
    std::vector<TrajectorySample> rows;
    std::vector<FieldSample> fields; // decimated when store_fields is set
    double initial_mass = 0;
    double tol_energy_abs = 0;
};

struct CertificateThresholds {
    double residual = 1e-6;
    double dissipation = 1e-8;
    double final_change = 1e-6;
    double blowup_margin = 2.0;
};

struct RunParams {
    double t_end = 1.0;
    double dt_init = 1e-3;
    double dt_max = 1e-1;
    double tol_mass = 1e-6;
    double tol_energy_rel = 1e-8; // absolute tolerance = rel*|J(u0)| + 1e-12
    long max_steps = 200000;
    int sample_every = 10;
    bool store_fields = false;
    int max_stored_fields = 96;
    bool stop_when_stationary = false; // early exit once certificate thresholds hit
    CertificateThresholds cert;
    double mass_floor = 1e-12;
    int max_inner_iters = 4000;
};

struct RunResult {
    TrajectoryRecord record;
    FlowState final_state;
    long rejected_steps = 0;
    bool reached_t_end = false;
    bool stopped_stationary = false;
    // decimated (t, u) history for the trailing-window diagnostic
    std::vector<std::pair<double, ScalarField>> history;
};

/// Integrates to t_end with adaptive dt: halve on energy increase or inner
/// failure, double after 10 clean steps (capped at dt_max). Enforces mass
/// conservation within tol_mass and the positivity of the weighted masses;
/// violations abort with solver_error. dt underflow below 1e-12 aborts with
/// a diagnosis.
RunResult run(SpectralWorkspace& ws, ScalarField u0, const Model& m,
              const RunParams& p);

enum class Verdict { Converged, BlowupSuspect, Undecided };

struct Certificate {
    Verdict verdict = Verdict::Undecided;
    double residual = 0;
    double dissipation = 0;
    double final_change = 0; // max-norm change over the final 10% of the run
    double umax_growth = 0;
    double r1_initial = 0;
    double r1_final = 0;
};

const char* to_string(Verdict v);

/// Stationarity certificate over a completed run: CONVERGED when residual,
/// dissipation and the trailing max-norm change all fall below their
/// thresholds; BLOWUP-SUSPECT when max(u) grew past the margin with a
/// shrinking concentration scale r1 = exp(-c1/2); UNDECIDED otherwise.
Certificate convergence_certificate(SpectralWorkspace& ws, const RunResult& r,
                                    const Model& m,
                                    const CertificateThresholds& th);

} // namespace sg
