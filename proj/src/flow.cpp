#include "sg/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sg {

namespace {

double checked_mass(const ScalarField& h, const ScalarField& u, double s,
                    const char* what) {
    return std::exp(log_weighted_mass(h, u, s, what));
}

void fill_masses(SpectralWorkspace& ws, FlowState& st, const Model& m) {
    const ScalarField one(st.u.grid, 1.0);
    st.mass_eu = checked_mass(one, st.u, +1, "int e^u");
    st.mass_h1 = checked_mass(m.h1, st.u, +1, "int h1 e^u");
    st.mass_h2 = checked_mass(m.h2, st.u, -1, "int h2 e^-u");
    st.energy = energy_j(ws, st.u, m);
}

} // namespace

FlowState make_flow_state(SpectralWorkspace& ws, ScalarField u0, const Model& m) {
    require_finite(u0, "initial data");
    FlowState st{std::move(u0)};
    st.du_dt = ScalarField(st.u.grid, 0.0);
    fill_masses(ws, st, m);
    return st;
}

HelmholtzStats helmholtz_pcg(SpectralWorkspace& ws, const ScalarField& m,
                             double dt, const ScalarField& b, ScalarField& x,
                             double rel_tol, int max_iter) {
    const Grid grid = b.grid;
    const double m_bar = integrate(m);
    const double b_norm = l2_norm(b);
    if (b_norm == 0) {
        x = ScalarField(grid, 0.0);
        return {0, 0.0, true};
    }

    auto apply = [&](const ScalarField& v) {
        ScalarField av = ws.laplacian(v);
        for (size_t i = 0; i < av.size(); ++i) av[i] = m[i] * v[i] / dt - av[i];
        return av;
    };

    HelmholtzStats stats;
    ScalarField r = apply(x);
    for (size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    ScalarField z = ws.helmholtz_invert(r, m_bar / dt);
    ScalarField p = z;
    double rz = inner(r, z);
    for (int it = 0; it < max_iter; ++it) {
        const double rn = l2_norm(r);
        stats.iterations = it;
        stats.rel_residual = rn / b_norm;
        if (stats.rel_residual <= rel_tol) {
            stats.converged = true;
            return stats;
        }
        ScalarField ap = apply(p);
        const double pap = inner(p, ap);
        if (!(pap > 0)) break; // numerical breakdown
        const double alpha = rz / pap;
        for (size_t i = 0; i < x.size(); ++i) x[i] += alpha * p[i];
        for (size_t i = 0; i < r.size(); ++i) r[i] -= alpha * ap[i];
        z = ws.helmholtz_invert(r, m_bar / dt);
        const double rz_new = inner(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
    }
    stats.rel_residual = l2_norm(r) / b_norm;
    stats.converged = stats.rel_residual <= rel_tol;
    return stats;
}

StepOutcome step_once(SpectralWorkspace& ws, const FlowState& s, const Model& m,
                      double dt, int max_inner_iters) {
    if (!(dt > 0)) throw validation_error("step: dt must be positive");
    const ScalarField& u = s.u;
    ScalarField mass(u.grid);
    for (size_t i = 0; i < u.size(); ++i) mass[i] = std::exp(u[i]);

    const ScalarField f = reaction_term(u, m);
    ScalarField rhs(u.grid);
    for (size_t i = 0; i < rhs.size(); ++i)
        rhs[i] = mass[i] * u[i] / dt + f[i];

    // Warm start from the linear extrapolation of the previous step.
    ScalarField u_new = u;
    if (s.last_dt > 0)
        for (size_t i = 0; i < u_new.size(); ++i) u_new[i] += dt * s.du_dt[i];

    StepOutcome out{FlowState{ScalarField(u.grid)}, {}};
    out.inner = helmholtz_pcg(ws, mass, dt, rhs, u_new, 1e-10, max_inner_iters);
    if (!out.inner.converged) return out;

    // Project back onto the mass manifold: the continuum flow conserves
    // int e^u exactly, and the energy is invariant under constant shifts,
    // so the O(dt^2) shift costs nothing and pins the conserved quantity.
    const ScalarField one(u.grid, 1.0);
    const double raw_mass =
        std::exp(log_weighted_mass(one, u_new, +1, "int e^u"));
    const double shift = std::log(s.mass_eu / raw_mass);
    for (double& v : u_new.values) v += shift;

    FlowState next{std::move(u_new)};
    next.t = s.t + dt;
    next.step_count = s.step_count + 1;
    next.last_dt = dt;
    next.du_dt = ScalarField(u.grid);
    for (size_t i = 0; i < u.size(); ++i)
        next.du_dt[i] = (next.u[i] - u[i]) / dt;
    double diss = 0, c = 0;
    for (size_t i = 0; i < u.size(); ++i) {
        const double term = next.du_dt[i] * next.du_dt[i] * mass[i] - c;
        const double t = diss + term;
        c = (t - diss) - term;
        diss = t;
    }
    next.dissipation = diss * u.grid.area_element();
    fill_masses(ws, next, m);
    out.next = std::move(next);
    return out;
}

FlowState step(SpectralWorkspace& ws, const FlowState& s, const Model& m,
               double dt) {
    StepOutcome out = step_once(ws, s, m, dt);
    if (!out.inner.converged) {
        std::ostringstream msg;
        msg << "implicit step failed: inner solve stalled at relative residual "
            << out.inner.rel_residual << " after " << out.inner.iterations
            << " iterations (dt = " << dt << ")";
        throw solver_error(msg.str());
    }
    return std::move(out.next);
}

namespace {

// Keeps a decimated history: capacity-bound by doubling the keep-stride.
struct DecimatedHistory {
    size_t cap;
    long stride = 1;
    long counter = 0;
    std::vector<std::pair<double, ScalarField>> items;

    void push(double t, const ScalarField& u) {
        if (counter++ % stride != 0) return;
        items.emplace_back(t, u);
        if (items.size() >= cap) {
            std::vector<std::pair<double, ScalarField>> kept;
            for (size_t i = 0; i < items.size(); i += 2) kept.push_back(items[i]);
            items.swap(kept);
            stride *= 2;
        }
    }
};

void record_sample(SpectralWorkspace& ws, TrajectoryRecord& rec,
                   const FlowState& st, const Model& m) {
    rec.rows.push_back({st.t, st.energy, st.mass_eu, st.mass_h1, st.mass_h2,
                        field_max(st.u), field_min(st.u), st.dissipation,
                        elliptic_residual(ws, st.u, m)});
}

void store_field(TrajectoryRecord& rec, const FlowState& st, int cap) {
    rec.fields.push_back({st.t, st.u, st.du_dt, st.dissipation});
    if (int(rec.fields.size()) >= cap) {
        std::vector<FieldSample> kept;
        for (size_t i = 0; i < rec.fields.size(); i += 2)
            kept.push_back(std::move(rec.fields[i]));
        rec.fields.swap(kept);
    }
}

} // namespace

RunResult run(SpectralWorkspace& ws, ScalarField u0, const Model& m,
              const RunParams& p) {
    RunResult res;
    FlowState st = make_flow_state(ws, std::move(u0), m);
    const double mass0 = st.mass_eu;
    res.record.initial_mass = mass0;
    res.record.tol_energy_abs = p.tol_energy_rel * std::abs(st.energy) + 1e-12;

    DecimatedHistory history{64};
    history.push(st.t, st.u);
    record_sample(ws, res.record, st, m);
    if (p.store_fields) store_field(res.record, st, p.max_stored_fields);

    double dt = std::min(p.dt_init, p.dt_max);
    int clean = 0;
    long field_stride = 1, field_counter = 0;
    while (st.t < p.t_end && st.step_count < p.max_steps) {
        const double dt_try = std::min(dt, p.t_end - st.t);
        StepOutcome out = step_once(ws, st, m, dt_try, p.max_inner_iters);
        const bool energy_ok =
            out.inner.converged &&
            out.next.energy <= st.energy + res.record.tol_energy_abs;
        if (!energy_ok) {
            dt *= 0.5;
            ++res.rejected_steps;
            clean = 0;
            if (dt < 1e-12) {
                std::ostringstream msg;
                msg << "time step underflow (dt < 1e-12) at t = " << st.t
                    << ": the dynamics are stiffer than the grid can represent "
                       "(near-concentration stiffness or resolution exhaustion)";
                throw solver_error(msg.str());
            }
            continue;
        }
        st = std::move(out.next);
        const double drift = std::abs(st.mass_eu - mass0) / mass0;
        if (drift > p.tol_mass) {
            std::ostringstream msg;
            msg << "mass conservation violated: relative drift " << drift
                << " > " << p.tol_mass << " at t = " << st.t
                << " (reduce dt_max or refine the grid)";
            throw solver_error(msg.str());
        }
        if (st.mass_h1 < p.mass_floor || st.mass_h2 < p.mass_floor) {
            std::ostringstream msg;
            msg << "weighted mass lower bound violated at t = " << st.t
                << ": int h1 e^u = " << st.mass_h1
                << ", int h2 e^-u = " << st.mass_h2;
            throw solver_error(msg.str());
        }
        if (++clean >= 10) {
            dt = std::min(2 * dt, p.dt_max);
            clean = 0;
        }

        const bool is_sample = (st.step_count % p.sample_every == 0) ||
                               st.t >= p.t_end ||
                               st.step_count >= p.max_steps;
        if (is_sample) {
            history.push(st.t, st.u);
            record_sample(ws, res.record, st, m);
            if (p.store_fields && (field_counter++ % field_stride == 0))
                store_field(res.record, st, p.max_stored_fields);
            if (p.stop_when_stationary) {
                const TrajectorySample& last = res.record.rows.back();
                if (last.residual <= p.cert.residual &&
                    last.dissipation <= p.cert.dissipation) {
                    res.stopped_stationary = true;
                    break;
                }
            }
        }
    }
    if (res.record.rows.empty() || res.record.rows.back().t != st.t) {
        history.push(st.t, st.u);
        record_sample(ws, res.record, st, m);
        if (p.store_fields) store_field(res.record, st, p.max_stored_fields);
    }
    res.reached_t_end = st.t >= p.t_end;
    res.final_state = std::move(st);
    res.history = std::move(history.items);
    return res;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Converged: return "CONVERGED";
        case Verdict::BlowupSuspect: return "BLOWUP-SUSPECT";
        default: return "UNDECIDED";
    }
}

namespace {
double concentration_scale(const ScalarField& u, double mass_h1) {
    const double c1 = field_max(u) - std::log(mass_h1);
    return std::exp(-c1 / 2);
}
} // namespace

Certificate convergence_certificate(SpectralWorkspace& ws, const RunResult& r,
                                    const Model& m,
                                    const CertificateThresholds& th) {
    Certificate cert;
    const FlowState& fs = r.final_state;
    cert.residual = elliptic_residual(ws, fs.u, m);
    cert.dissipation = fs.dissipation;

    // Max-norm change over the trailing 10% of the run.
    const double t_mark = 0.9 * fs.t;
    const ScalarField* ref = nullptr;
    double best = -1;
    for (const auto& [t, u] : r.history) {
        if (best < 0 || std::abs(t - t_mark) < best) {
            best = std::abs(t - t_mark);
            ref = &u;
        }
    }
    cert.final_change = ref ? max_abs_diff(fs.u, *ref) : 0.0;

    const TrajectorySample& first = r.record.rows.front();
    cert.umax_growth = field_max(fs.u) - first.umax;
    cert.r1_initial = std::exp(-(first.umax - std::log(first.mass_h1)) / 2);
    cert.r1_final = concentration_scale(fs.u, fs.mass_h1);

    if (cert.residual <= th.residual && cert.dissipation <= th.dissipation &&
        cert.final_change <= th.final_change)
        cert.verdict = Verdict::Converged;
    else if (cert.umax_growth > th.blowup_margin &&
             cert.r1_final < cert.r1_initial)
        cert.verdict = Verdict::BlowupSuspect;
    else
        cert.verdict = Verdict::Undecided;
    return cert;
}

} // namespace sg
