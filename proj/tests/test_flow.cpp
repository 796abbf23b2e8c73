#include "doctest.h"
#include "sg/flow.hpp"
#include "test_helpers.hpp"

using namespace sg;
using namespace sgtest;

namespace {
constexpr double pi = two_pi / 2;

ScalarField explicit_euler(SpectralWorkspace& ws, const ScalarField& u,
                           const Model& m, double dt) {
    ScalarField lap = ws.laplacian(u);
    ScalarField f = reaction_term(u, m);
    ScalarField out = u;
    for (size_t i = 0; i < u.size(); ++i)
        out[i] += dt * std::exp(-u[i]) * (lap[i] + f[i]);
    return out;
}
} // namespace

TEST_SUITE("flow") {

TEST_CASE("state caches cohere with the stored field") {
    Grid grid(32);
    SpectralWorkspace ws(grid);
    const Model m = unit_model(grid, eight_pi, 4 * pi);
    FlowState st = make_flow_state(ws, make_cos(grid, 0.4, 1), m);
    ScalarField eu(grid);
    for (size_t i = 0; i < eu.size(); ++i) eu[i] = std::exp(st.u[i]);
    CHECK(st.mass_eu == doctest::Approx(integrate(eu)).epsilon(1e-12));
    CHECK(st.energy == doctest::Approx(energy_j(ws, st.u, m)).epsilon(1e-12));
}

TEST_CASE("stationary point stays fixed for any dt") {
    Grid grid(32);
    SpectralWorkspace ws(grid);
    const Model m = unit_model(grid, eight_pi, 4 * pi);
    FlowState st = make_flow_state(ws, ScalarField(grid, 0.0), m);
    for (double dt : {1e-4, 1e-2, 1.0}) {
        FlowState next = step(ws, st, m, dt);
        CHECK(max_abs_diff(next.u, st.u) < 1e-9);
    }
}

TEST_CASE("one subcritical step decreases the energy") {
    Grid grid(64);
    SpectralWorkspace ws(grid);
    const Model m = unit_model(grid, 4 * pi, 2 * pi);
    FlowState st = make_flow_state(ws, make_cos(grid, 0.1, 1), m);
    FlowState next = step(ws, st, m, 1e-3);
    const double tol = 1e-8 * std::abs(st.energy) + 1e-12;
    CHECK(next.energy <= st.energy + tol);
    CHECK(next.energy < st.energy); // strictly, away from stationarity
}

TEST_CASE("semi-implicit step agrees with explicit euler to second order") {
    Grid grid(64);
    SpectralWorkspace ws(grid);
    const Model m = unit_model(grid, eight_pi, 4 * pi);
    ScalarField u0 = make_cos(grid, 0.3, 1, 0.2, 1);
    FlowState st = make_flow_state(ws, u0, m);

    // Richardson: the schemes differ by O(dt^2), so the gap shrinks 4x
    // when dt halves.
    const double dt1 = 1e-4, dt2 = 5e-5;
    const double gap1 =
        max_abs_diff(step(ws, st, m, dt1).u, explicit_euler(ws, u0, m, dt1));
    const double gap2 =
        max_abs_diff(step(ws, st, m, dt2).u, explicit_euler(ws, u0, m, dt2));
    CHECK(gap1 / gap2 == doctest::Approx(4.0).epsilon(0.15));

    // Literal micro-step agreement.
    const double micro =
        max_abs_diff(step(ws, st, m, 1e-8).u, explicit_euler(ws, u0, m, 1e-8));
    CHECK(micro < 1e-9);
}

TEST_CASE("inner solve failure is reported as a step failure") {
    Grid grid(32);
    SpectralWorkspace ws(grid);
    const Model m = unit_model(grid, eight_pi, 4 * pi);
    FlowState st = make_flow_state(ws, make_cos(grid, 1.0, 1), m);
    ScalarField mass(grid);
    for (size_t i = 0; i < mass.size(); ++i) mass[i] = std::exp(st.u[i]);
    ScalarField rhs = mass, x(grid, 0.0);
    HelmholtzStats stats = helmholtz_pcg(ws, mass, 1e-3, rhs, x, 1e-10, 1);
    CHECK(!stats.converged);
    CHECK(stats.rel_residual > 1e-10);
}

TEST_CASE("subcritical run converges to a discrete stationary solution") {
    Grid grid(64);
    SpectralWorkspace ws(grid);
    const Model m = unit_model(grid, 4 * pi, 2 * pi);
    RunParams p;
    p.t_end = 50.0;
    p.dt_init = 1e-3;
    p.dt_max = 0.25;
    p.sample_every = 20;
    p.stop_when_stationary = true;
    p.cert.residual = 1e-6;
    p.cert.dissipation = 1e-12;
    const RunResult res = run(ws, make_cos(grid, 1.0, 1), m, p);
    CHECK(elliptic_residual(ws, res.final_state.u, m) < 1e-6);

    const Certificate cert = convergence_certificate(
        ws, res, m, {1e-6, 1e-8, 1e-4, 2.0});
    CHECK(cert.verdict == Verdict::Converged);

    // Energy rows are nonincreasing within the per-step tolerance.
    for (size_t i = 1; i < res.record.rows.size(); ++i)
        CHECK(res.record.rows[i].energy <=
              res.record.rows[i - 1].energy + res.record.tol_energy_abs);
}

TEST_CASE("trivial run produces a constant trajectory with zero residual") {
    Grid grid(32);
    SpectralWorkspace ws(grid);
    const Model m = unit_model(grid, 6 * pi, 3 * pi);
    RunParams p;
    p.t_end = 0.5;
    p.dt_init = 1e-2;
    p.dt_max = 1e-1;
    p.sample_every = 5;
    const RunResult res = run(ws, ScalarField(grid, 0.0), m, p);
    for (const auto& r : res.record.rows) {
        CHECK(std::abs(r.energy) < 1e-10);
        CHECK(r.residual < 1e-9);
        CHECK(r.umax == doctest::Approx(0.0));
    }
}

TEST_CASE("mass conservation over a medium run") {
    Grid grid(64);
    SpectralWorkspace ws(grid);
    const Model m = unit_model(grid, eight_pi, 4 * pi);
    RunParams p;
    p.t_end = 1e-3;
    p.dt_init = 5e-7;
    p.dt_max = 5e-7; // fixed small dt: drift accumulates as dt * dissipated energy
    p.sample_every = 100;
    p.max_steps = 2000;
    const RunResult res = run(ws, make_cos(grid, 0.5, 1), m, p);
    const double m0 = res.record.initial_mass;
    for (const auto& r : res.record.rows)
        CHECK(std::abs(r.mass_eu - m0) / m0 <= 1e-6);
}

TEST_CASE("energy decrease equals the dissipation quadrature") {
    Grid grid(64);
    SpectralWorkspace ws(grid);
    const Model m = unit_model(grid, eight_pi, 4 * pi);
    RunParams p;
    p.t_end = 2e-3;
    p.dt_init = 2e-7;
    p.dt_max = 2e-7;
    p.sample_every = 1;
    p.max_steps = 10000;
    const RunResult res = run(ws, make_cos(grid, 0.5, 1), m, p);
    const auto& rows = res.record.rows;
    double quad = 0;
    for (size_t i = 1; i < rows.size(); ++i)
        quad += 0.5 * (rows[i].dissipation + rows[i - 1].dissipation) *
                (rows[i].t - rows[i - 1].t);
    const double drop = rows.front().energy - rows.back().energy;
    CHECK(drop > 0);
    CHECK(quad == doctest::Approx(drop).epsilon(1e-3));
}

TEST_CASE("halving dt changes the final state by O(dt)") {
    Grid grid(32);
    SpectralWorkspace ws(grid);
    const Model m = unit_model(grid, 4 * pi, 2 * pi);
    auto final_u = [&](double dt) {
        RunParams p;
        p.t_end = 0.02;
        p.dt_init = dt;
        p.dt_max = dt;
        p.sample_every = 1000000;
        return run(ws, make_cos(grid, 0.5, 1), m, p).final_state.u;
    };
    ScalarField u1 = final_u(2e-4);
    ScalarField u2 = final_u(1e-4);
    ScalarField u3 = final_u(5e-5);
    const double d12 = max_abs_diff(u1, u2);
    const double d23 = max_abs_diff(u2, u3);
    CHECK(d12 / d23 == doctest::Approx(2.0).epsilon(0.2)); // first order in time
}

TEST_CASE("dt underflow aborts with a diagnosis") {
    Grid grid(32);
    SpectralWorkspace ws(grid);
    const Model m = unit_model(grid, eight_pi, 4 * pi);
    RunParams p;
    p.t_end = 1.0;
    p.dt_init = 1e-3;
    p.dt_max = 1e-2;
    // An unsatisfiable acceptance tolerance rejects every step, so dt is
    // halved all the way down to the underflow diagnosis.
    p.tol_energy_rel = -1.0;
    CHECK_THROWS_WITH_AS(run(ws, make_cos(grid, 0.5, 1), m, p),
                         doctest::Contains("underflow"), solver_error);
}

} // TEST_SUITE
