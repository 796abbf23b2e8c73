#include "sg/cli.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "sg/blowup.hpp"
#include "sg/io.hpp"
#include "sg/testfn.hpp"

namespace sg {

Model model_from_config(const ExperimentConfig& cfg, Grid grid) {
    return make_model(cfg.rho1, cfg.rho2, sample_weight(cfg.h1, grid),
                      sample_weight(cfg.h2, grid));
}

namespace {

RunParams run_params_from_config(const ExperimentConfig& cfg) {
    RunParams p;
    p.t_end = cfg.t_end;
    p.dt_init = cfg.dt_init;
    p.dt_max = cfg.dt_max;
    p.tol_mass = cfg.tol_mass;
    p.tol_energy_rel = cfg.tol_energy;
    p.max_steps = cfg.max_steps;
    p.sample_every = cfg.sample_every;
    p.cert = {cfg.tol_residual, cfg.tol_dissipation, cfg.tol_final_change,
              cfg.blowup_margin};
    return p;
}

/// Initial data; the "testfn" kind assembles the sub-barrier profile at the
/// barrier-scan argmin (or at a point given by px=, py=).
ScalarField initial_data(SpectralWorkspace& ws, const ExperimentConfig& cfg,
                         const Model& m, std::ostream& out) {
    const Grid grid = ws.grid();
    if (cfg.u0.kind != "testfn")
        return sample_initial_data(cfg.u0, grid, cfg.seed);

    const double eps = cfg.u0.param("eps", 1e-4);
    MfeOptions mfe_opt;
    mfe_opt.tol_residual = cfg.tol_mfe;
    mfe_opt.multistart = cfg.mfe_multistart;
    Point p0;
    if (cfg.u0.params.count("px") && cfg.u0.params.count("py")) {
        p0 = {cfg.u0.param("px", 0.5), cfg.u0.param("py", 0.5)};
    } else {
        const BarrierScan scan =
            barrier_level(ws, m, cfg.p_resolution, mfe_opt);
        p0 = scan.p0;
        out << "testfn initial data: barrier argmin p0 = (" << p0.x << ", "
            << p0.y << "), L* = " << scan.l_star << "\n";
    }
    const GreenData gp = green_function(ws, p0);
    const MFESolution sol = solve_mfe(ws, gp, m, mfe_opt);
    const TestFunctionParams tp = make_test_function_params(eps, gp, grid);
    return build_test_function(tp, gp, sol.w);
}

int cmd_flow(const ExperimentConfig& cfg, std::ostream& out) {
    Grid grid(cfg.n);
    SpectralWorkspace ws(grid);
    const Model m = model_from_config(cfg, grid);
    ScalarField u0 = initial_data(ws, cfg, m, out);
    RunParams rp = run_params_from_config(cfg);
    rp.stop_when_stationary = true;
    const RunResult res = run(ws, std::move(u0), m, rp);
    const Certificate cert =
        convergence_certificate(ws, res, m, rp.cert);

    ensure_directory(cfg.out_dir);
    CsvWriter csv({"t", "energy", "mass_eu", "mass_h1", "mass_h2", "umax",
                   "umin", "dissipation", "residual"});
    for (const auto& r : res.record.rows)
        csv.add_row({r.t, r.energy, r.mass_eu, r.mass_h1, r.mass_h2, r.umax,
                     r.umin, r.dissipation, r.residual});
    std::ostringstream certline;
    certline << "certificate verdict=" << to_string(cert.verdict)
             << " residual=" << format_double(cert.residual)
             << " dissipation=" << format_double(cert.dissipation)
             << " final_change=" << format_double(cert.final_change);
    csv.add_comment(certline.str());
    csv.write(cfg.out_dir + "/trajectory.csv", config_hash(cfg), cfg.n);
    write_pgm(cfg.out_dir + "/u_final.pgm", res.final_state.u);

    out << "flow: " << res.record.rows.size() << " samples, "
        << res.final_state.step_count << " steps, t = " << res.final_state.t
        << ", J = " << res.final_state.energy << "\n"
        << certline.str() << "\n";
    return 0;
}

int cmd_green(const ExperimentConfig& cfg, std::ostream& out) {
    Grid grid(cfg.n);
    SpectralWorkspace ws(grid);
    ensure_directory(cfg.out_dir);
    CsvWriter csv({"p_x", "p_y", "A", "b1", "b2", "fit_error"});
    for (int i = 0; i < cfg.p_resolution; ++i) {
        for (int j = 0; j < cfg.p_resolution; ++j) {
            const Point p{double(i) / cfg.p_resolution,
                          double(j) / cfg.p_resolution};
            const GreenData gd = green_function(ws, p);
            csv.add_row({gd.p.x, gd.p.y, gd.regular_part, gd.b1, gd.b2,
                         gd.fit_error});
        }
    }
    csv.write(cfg.out_dir + "/green.csv", config_hash(cfg), cfg.n);
    out << "green: wrote " << cfg.p_resolution * cfg.p_resolution
        << " points to " << cfg.out_dir << "/green.csv\n";
    return 0;
}

int cmd_mfe(const ExperimentConfig& cfg, std::ostream& out) {
    Grid grid(cfg.n);
    SpectralWorkspace ws(grid);
    const Model m = model_from_config(cfg, grid);
    MfeOptions opt;
    opt.tol_residual = cfg.tol_mfe;
    opt.multistart = cfg.mfe_multistart;
    ensure_directory(cfg.out_dir);
    CsvWriter csv({"p_x", "p_y", "A", "Jtilde", "residual", "iterations",
                   "weight_mass"});
    for (int i = 0; i < cfg.p_resolution; ++i) {
        for (int j = 0; j < cfg.p_resolution; ++j) {
            const Point p{double(i) / cfg.p_resolution,
                          double(j) / cfg.p_resolution};
            const GreenData gd = green_function(ws, p);
            const MFESolution sol = solve_mfe(ws, gd, m, opt);
            csv.add_row({sol.p.x, sol.p.y, gd.regular_part, sol.energy_tilde,
                         sol.residual, double(sol.iterations),
                         sol.weight_mass});
        }
    }
    csv.write(cfg.out_dir + "/mfe.csv", config_hash(cfg), cfg.n);
    out << "mfe: wrote " << cfg.p_resolution * cfg.p_resolution
        << " solves to " << cfg.out_dir << "/mfe.csv\n";
    return 0;
}

int cmd_barrier(const ExperimentConfig& cfg, std::ostream& out) {
    Grid grid(cfg.n);
    SpectralWorkspace ws(grid);
    const Model m = model_from_config(cfg, grid);
    MfeOptions opt;
    opt.tol_residual = cfg.tol_mfe;
    opt.multistart = cfg.mfe_multistart;
    ensure_directory(cfg.out_dir);

    const BarrierScan scan = barrier_level(ws, m, cfg.p_resolution, opt);
    CsvWriter scan_csv({"px", "py", "A", "Jtilde", "h1", "score"});
    for (const auto& r : scan.rows)
        scan_csv.add_row({r.p.x, r.p.y, r.A, r.jtilde, r.h1_at_p, r.score});
    std::ostringstream summary;
    summary << "p0=(" << format_double(scan.p0.x) << ","
            << format_double(scan.p0.y)
            << ") L_star=" << format_double(scan.l_star)
            << " failures=" << scan.failures;
    scan_csv.add_comment(summary.str());
    scan_csv.write(cfg.out_dir + "/barrier_scan.csv", config_hash(cfg), cfg.n);
    out << "barrier scan: " << summary.str() << "\n";

    // Epsilon sweep at the argmin.
    std::vector<double> eps_list = cfg.eps_list;
    if (eps_list.empty()) {
        const auto [lo, hi] = admissible_epsilon_window(grid);
        for (int k = 0; k < 6; ++k)
            eps_list.push_back(hi * std::pow(lo / hi * 4.0, k / 5.0));
    }
    const GreenData gp = green_function(ws, scan.p0);
    const MFESolution sol = solve_mfe(ws, gp, m, opt);

    std::vector<TestFunctionParams> params;
    for (double eps : eps_list)
        params.push_back(make_test_function_params(eps, gp, grid));

    const ExpansionFitReport fit =
        eps_list.size() >= 4 ? expansion_fit(ws, eps_list, m, gp, sol.w)
                             : ExpansionFitReport{};
    CsvWriter eps_csv({"epsilon", "alpha", "J_value", "gap", "c0_fit",
                       "c1_fit"});
    double eps_min = eps_list[0];
    for (size_t i = 0; i < eps_list.size(); ++i) {
        const double j =
            eps_list.size() >= 4
                ? fit.j_values[i]
                : energy_j(ws, build_test_function(params[i], gp, sol.w), m);
        eps_csv.add_row({eps_list[i], params[i].alpha, j, j - scan.l_star,
                         fit.c0, fit.c1});
        eps_min = std::min(eps_min, eps_list[i]);
    }
    if (eps_list.size() >= 4) {
        std::ostringstream fitline;
        fitline << "fit c0=" << format_double(fit.c0)
                << " c1=" << format_double(fit.c1)
                << " rms=" << format_double(fit.rms_residual)
                << " cond=" << format_double(fit.condition_number)
                << " c1_predicted="
                << format_double(c1_prediction(ws, m, gp, sol.w));
        eps_csv.add_comment(fitline.str());
        out << "barrier " << fitline.str() << "\n";
    }
    eps_csv.write(cfg.out_dir + "/barrier_eps.csv", config_hash(cfg), cfg.n);

    const TestFunctionParams tp_min =
        make_test_function_params(eps_min, gp, grid);
    write_pgm(cfg.out_dir + "/phi_eps.pgm",
              build_test_function(tp_min, gp, sol.w));
    out << "barrier: wrote " << cfg.out_dir << "/barrier_eps.csv and phi_eps.pgm\n";
    return 0;
}

int cmd_blowup(const ExperimentConfig& cfg, std::ostream& out) {
    Grid grid(cfg.n);
    SpectralWorkspace ws(grid);
    const Model m = model_from_config(cfg, grid);
    ScalarField u0 = initial_data(ws, cfg, m, out);
    RunParams rp = run_params_from_config(cfg);
    rp.store_fields = true;
    const RunResult res = run(ws, std::move(u0), m, rp);

    const BlowupReport rep =
        track(ws, res.record.fields, m, cfg.delta_list);
    ensure_directory(cfg.out_dir);
    std::vector<std::string> header{"t",   "x1x", "x1y", "c1", "r1",
                                    "x2x", "x2y", "c2",  "r2"};
    for (size_t i = 0; i < rep.deltas.size(); ++i)
        header.push_back("mu1_d" + std::to_string(i + 1));
    header.push_back("u2max");
    header.push_back("flags");
    CsvWriter csv(header);
    for (const auto& r : rep.rows) {
        std::vector<std::string> cells{
            format_double(r.t),  format_double(r.x1.x), format_double(r.x1.y),
            format_double(r.c1), format_double(r.r1),   format_double(r.x2.x),
            format_double(r.x2.y), format_double(r.c2), format_double(r.r2)};
        for (double mu : r.mu1) cells.push_back(format_double(mu));
        cells.push_back(format_double(r.u2max));
        cells.push_back(r.flags.empty() ? "-" : r.flags);
        csv.add_row_mixed(cells);
        if (std::isfinite(r.green_dev))
            csv.add_comment("green_dev t=" + format_double(r.t) + " value=" +
                            format_double(r.green_dev));
    }
    std::ostringstream sum;
    sum << "flags single_point_concentration="
        << (rep.single_point_concentration ? "yes" : "no")
        << " never_s_violation=" << (rep.never_s_violation ? "yes" : "no")
        << " resolution_exhausted=" << (rep.resolution_exhausted ? "yes" : "no");
    csv.add_comment(sum.str());
    csv.write(cfg.out_dir + "/blowup.csv", config_hash(cfg), cfg.n);
    out << "blowup: " << rep.rows.size() << " samples; " << sum.str() << "\n";
    return 0;
}

struct VerifyTable {
    std::ostream& out;
    bool all_pass = true;
    void row(const std::string& name, bool pass, double value) {
        all_pass &= pass;
        out << (pass ? "PASS  " : "FAIL  ") << name << "  ("
            << format_double(value) << ")\n";
    }
};

int cmd_verify(const ExperimentConfig& cfg, std::ostream& out) {
    Grid grid(cfg.n);
    SpectralWorkspace ws(grid);
    VerifyTable tab{out};

    // Torus operators.
    {
        const ScalarField one(grid, 1.0);
        tab.row("quadrature of 1 equals unit area",
                std::abs(integrate(one) - 1.0) < 1e-14,
                integrate(one) - 1.0);

        ScalarField c(grid);
        for (int ix = 0; ix < grid.n; ++ix)
            for (int iy = 0; iy < grid.n; ++iy)
                c.at(ix, iy) = std::cos(two_pi * grid.coord(ix));
        ScalarField lap = ws.laplacian(c);
        double err = 0;
        for (size_t i = 0; i < lap.size(); ++i)
            err = std::max(err,
                           std::abs(lap[i] + two_pi * two_pi * c[i]));
        tab.row("spectral Laplacian eigenfunction", err < 1e-9, err);

        std::mt19937_64 rng(cfg.seed + 7);
        std::normal_distribution<double> g;
        ScalarField r(grid);
        for (auto& v : r.values) v = g(rng);
        const double mean_r = integrate(r);
        for (auto& v : r.values) v -= mean_r;
        ScalarField back = ws.laplacian(ws.solve_poisson(r));
        tab.row("Poisson round-trip", max_abs_diff(back, r) < 1e-10,
                max_abs_diff(back, r));
        tab.row("Laplacian integrates to zero",
                std::abs(integrate(lap)) < 1e-12, integrate(lap));
        const double de = ws.dirichlet_energy(r);
        const double ibp = -0.5 * inner(r, ws.laplacian(r));
        tab.row("integration by parts", std::abs(de - ibp) / de < 1e-9,
                std::abs(de - ibp) / de);
    }

    // Energy functional with unit weights.
    const Model m1 = make_model(cfg.rho1, cfg.rho2, ScalarField(grid, 1.0),
                                ScalarField(grid, 1.0));
    {
        std::mt19937_64 rng(cfg.seed + 13);
        std::normal_distribution<double> g;
        ScalarField u(grid), v(grid);
        for (int kx = -3; kx <= 3; ++kx) {
            for (int ky = -3; ky <= 3; ++ky) {
                if (kx == 0 && ky == 0) continue;
                const double a = 0.1 * g(rng), b = 0.1 * g(rng);
                const double a2 = 0.1 * g(rng), b2 = 0.1 * g(rng);
                for (int ix = 0; ix < grid.n; ++ix) {
                    for (int iy = 0; iy < grid.n; ++iy) {
                        const double ph = two_pi * (kx * grid.coord(ix) +
                                                    ky * grid.coord(iy));
                        u.at(ix, iy) += a * std::cos(ph) + b * std::sin(ph);
                        v.at(ix, iy) += a2 * std::cos(ph) + b2 * std::sin(ph);
                    }
                }
            }
        }
        ScalarField up = u, um = u;
        const double fd_eps = 1e-4;
        for (size_t i = 0; i < u.size(); ++i) {
            up[i] += fd_eps * v[i];
            um[i] -= fd_eps * v[i];
        }
        const double fd =
            (energy_j(ws, up, m1) - energy_j(ws, um, m1)) / (2 * fd_eps);
        const double pairing = inner(energy_gradient(ws, u, m1), v);
        tab.row("energy gradient pairing",
                std::abs(fd - pairing) / std::abs(pairing) < 1e-5,
                std::abs(fd - pairing) / std::abs(pairing));

        ScalarField shifted = u;
        for (auto& x : shifted.values) x += 3.7;
        const double dj = std::abs(energy_j(ws, shifted, m1) -
                                   energy_j(ws, u, m1));
        tab.row("energy shift invariance", dj < 1e-10, dj);
        const double dm = std::abs(mt_gap(ws, shifted) - mt_gap(ws, u));
        tab.row("MT gap shift invariance", dm < 1e-12, dm);
    }

    // Green function.
    {
        const GreenData gd = green_function(ws, {0.5, 0.5});
        tab.row("Green mean (singular cell corrected)",
                std::abs(green_mean_singular_corrected(gd)) < 1e-6,
                green_mean_singular_corrected(gd));
        tab.row("Green expansion b1,b2 vanish",
                std::hypot(gd.b1, gd.b2) < 1e-4, std::hypot(gd.b1, gd.b2));

        ScalarField wtest(grid);
        for (int ix = 0; ix < grid.n; ++ix)
            for (int iy = 0; iy < grid.n; ++iy)
                wtest.at(ix, iy) =
                    std::cos(two_pi * grid.coord(ix)) +
                    0.5 * std::sin(2 * two_pi * grid.coord(iy));
        auto [gx, gy] = ws.gradient(gd.g);
        auto [wx, wy] = ws.gradient(wtest);
        const double lhs = inner(gx, wx) + inner(gy, wy);
        const double rhs = eight_pi * (wtest.at(gd.ip, gd.jp) -
                                       integrate(wtest));
        tab.row("Green pairing identity",
                std::abs(lhs - rhs) / std::abs(rhs) < 1e-4,
                std::abs(lhs - rhs) / std::abs(rhs));

        const GreenData gq = green_function(ws, {0.25, 0.75});
        double shift_err = 0;
        const int di = gq.ip - gd.ip, dj = gq.jp - gd.jp;
        for (int ix = 0; ix < grid.n; ++ix)
            for (int iy = 0; iy < grid.n; ++iy)
                shift_err = std::max(
                    shift_err,
                    std::abs(gq.g.at(grid.wrap(ix + di), grid.wrap(iy + dj)) -
                             gd.g.at(ix, iy)));
        tab.row("Green translation covariance", shift_err < 1e-9, shift_err);

        // Mean-field machinery at p = (1/2, 1/2).
        Model m_cfg = model_from_config(cfg, grid);
        MfeOptions opt;
        opt.tol_residual = cfg.tol_mfe;
        const MFESolution sol = solve_mfe(ws, gd, m_cfg, opt);
        tab.row("mean-field residual certificate",
                sol.residual <= cfg.tol_mfe, sol.residual);
        tab.row("mean-field minimizer mean-zero",
                std::abs(integrate(sol.w)) < 1e-10,
                std::abs(integrate(sol.w)));

        Model m_tiny = make_model(cfg.rho1, 1e-6, m_cfg.h1, m_cfg.h2);
        const MFESolution sol0 = solve_mfe(ws, gd, m_tiny, opt);
        const double wmax = std::max(std::abs(field_max(sol0.w)),
                                     std::abs(field_min(sol0.w)));
        tab.row("mean-field rho2->0 degeneration", wmax <= 1e-4, wmax);
    }

    // Flow basics with unit weights.
    {
        FlowState st = make_flow_state(ws, ScalarField(grid, 0.0), m1);
        FlowState st2 = step(ws, st, m1, 1e-2);
        tab.row("stationary point preserved",
                max_abs_diff(st2.u, st.u) < 1e-9, max_abs_diff(st2.u, st.u));

        ScalarField u0(grid);
        for (int ix = 0; ix < grid.n; ++ix)
            for (int iy = 0; iy < grid.n; ++iy)
                u0.at(ix, iy) = 0.1 * std::cos(two_pi * grid.coord(ix));
        FlowState s0 = make_flow_state(ws, u0, m1);
        FlowState s1 = step(ws, s0, m1, 1e-3);
        tab.row("one-step energy decrease", s1.energy <= s0.energy + 1e-12,
                s1.energy - s0.energy);

        const NormalizedPair pair = normalize(s1.u, m1, s1.du_dt);
        const double n1 =
            std::exp(log_weighted_mass(m1.h1, pair.u1, +1, "int h1 e^u1"));
        const double n2 =
            std::exp(log_weighted_mass(m1.h2, pair.u2, +1, "int h2 e^u2"));
        tab.row("normalization identity 1", std::abs(n1 - 1) < 1e-10, n1 - 1);
        tab.row("normalization identity 2", std::abs(n2 - 1) < 1e-10, n2 - 1);
    }

    out << (tab.all_pass ? "verify: all invariants PASS\n"
                         : "verify: FAILURES present\n");
    return tab.all_pass ? 0 : 2;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
    try {
        if (args.empty())
            throw validation_error(
                "usage: sinhgordon <flow|green|mfe|barrier|blowup|verify> "
                "[config] [key=value ...]");
        const std::string& sub = args[0];
        ExperimentConfig cfg;
        size_t i = 1;
        if (i < args.size() && args[i].find('=') == std::string::npos) {
            cfg = load_config_file(args[i]);
            ++i;
        }
        for (; i < args.size(); ++i) apply_override(cfg, args[i]);

        if (sub == "flow") return cmd_flow(cfg, out);
        if (sub == "green") return cmd_green(cfg, out);
        if (sub == "mfe") return cmd_mfe(cfg, out);
        if (sub == "barrier") return cmd_barrier(cfg, out);
        if (sub == "blowup") return cmd_blowup(cfg, out);
        if (sub == "verify") return cmd_verify(cfg, out);
        throw validation_error("unknown subcommand '" + sub + "'");
    } catch (const validation_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const solver_error& e) {
        err << "solver failure: " << e.what() << "\n";
        return 2;
    }
}

} // namespace sg
