#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sg/weights.hpp"

namespace sg {

/// Everything a reproducible experiment needs, parsed from the
/// line-oriented `key = value` config format ('#' starts a comment).
struct ExperimentConfig {
    int n = 128;
    double rho1 = eight_pi_value();
    double rho2 = eight_pi_value() / 2;
    FunctionSpec h1{"constant", {{"v", 1.0}}};
    FunctionSpec h2{"constant", {{"v", 1.0}}};
    FunctionSpec u0{"zero", {}};
    double dt_init = 1e-4;
    double dt_max = 1e-2;
    double t_end = 1.0;
    double tol_mass = 1e-6;
    double tol_energy = 1e-8; // relative; absolute = tol*|J(u0)| + 1e-12
    double tol_mfe = 1e-8;
    double tol_residual = 1e-6;
    double tol_dissipation = 1e-8;
    double tol_final_change = 1e-6;
    double blowup_margin = 2.0;
    std::vector<double> eps_list;
    std::vector<double> delta_list{0.05, 0.1, 0.2};
    int p_resolution = 4;
    std::string out_dir = "out";
    unsigned long seed = 0;
    long max_steps = 200000;
    int sample_every = 10;
    bool mfe_multistart = false;

    static double eight_pi_value();
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// Applies an override of the form "key=value" (same grammar as one
/// config line) on top of an existing config.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

/// Canonical serialization; re-parsing reproduces the config exactly.
std::string canonical_config(const ExperimentConfig& cfg);

uint64_t config_hash(const ExperimentConfig& cfg);

} // namespace sg
