#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sg/config.hpp"
#include "sg/energy.hpp"

namespace sg {

/// Samples the configured weights and interaction strengths on the grid.
Model model_from_config(const ExperimentConfig& cfg, Grid grid);

/// Entry point shared by the binary and the in-process CLI tests.
/// args = { subcommand, [config-path], [key=value overrides...] } with
/// subcommand in { flow, green, mfe, barrier, blowup, verify }.
/// Returns 0 on success, 1 on validation errors, 2 on solver failures.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

} // namespace sg
