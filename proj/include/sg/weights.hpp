#pragma once

#include <map>
#include <string>

#include "sg/field.hpp"

namespace sg {

/// Textual descriptor of a weight or initial-data function, e.g.
///   "gaussian_bump cx=0.5 cy=0.5 sigma=0.1 floor=0.0"
/// Keeping functions as descriptors (rather than data files) makes every
/// experiment reproducible from its config alone.
struct FunctionSpec {
    std::string kind;
    std::map<std::string, double> params;

    double param(const std::string& key, double fallback) const {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }
};

FunctionSpec parse_function_spec(const std::string& text);
std::string format_function_spec(const FunctionSpec& spec);

/// Samples a weight descriptor on the grid. Supported kinds:
///   constant v=1
///   gaussian_bump cx=0.5 cy=0.5 sigma=0.1 floor=0   (3x3 periodic images)
///   cosine_family a=1 b=0            exp(a cos 2 pi x + b cos 2 pi y)
///   clipped_cosine a=1 kx=1 ky=0     a * max(0, cos(2 pi (kx x + ky y)))
/// The result is validated non-negative.
ScalarField sample_weight(const FunctionSpec& spec, Grid grid);

/// Samples an initial-data descriptor. Supported kinds:
///   zero
///   cosine ax=1 ay=0                 ax cos(2 pi x) + ay cos(2 pi y)
///   bubble cx=0.5 cy=0.5 eps=1e-3 offset=0
///                                    log(eps / (pi (r^2+eps)^2)) + offset
///   random amp=0.1 kmax=4            seeded band-limited field
/// ("testfn" initial data is assembled at the experiment layer since it
/// needs the Green/mean-field machinery.)
ScalarField sample_initial_data(const FunctionSpec& spec, Grid grid,
                                unsigned long seed);

} // namespace sg
