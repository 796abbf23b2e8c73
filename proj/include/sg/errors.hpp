#pragma once

#include <stdexcept>

namespace sg {

/// Invalid user input or violated precondition. Maps to CLI exit code 1.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iterative solver failed to converge or a runtime monitor tripped.
/// Maps to CLI exit code 2.
struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace sg
