#pragma once

#include <stdexcept>
#include <string>

namespace gscol {

// Invalid parameters or an unsupported configuration, detected before any numerics run.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An iterative or adaptive routine exhausted its budget without reaching tolerance.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A computed quantity violates a correctness guarantee (conditioning, consistency checks).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The mesh is too coarse for the block systems to be safely solvable; retry with larger N.
struct StepSizeError : NumericalError {
    using NumericalError::NumericalError;
};

} // namespace gscol
