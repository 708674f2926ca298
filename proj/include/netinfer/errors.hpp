#pragma once

#include <stdexcept>
#include <string>

namespace netinfer {

// Bad inputs: malformed files, invalid parameters, infeasible margins.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed text input; the message names the offending 1-based line.
struct ParseError : ValidationError {
  using ValidationError::ValidationError;
};

// Numerical or runtime failures: non-convergence, aborted replications.
struct ComputeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace netinfer
