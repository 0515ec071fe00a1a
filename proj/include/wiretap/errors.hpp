#pragma once

#include <stdexcept>
#include <string>

namespace wiretap {

// Precondition violations (bad shapes, unnormalized masses, out-of-range
// parameters) are reported with std::invalid_argument. The three types below
// carry the failure classes that callers such as the CLI map onto distinct
// exit codes.

/// Input is well formed but degenerate for the requested computation, e.g. a
/// zero-capacity channel asked for a finite exponent or a slope fit.
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configured work cap (type enumeration count, grid size, output-law
/// entries) would be exceeded.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method failed or produced a value that should be impossible
/// (for example a support violation in a sampled output law).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wiretap
