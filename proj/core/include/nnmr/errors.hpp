#pragma once

#include <stdexcept>
#include <string>

namespace nnmr {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Vector/matrix dimension mismatch in an operation argument.
struct ShapeError : Error {
  using Error::Error;
};

// Malformed file content. Messages carry field-level context
// ("layers[2].weights row 1: ...").
struct ParseError : Error {
  using Error::Error;
};

// A documented operation precondition does not hold; the message names the
// violated clause.
struct PreconditionError : Error {
  using Error::Error;
};

// A partition request exceeds the configured cell cap.
struct BudgetError : Error {
  using Error::Error;
};

// Validated integration could not establish an a-priori enclosure within the
// iteration budget. Shrinking dt usually resolves this.
struct EnclosureError : Error {
  using Error::Error;
};

// Distillation diverged (non-decreasing loss or non-finite parameters).
struct TrainingError : Error {
  using Error::Error;
};

// A controller input box left the set the reduction precision was computed
// over; the stored rho is not valid there. Recompute the precision over a
// larger input set.
struct PrecisionDomainError : Error {
  using Error::Error;
};

// Bad scenario/run configuration.
struct ConfigError : Error {
  using Error::Error;
};

// Non-validated reference integration failed (step size underflow etc.).
struct SimulationError : Error {
  using Error::Error;
};

}  // namespace nnmr
