#pragma once

#include <stdexcept>
#include <string>

namespace spill {

// Malformed input text (CSV cells, dates, fixture layouts).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Data that is well-formed but numerically unusable for a fit: constant
// series, collinear regressors, zero residual variance. Rolling windows that
// raise this are skipped and logged rather than aborting the run.
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spill
