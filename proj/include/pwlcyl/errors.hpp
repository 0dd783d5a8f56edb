#pragma once

#include <stdexcept>
#include <string>

namespace pwlcyl {

/// A hypothesis of the sewing theory fails for the given system. The message
/// names the hypothesis that failed.
class TheoryNotApplicable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or incomplete user input (scenario files, CLI arguments).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure broke down (NaN, step underflow, failed structure
/// check after a coordinate change).
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pwlcyl
