#pragma once

#include <stdexcept>
#include <string>

namespace cpm {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value or position outside the range where an operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A value interval straddles an inflection point of the flux.
class ConvexityError : public Error {
 public:
  using Error::Error;
};

// Invalid user configuration (run config, flux definition, sampling parameters).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Operation called on a configuration that violates its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Advancing further than the next collision would create a breaking wave.
class OvershootError : public Error {
 public:
  using Error::Error;
};

// No merged value satisfying the area balance could be bracketed.
class MergeInfeasibleError : public Error {
 public:
  using Error::Error;
};

// The entropy fix exhausted its insertion budget without a resolved merge.
class UnresolvedMergeError : public Error {
 public:
  using Error::Error;
};

// Configurations the method does not handle (two interacting inflection particles, ...).
class UnsupportedCaseError : public Error {
 public:
  using Error::Error;
};

// Finite-volume time step exceeded the stability limit.
class CflError : public Error {
 public:
  using Error::Error;
};

}  // namespace cpm
