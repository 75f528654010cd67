#ifndef TRAPFK_ERRORS_HPP
#define TRAPFK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace trapfk {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A lattice site was queried outside the environment's addressable region.
class RegionViolation : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

/// Parameters outside the supported domain (alpha, epsilon/M ordering, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A query beyond what a trajectory or path covers.
class HorizonExceeded : public Error {
 public:
  using Error::Error;
};

/// Problem too large for the exact method; callers may fall back to Monte Carlo.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Empty or otherwise unusable input data.
class InputError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The requested quantity does not exist (e.g. the free Green's function for d <= 2).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace trapfk

#endif  // TRAPFK_ERRORS_HPP
