#pragma once

#include <stdexcept>
#include <string>

namespace sweep {

/// Base class for all recoverable library failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dykstra's iteration ran out of sweeps before reaching the requested tolerance.
class PolytopeNonConvergence : public Error {
 public:
  using Error::Error;
};

/// The initial point of a constrained scheme lies outside C(0).
class InfeasibleStart : public Error {
 public:
  using Error::Error;
};

/// A Cholesky pivot of the fBm covariance fell below the positivity threshold.
class CovarianceNotPD : public Error {
 public:
  using Error::Error;
};

/// Raised only on request (strict mode); solvers themselves report
/// non-convergence through SweepingRun::converged.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// Two paths that must share a time grid do not.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sweep
