#pragma once

#include <stdexcept>
#include <string>

namespace kapila {

/// Base class for every failure raised by the solver library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A thermodynamic state that cannot be evaluated (negative density,
/// non-positive sound-speed radicand, ...).
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/// The mixture pressure relation has a non-positive denominator.
class DegenerateEosError : public Error {
 public:
  using Error::Error;
};

/// The per-phase Hugoniot system has no admissible solution.
class InfeasibleJumpError : public Error {
 public:
  using Error::Error;
};

/// An expansion drives the pressure to the cavitation floor of a phase, or
/// the two rarefaction branches of a Riemann problem cannot meet.
class CavitationError : public Error {
 public:
  using Error::Error;
};

/// Iterative solve did not converge.  Carries the last bracketing interval.
class SolverFailureError : public Error {
 public:
  SolverFailureError(const std::string& what, double lo, double hi)
      : Error(what), lo_(lo), hi_(hi) {}
  double bracket_lo() const noexcept { return lo_; }
  double bracket_hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// The intermediate volume fraction left the interval in which the
/// semi-implicit update has a unique root.
class BoundViolationError : public Error {
 public:
  using Error::Error;
};

/// The mid-time interface state is not admissible.
class FluxFailureError : public Error {
 public:
  using Error::Error;
};

/// A time step produced an invalid cell or could not find an admissible dt.
class StepFailureError : public Error {
 public:
  using Error::Error;
};

/// Bad user configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace kapila
