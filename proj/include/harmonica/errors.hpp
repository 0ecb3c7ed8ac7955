#pragma once

#include <stdexcept>
#include <string>

namespace harmonica {

/// Shapes of a game and a profile (or two games) do not match.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point that must lie in the interior of its simplex / corner of cube does not.
class BoundaryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed game data (bad JSON, wrong lengths, non-finite payoffs).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative linear solve did not reach the requested tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, long iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}
  long iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  long iterations_;
  double residual_;
};

/// ODE step size collapsed below the representable minimum.
class StiffnessError : public std::runtime_error {
 public:
  StiffnessError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace harmonica
