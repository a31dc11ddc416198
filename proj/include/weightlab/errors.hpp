#pragma once

#include <stdexcept>
#include <string>

namespace weightlab {

/// Argument outside the mathematical domain of an operation (r >= 1, p < 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical routine could not reach the requested accuracy.
/// Carries the best estimate it produced and an error bound for it.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double estimate, double error_bound,
                bool divergent = false)
      : std::runtime_error(what),
        estimate_(estimate),
        error_bound_(error_bound),
        divergent_(divergent) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }
  // True when the failure is a diverging integral/series rather than a
  // budget problem.
  bool divergent() const noexcept { return divergent_; }

 private:
  double estimate_;
  double error_bound_;
  bool divergent_;
};

/// Oscillating weight construction could not reach the requested depth.
class ConstructionError : public std::runtime_error {
 public:
  ConstructionError(const std::string& what, int achieved_depth)
      : std::runtime_error(what), achieved_depth_(achieved_depth) {}
  int achieved_depth() const noexcept { return achieved_depth_; }

 private:
  int achieved_depth_;
};

/// Truncated series too short for the requested accuracy.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, double tail_estimate)
      : std::runtime_error(what), tail_estimate_(tail_estimate) {}
  double tail_estimate() const noexcept { return tail_estimate_; }

 private:
  double tail_estimate_;
};

}  // namespace weightlab
