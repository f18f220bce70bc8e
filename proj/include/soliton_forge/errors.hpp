#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sforge {

/// Base class of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A component function was evaluated outside its domain (ln of a
/// non-positive number, division by zero, a point rejected by a guard).
/// `coordinates` lists the chart coordinates the offending argument depends on.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what, std::vector<int> coordinates = {})
      : Error(what), coordinates_(std::move(coordinates)) {}

  const std::vector<int>& coordinates() const noexcept { return coordinates_; }

 private:
  std::vector<int> coordinates_;
};

/// Misuse of an API: bad slot, wrong valence, mismatched dimensions.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A metric (or other matrix that must be inverted) is singular at the point.
class SingularMetricError : public Error {
 public:
  SingularMetricError(const std::string& what, double condition_estimate)
      : Error(what), condition_estimate_(condition_estimate) {}

  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// Degenerate input to a geometric construction: null plane, vanishing
/// potential, rank-deficient fitting basis.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

}  // namespace sforge
