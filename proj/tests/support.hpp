#pragma once

// Shared helpers for the test binaries. Oracles here are written
// independently of the library code paths they check.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "soliton_forge/example_manifold.hpp"
#include "soliton_forge/manifold.hpp"
#include "soliton_forge/tensor.hpp"

namespace testing {

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

inline double max_abs_diff(const sforge::TensorComponents& a, const sforge::TensorComponents& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

inline sforge::TensorComponents matrix(int dim, std::vector<double> rows) {
  return sforge::TensorComponents({0, 2}, dim, std::move(rows));
}

inline sforge::Point p3(double a, double b, double t) { return sforge::Point{a, b, t}; }

/// Every preset used by the family tests.
inline std::vector<std::pair<std::string, std::function<sforge::EllProfile(double, int)>>> presets() {
  using sforge::EllProfile;
  return {{"log", [](double, int) { return EllProfile::log(); }},
          {"scaled_log", [](double, int) { return EllProfile::scaled_log(); }},
          {"linear", [](double, int) { return EllProfile::linear(1.0); }},
          {"exp", [](double k, int n) { return EllProfile::exponential(1.0, k, n); }}};
}

/// Random admitted point of the example chart: horizontal coordinates in
/// +-[0.3, 2], t in [0.3, 2].
inline sforge::Point random_point(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> mag(0.3, 2.0);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> x;
  for (int i = 0; i < 2 * n; ++i) x.push_back(sign(rng) ? mag(rng) : -mag(rng));
  x.push_back(mag(rng));
  return sforge::Point(std::move(x));
}

/// n = 1 metric gbar of the example family assembled by hand:
/// A g0 + B g~0 + (1 - A - B) dt^2 with g0 = diag(-1, 1, 1) and g~0 having
/// unit off-diagonal entries in the (x1, x2) block.
inline sforge::TensorComponents hand_gbar_n1(double ell, double x1, double x2, double t_unused, int v_sign = 1) {
  (void)t_unused;
  const double e2u = std::exp(2.0 * ell) * (x1 * x1 + x2 * x2);
  const double v = v_sign * std::atan(x1 / x2);
  const double A = e2u * std::cos(2.0 * v), B = e2u * std::sin(2.0 * v);
  return matrix(3, {-A, B, 0.0, B, A, 0.0, 0.0, 0.0, 1.0});
}

}  // namespace testing
