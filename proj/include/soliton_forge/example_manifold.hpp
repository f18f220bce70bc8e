#pragma once

// The (2n+1)-dimensional example family: a flat cosymplectic B-metric
// structure on a subset of R^{2n+1} and its contact conformal deformation
//
//   gbar = e^{2u} cos2v g + e^{2u} sin2v g~ + (1 - e^{2u} cos2v - e^{2u} sin2v) eta (x) eta,
//   u = 1/2 sum ln[(x^i)^2 + (x^{n+i})^2] + l(t),   v = sum arctan(x^i / x^{n+i}),
//
// together with closed-form expressions for its curvature and soliton data
// in terms of the profile l(t).

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "soliton_forge/manifold.hpp"

namespace sforge {

enum class ProfileKind { log, scaled_log, linear, exp, custom };

std::string to_string(ProfileKind kind);

/// The profile l(t) with derivatives through third order.
class EllProfile {
 public:
  using Derivatives = std::array<double, 4>;  // l, l', l'', l'''

  /// l = c ln t. c = 1 gives the non-regular conformal scalar f = k/t.
  static EllProfile log(double c = 1.0);
  /// l = ((1 + sqrt 3)/2) ln t, the regular case f = (1 + sqrt 3) k / (2t).
  static EllProfile scaled_log();
  /// l = alpha t. Einstein case.
  static EllProfile linear(double alpha = 1.0);
  /// l = -(q(2n-1)/k^2) exp(-k t/(2n-1)), giving f = q exp(-k t/(2n-1)).
  static EllProfile exponential(double q, double k, int n);
  /// User-supplied profile; `derivatives` returns l, l', l'', l''' at t.
  static EllProfile custom(std::string label, std::function<Derivatives(double)> derivatives,
                           bool positive_t_only = false);

  ProfileKind kind() const noexcept { return kind_; }
  const std::vector<double>& params() const noexcept { return params_; }
  const std::string& label() const noexcept { return label_; }
  /// Log-family profiles are only real for t > 0.
  bool positive_t_only() const noexcept { return positive_t_only_; }

  Derivatives derivatives(double t) const { return derivs_(t); }
  double value(double t) const { return derivs_(t)[0]; }
  double first(double t) const { return derivs_(t)[1]; }
  double second(double t) const { return derivs_(t)[2]; }
  double third(double t) const { return derivs_(t)[3]; }

  /// l evaluated on a jet argument.
  Jet3 apply(const Jet3& t) const;

 private:
  EllProfile(ProfileKind kind, std::vector<double> params, std::string label, std::function<Derivatives(double)> d,
             bool positive_t_only);

  ProfileKind kind_;
  std::vector<double> params_;
  std::string label_;
  std::function<Derivatives(double)> derivs_;
  bool positive_t_only_;
};

struct ExampleManifold {
  int n = 1;
  double k = 1.0;
  int v_sign = 1;
  EllProfile profile;
  ManifoldSpec base;         // flat g, class F0
  ManifoldSpec transformed;  // gbar
  ScalarField u;
  ScalarField v;

  /// The potential k xi of the transformed structure.
  TensorField potential() const { return vertical_potential(transformed, k); }
};

/// Builds both structures. Throws UsageError for n < 1, k = 0, v_sign not
/// +-1, or a profile with l'(t) = 0 on the default t values.
///
/// v_sign = -1 replaces v by -v. With that choice F takes the torse-forming
/// F5 form and theta* = 2n du(xi) eta hold; with the formulas as written they
/// do not (see README).
ExampleManifold build_example(int n, EllProfile profile, double k, int v_sign = 1);

/// Closed-form quantities of the transformed structure at p (g below is gbar).
struct ExampleOracles {
  TensorComponents riemann04;
  TensorComponents ricci;
  double tau = 0.0;
  double tau_star = 0.0;
  double a = 0.0, b = 0.0, c = 0.0;
  double lambda = 0.0, mu = 0.0, nu = 0.0;
  double f = 0.0;
  double f_prime = 0.0;  // df(xi) = k l''
  double kdfxi_plus_f2 = 0.0;
  double K_xi = 0.0;
  double theta_star_xi = 0.0;
};

ExampleOracles oracles(const ExampleManifold& e, const Point& p);

/// Default sample values.
const std::vector<double>& default_coordinate_values();
const std::vector<double>& default_t_values();

/// Deterministic selection of `size` points from the product grid
/// coordinate_values^{2n} x t_values. t cycles fastest; the horizontal part
/// is sampled at evenly spaced positions of its product enumeration.
std::vector<Point> product_grid(int n, const std::vector<double>& coordinate_values,
                                const std::vector<double>& t_values, int size);

std::vector<Point> default_grid(const ExampleManifold& e, int size);

}  // namespace sforge
