#pragma once

// Torse-forming potentials, regularity, Einstein-like and Ricci-like soliton
// fits, and the identities relating them.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "soliton_forge/curvature.hpp"
#include "soliton_forge/manifold.hpp"

namespace sforge {

/// Named scalar residuals with an overall verdict.
struct RelationReport {
  std::vector<std::pair<std::string, double>> residuals;
  std::vector<std::string> notices;
  bool pass = false;
  double worst() const;
  double residual(const std::string& name) const;
};

struct TorseFormingReport {
  bool is_torse_forming = false;
  bool trivial = false;  // f = 0 within tolerance (parallel potential)
  double f = 0.0;
  std::vector<double> gamma;
  double k = 0.0;  // eta(theta)
  double residual = 0.0;
};

/// The fit carried out in first-order jets: f and gamma together with their
/// first partial derivatives at the point.
struct TorseFormingJet {
  Jet1 f;
  std::vector<Jet1> gamma;
  TorseFormingReport report;
};

/// Least-squares solve of nabla theta = f id + theta (x) gamma. Throws
/// DegeneracyError when theta(p) = 0.
TorseFormingReport detect_torse_forming(const LocalGeometry& geo, const TensorField& theta, double tol);
TorseFormingReport detect_torse_forming(const ManifoldSpec& m, const TensorField& theta, const Point& p, double tol);
TorseFormingJet torse_forming_jet(const LocalGeometry& geo, const TensorField& theta, double tol);

struct RegularityReport {
  double kdfxi_plus_f2 = 0.0;
  bool is_regular = false;
  double f = 0.0;
  double k = 0.0;
  double df_xi = 0.0;        // central difference of refitted f
  double df_xi_jet = 0.0;    // from the jet fit
  double route_spread = 0.0; // |df_xi - df_xi_jet|
};

/// Step along xi for the refit derivative.
inline constexpr double refit_step = 1e-4;

/// k df(xi) + f^2 with df(xi) from refitting f at p +- eps xi, p +- 2 eps xi.
RegularityReport regularity(const ManifoldSpec& m, const TensorField& theta, const Point& p, double tol,
                            double eps = refit_step);

struct FitResult {
  std::array<double, 3> coeffs{};  // along g, g~, eta (x) eta
  double residual = 0.0;
  bool pointwise = true;
};

/// Least-squares coefficients of target in span{g, g~, eta (x) eta}. Inner
/// product and residual norm are Frobenius in a frame where g = diag(+-1),
/// i.e. weighted by |g|^{-1}; residual is |remainder| / max(1, |target|).
FitResult fit_span(const LocalGeometry& geo, const TensorComponents& target);

/// g~ at the point from values of g, phi, eta.
TensorComponents associated_metric_values(const LocalGeometry& geo);

struct EinsteinLikeFit {
  FitResult fit;  // (a, b, c)
  bool almost_einstein_like = false;
  bool almost_eta_einstein = false;
  bool almost_einstein = false;
};
EinsteinLikeFit einstein_like_fit(const LocalGeometry& geo, double tol);
EinsteinLikeFit einstein_like_fit(const ManifoldSpec& m, const Point& p, double tol);

enum class SolitonKind { shrinking, steady, expanding };
std::string to_string(SolitonKind kind);

struct SolitonFit {
  FitResult fit;  // (lambda, mu, nu)
  bool almost_ricci_like = false;
  bool almost_eta_ricci = false;
  bool almost_ricci = false;
  SolitonKind kind = SolitonKind::steady;
};
SolitonFit soliton_fit(const LocalGeometry& geo, const TensorField& theta, double tol);
SolitonFit soliton_fit(const ManifoldSpec& m, const TensorField& theta, const Point& p, double tol);

/// The five scalar relations between the two coefficient triples.
RelationReport verify_thm32(const std::array<double, 3>& abc, const std::array<double, 3>& lmn, double f, double k,
                            double df_xi, int n, double tol);

struct Cor35Input {
  double f = 0.0;
  double f_prime = 0.0;  // df(xi)
  double k = 1.0;
  double a = 0.0;
  double tau = 0.0;
  int n = 1;
  std::optional<double> K_xi;
  double grad_f_horizontal = 0.0;
};
RelationReport verify_cor35(const Cor35Input& in, double tol);

/// Sectional curvature of xi-sections through the given directions.
struct XiSectionSweep {
  std::vector<double> values;
  int skipped_degenerate = 0;
  double spread() const;
};
XiSectionSweep xi_sections(const LocalGeometry& geo, const std::vector<std::vector<double>>& directions);
/// Deterministic pseudo-random directions, components in [-1, 1].
std::vector<std::vector<double>> random_directions(int dim, int count, unsigned seed);

/// max over basis of |df - df(xi) eta|.
double horizontal_gradient(const TorseFormingJet& tf, const LocalGeometry& geo);

/// Residuals of the curvature equalities for a vertical torse-forming
/// potential, using the exact jet derivative of f.
RelationReport thm22_curvature_checks(const LocalGeometry& geo, const TensorField& theta, double tol);
RelationReport thm22_curvature_checks(const ManifoldSpec& m, const TensorField& theta, const Point& p, double tol);

/// A (0,2) tensor built at a point from its local geometry, as first-order
/// jets so that it can be differentiated once more.
using GeometricField = std::function<Tensor<Jet1>(const LocalGeometry&)>;
/// Scalar built the same way.
using GeometricScalar = std::function<Jet1(const LocalGeometry&)>;

GeometricField metric_multiple(double c);
GeometricScalar constant_scalar(double c);
/// The conformal scalar f of theta, as a jet.
GeometricScalar conformal_scalar(TensorField theta);
/// h = 1/2 L_theta g + rho + mu g~ + nu eta (x) eta.
GeometricField soliton_tensor(TensorField theta, GeometricScalar mu, GeometricScalar nu);

struct ParallelReport {
  double max_nabla_norm = 0.0;
  bool is_parallel = false;
  std::optional<double> constant_multiple;
  double multiple_residual = 0.0;
  double h_curvature_xi = 0.0;  // max |h(R(x,y)xi, xi)|
  double h_vertical = 0.0;      // max |h(x,xi) - h(xi,xi) eta(x)|
  std::vector<double> nabla_norms;  // per grid point
};

/// The per-point part of parallel_check.
struct ParallelPoint {
  double nabla_norm = 0.0;
  double h_curvature_xi = 0.0;
  double h_vertical = 0.0;
  TensorComponents h;
  TensorComponents g;
};
ParallelPoint parallel_point(const LocalGeometry& geo, const GeometricField& h);
ParallelReport combine_parallel(const std::vector<ParallelPoint>& points, double tol);

ParallelReport parallel_check(const ManifoldSpec& m, const GeometricField& h, const std::vector<Point>& grid,
                              double tol);

}  // namespace sforge
