#pragma once

// Pointwise checks of the almost contact B-metric axioms, the associated
// metric, the fundamental tensor F and its Lee forms.

#include <string>
#include <vector>

#include "soliton_forge/curvature.hpp"
#include "soliton_forge/manifold.hpp"

namespace sforge {

struct AxiomResidual {
  std::string name;
  double residual = 0.0;
};

struct StructureReport {
  std::vector<AxiomResidual> residuals;  // eight axioms, fixed order
  int positive_eigenvalues = 0;
  int negative_eigenvalues = 0;
  bool signature_ok = false;
  bool pass = false;

  double worst() const;
  double residual(const std::string& name) const;
};

/// Residuals of phi xi, phi^2 + id - eta(x)xi, eta o phi, eta(xi) - 1,
/// g(phi.,phi.) + g - eta(x)eta, g(.,xi) - eta, g(xi,xi) - 1 and the symmetry
/// of g, plus the (n+1, n) signature check.
StructureReport verify_axioms(const ManifoldSpec& m, const Point& p, double tol);

/// g~(x,y) = g(x, phi y) + eta(x) eta(y), as a field.
TensorField associated_metric(const ManifoldSpec& m);

/// The same structure with g replaced by its associated metric.
ManifoldSpec with_associated_metric(const ManifoldSpec& m);

/// F(x,y,z) = g((nabla_x phi) y, z).
TensorComponents fundamental_F(const ManifoldSpec& m, const Point& p);
TensorComponents fundamental_F(const LocalGeometry& geo);

struct LeeForms {
  std::vector<double> theta;
  std::vector<double> theta_star;
  std::vector<double> omega;
};

/// theta(z) = g^{ij} F(e_i,e_j,z), theta*(z) = g^{ij} F(e_i,phi e_j,z),
/// omega(z) = F(xi,xi,z).
LeeForms lee_forms(const ManifoldSpec& m, const Point& p);
LeeForms lee_forms(const LocalGeometry& geo);

/// Residuals of the algebraic identities F is known to satisfy.
struct FIdentityReport {
  double symmetry_23 = 0.0;       // F(x,y,z) - F(x,z,y)
  double decomposition = 0.0;     // F - F(x,phi y,phi z) - eta(y)F(x,xi,z) - eta(z)F(x,y,xi)
  double nabla_xi = 0.0;          // F(x,phi y,xi) - g(nabla_x xi, y)
  double lee_identity = 0.0;      // omega(xi), theta* o phi + theta o phi^2
};
FIdentityReport f_identities(const LocalGeometry& geo);

struct ClassFlags {
  bool is_F0 = false;
  bool matches_F5_torse_form = false;
  double fitted_scale = 0.0;  // s in F = -s {g(x,phi y)eta(z) + g(x,phi z)eta(y)}; equals f/k
  double F_norm = 0.0;
  double template_residual = 0.0;
};

ClassFlags class_flags(const ManifoldSpec& m, const Point& p, double tol);
ClassFlags class_flags(const LocalGeometry& geo, double tol);

}  // namespace sforge
