#pragma once

// Component-function description of an almost contact B-metric structure on
// a single coordinate chart.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "soliton_forge/jet.hpp"
#include "soliton_forge/point.hpp"
#include "soliton_forge/tensor.hpp"

namespace sforge {

/// Coordinate functions seeded as third-order jets at the evaluation point.
using CoordinateJets = std::span<const Jet3>;

/// Scalar component function written generically over jets.
using ScalarField = std::function<Jet3(CoordinateJets)>;

/// Tensor-valued component function (all components at once).
using TensorField = std::function<Tensor<Jet3>(CoordinateJets)>;

/// Returns an explanation when the point lies outside the chart domain.
using DomainGuard = std::function<std::optional<std::string>(const Point&)>;

/// (phi, xi, eta, g) over a chart of dimension 2n+1. Immutable once built.
struct ManifoldSpec {
  int n = 1;
  TensorField metric;  // (0,2)
  TensorField phi;     // (1,1), phi(d_b) = phi^a_b d_a
  TensorField xi;      // (1,0)
  TensorField eta;     // (0,1)
  DomainGuard domain_guard;
  std::vector<std::string> coordinate_names;

  int dim() const noexcept { return 2 * n + 1; }
  std::string coordinate_name(int i) const;
};

/// Default names x1..x2n, t.
std::vector<std::string> default_coordinate_names(int n);

/// Coordinate jets x^a seeded at p.
std::vector<Jet3> seed_coordinates(const Point& p);

/// Throws DomainError when p has the wrong length or fails the domain guard.
void require_admitted(const ManifoldSpec& m, const Point& p);

/// Truncated Taylor data of a scalar field at p. Domain violations raised
/// inside the field are rethrown naming the coordinates involved.
Jet3 evaluate_jet(const ScalarField& field, const Point& p, std::span<const std::string> names = {});

/// All components of a tensor field at p, as jets.
Tensor<Jet3> evaluate_field(const TensorField& field, const Point& p, std::span<const std::string> names = {});

/// Tensor field that is constant across the chart.
TensorField constant_field(TensorComponents value);

/// Scalar multiple of a tensor field.
TensorField scaled_field(TensorField field, double s);

/// The constant-length vertical potential k * xi.
TensorField vertical_potential(const ManifoldSpec& m, double k);

}  // namespace sforge
