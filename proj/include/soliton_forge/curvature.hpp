#pragma once

// Levi-Civita connection and curvature of a chart metric at a point.
//
// Conventions:
//   Gamma^k_{ij}: nabla_{d_i} d_j = Gamma^k_{ij} d_k
//   R(x,y)z = nabla_x nabla_y z - nabla_y nabla_x z - nabla_[x,y] z
//   riemann (1,3) slots (a; x, y, z) hold (R(d_x, d_y) d_z)^a
//   R(x,y,z,w) = g(R(x,y)z, w),  rho(y,z) = trace of x -> R(x,y)z
//   covariant derivatives put the differentiation slot first among the
//   covariant slots.

#include <string>
#include <vector>

#include "soliton_forge/manifold.hpp"
#include "soliton_forge/tensor.hpp"

namespace sforge {

/// Covariant derivative of a jet tensor given Christoffel jets of matching
/// order. Supports valence rank up to 4.
template <int N>
Tensor<Jet<N - 1>> covariant_derivative(const Tensor<Jet<N>>& t, const Tensor<Jet<N - 1>>& gamma) {
  const Valence v = t.valence();
  if (v.rank() > 4) throw UsageError("covariant_derivative: unsupported valence (rank > 4)");
  const int dim = t.dim();
  const Valence rv{v.up, v.down + 1};
  const Tensor<Jet<N - 1>> tt = truncate<N - 1>(t);
  Tensor<Jet<N - 1>> out(rv, dim, Jet<N - 1>(dim));
  std::vector<int> ridx(rv.rank()), idx(v.rank());
  for (std::size_t pos = 0; pos < out.size(); ++pos) {
    out.unflatten(pos, ridx);
    const int m = ridx[v.up];
    for (int s = 0; s < v.up; ++s) idx[s] = ridx[s];
    for (int s = 0; s < v.down; ++s) idx[v.up + s] = ridx[v.up + 1 + s];
    Jet<N - 1> acc = t.at(idx).derivative(m);
    for (int s = 0; s < v.up; ++s) {
      const int a = idx[s];
      for (int c = 0; c < dim; ++c) {
        idx[s] = c;
        const auto& gam = gamma(a, m, c);
        if (!is_exact_zero(gam)) acc += gam * tt.at(idx);
      }
      idx[s] = a;
    }
    for (int s = 0; s < v.down; ++s) {
      const int b = idx[v.up + s];
      for (int c = 0; c < dim; ++c) {
        idx[v.up + s] = c;
        const auto& gam = gamma(c, m, b);
        if (!is_exact_zero(gam)) acc -= gam * tt.at(idx);
      }
      idx[v.up + s] = b;
    }
    out.data()[pos] = std::move(acc);
  }
  return out;
}

/// (L_v g)(x,y) = g(nabla_x v, y) + g(x, nabla_y v) from the covariant
/// derivative (1,1) jet of v (slots: a; x).
template <int N>
Tensor<Jet<N>> lie_metric_from(const Tensor<Jet<N>>& nabla_v, const Tensor<Jet<N>>& g) {
  const int dim = g.dim();
  Tensor<Jet<N>> out({0, 2}, dim, Jet<N>(dim));
  for (int x = 0; x < dim; ++x)
    for (int y = x; y < dim; ++y) {
      Jet<N> acc(dim);
      for (int a = 0; a < dim; ++a) {
        acc += g(a, y) * nabla_v(a, x);
        acc += g(x, a) * nabla_v(a, y);
      }
      out(x, y) = acc;
      out(y, x) = acc;
    }
  return out;
}

/// Values and jets of the metric, connection and curvature at one point.
class LocalGeometry {
 public:
  LocalGeometry(const ManifoldSpec& m, const Point& p);

  const ManifoldSpec& manifold() const noexcept { return m_; }
  const Point& point() const noexcept { return p_; }
  int n() const noexcept { return m_.n; }
  int dim() const noexcept { return m_.dim(); }

  const Tensor<Jet3>& metric_jet() const noexcept { return g_; }
  const Tensor<Jet3>& phi_jet() const noexcept { return phi_; }
  const Tensor<Jet3>& xi_jet() const noexcept { return xi_; }
  const Tensor<Jet3>& eta_jet() const noexcept { return eta_; }
  const Tensor<Jet2>& inverse_metric_jet() const noexcept { return ginv_; }
  const Tensor<Jet2>& christoffel_jet() const noexcept { return gamma_; }
  const Tensor<Jet1>& riemann_jet() const noexcept { return riem_; }
  const Tensor<Jet1>& ricci_jet() const noexcept { return ricci_; }

  /// Christoffel jets truncated to order M.
  template <int M>
  Tensor<Jet<M>> christoffel_order() const {
    return truncate<M>(gamma_);
  }

  /// Covariant derivative of a jet tensor of any order 1..3.
  template <int N>
  Tensor<Jet<N - 1>> nabla(const Tensor<Jet<N>>& t) const {
    return covariant_derivative<N>(t, christoffel_order<N - 1>());
  }

  /// Evaluates a tensor field at this point as jets.
  Tensor<Jet3> field(const TensorField& f) const;

  const TensorComponents& metric() const noexcept { return gv_; }
  const TensorComponents& inverse_metric() const noexcept { return ginvv_; }
  const TensorComponents& phi() const noexcept { return phiv_; }
  const TensorComponents& xi() const noexcept { return xiv_; }
  const TensorComponents& eta() const noexcept { return etav_; }
  const TensorComponents& christoffel() const noexcept { return gammav_; }
  const TensorComponents& riemann() const noexcept { return riemv_; }
  const TensorComponents& riemann04() const noexcept { return riem04_; }
  const TensorComponents& ricci() const noexcept { return ricciv_; }
  double tau() const noexcept { return tau_; }
  double tau_star() const noexcept { return tau_star_; }

  /// g(x, y) for vectors given by components.
  double inner(std::span<const double> x, std::span<const double> y) const;
  /// phi applied to a vector.
  std::vector<double> apply_phi(std::span<const double> x) const;
  /// eta applied to a vector.
  double eta_of(std::span<const double> x) const;

 private:
  ManifoldSpec m_;
  Point p_;
  Tensor<Jet3> g_, phi_, xi_, eta_;
  Tensor<Jet2> ginv_, gamma_;
  Tensor<Jet1> riem_, ricci_;
  TensorComponents gv_, ginvv_, phiv_, xiv_, etav_, gammav_, riemv_, riem04_, ricciv_;
  double tau_ = 0.0, tau_star_ = 0.0;
};

/// Curvature data at a point, as plain components.
struct CurvaturePack {
  TensorComponents gamma;      // (1,2)
  TensorComponents riemann04;  // (0,4)
  TensorComponents ricci;      // (0,2)
  double tau = 0.0;
  double tau_star = 0.0;
};

/// Christoffel symbols of the second kind at p.
TensorComponents christoffel(const ManifoldSpec& m, const Point& p);

/// Covariant derivative of a tensor field at p (extra covariant slot first).
TensorComponents covariant_derivative(const TensorField& t, const ManifoldSpec& m, const Point& p);

/// Riemann (0,4), Ricci, tau and tau* at p.
CurvaturePack riemann(const ManifoldSpec& m, const Point& p);
CurvaturePack curvature_pack(const LocalGeometry& geo);

/// Sectional curvature of span{x, y}. Throws DegeneracyError for a null plane.
double sectional(const ManifoldSpec& m, const Point& p, std::span<const double> x, std::span<const double> y);
double sectional(const LocalGeometry& geo, std::span<const double> x, std::span<const double> y);

/// (L_v g) at p for a vector field v.
TensorComponents lie_metric(const ManifoldSpec& m, const TensorField& v, const Point& p);

/// tau evaluated as g^{xw} g^{yz} R(x,y,z,w), independent of the Ricci route.
double tau_from_riemann04(const LocalGeometry& geo);

/// Residuals of the Riemann symmetries relative to max(1, |R|).
struct RiemannSymmetryReport {
  double antisym_12 = 0.0;
  double antisym_34 = 0.0;
  double pair_swap = 0.0;
  double bianchi = 0.0;
  double ricci_symmetry = 0.0;
  double tau_routes = 0.0;
  double metric_compat = 0.0;  // max |nabla g|
  double worst() const;
};
RiemannSymmetryReport riemann_symmetries(const LocalGeometry& geo);

/// nabla_xi xi and d(eta) at p, as max-abs residuals.
struct GeodesicReport {
  double nabla_xi_xi = 0.0;
  double d_eta = 0.0;
};
GeodesicReport geodesic_check(const LocalGeometry& geo);

}  // namespace sforge
