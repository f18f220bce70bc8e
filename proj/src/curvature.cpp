#include "soliton_forge/curvature.hpp"

#include <algorithm>
#include <cmath>

namespace sforge {

namespace {

Tensor<Jet2> christoffel_from_metric(const Tensor<Jet3>& g, const Tensor<Jet2>& ginv) {
  const int dim = g.dim();
  std::vector<Tensor<Jet2>> dg;
  dg.reserve(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) dg.push_back(partial(g, i));

  // first kind: Gamma_{l,ij} = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
  Tensor<Jet2> first({0, 3}, dim, Jet2(dim));
  for (int l = 0; l < dim; ++l)
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        Jet2 v = dg[i](j, l) + dg[j](i, l) - dg[l](i, j);
        v *= 0.5;
        first(l, i, j) = v;
        first(l, j, i) = std::move(v);
      }

  Tensor<Jet2> gamma({1, 2}, dim, Jet2(dim));
  for (int k = 0; k < dim; ++k)
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        Jet2 acc(dim);
        for (int l = 0; l < dim; ++l) {
          const Jet2& f = first(l, i, j);
          if (is_exact_zero(f) || is_exact_zero(ginv(k, l))) continue;
          acc += ginv(k, l) * f;
        }
        gamma(k, i, j) = acc;
        gamma(k, j, i) = std::move(acc);
      }
  return gamma;
}

Tensor<Jet1> riemann_from_christoffel(const Tensor<Jet2>& gamma) {
  const int dim = gamma.dim();
  const Tensor<Jet1> g1 = truncate<1>(gamma);
  std::vector<Tensor<Jet1>> dgam;
  for (int i = 0; i < dim; ++i) dgam.push_back(partial(gamma, i));

  Tensor<Jet1> r({1, 3}, dim, Jet1(dim));
  for (int a = 0; a < dim; ++a)
    for (int x = 0; x < dim; ++x)
      for (int y = x + 1; y < dim; ++y)
        for (int z = 0; z < dim; ++z) {
          Jet1 v = dgam[x](a, y, z) - dgam[y](a, x, z);
          for (int e = 0; e < dim; ++e) {
            const Jet1& ax = g1(a, x, e);
            const Jet1& ay = g1(a, y, e);
            if (!is_exact_zero(ax)) v += ax * g1(e, y, z);
            if (!is_exact_zero(ay)) v -= ay * g1(e, x, z);
          }
          r(a, y, x, z) = -v;
          r(a, x, y, z) = std::move(v);
        }
  return r;
}

}  // namespace

LocalGeometry::LocalGeometry(const ManifoldSpec& m, const Point& p) : m_(m), p_(p) {
  require_admitted(m_, p_);
  const auto& names = m_.coordinate_names;
  g_ = evaluate_field(m_.metric, p_, names);
  phi_ = evaluate_field(m_.phi, p_, names);
  xi_ = evaluate_field(m_.xi, p_, names);
  eta_ = evaluate_field(m_.eta, p_, names);
  if (!(g_.valence() == Valence{0, 2}) || !(phi_.valence() == Valence{1, 1}) || !(xi_.valence() == Valence{1, 0}) ||
      !(eta_.valence() == Valence{0, 1}) || g_.dim() != dim())
    throw UsageError("manifold component fields have the wrong valence or dimension");

  ginv_ = sforge::inverse_metric(truncate<2>(g_));
  gamma_ = christoffel_from_metric(g_, ginv_);
  riem_ = riemann_from_christoffel(gamma_);
  ricci_ = contract(riem_, 0, 0);

  gv_ = values(g_);
  ginvv_ = values(ginv_);
  phiv_ = values(phi_);
  xiv_ = values(xi_);
  etav_ = values(eta_);
  gammav_ = values(gamma_);
  riemv_ = values(riem_);
  riem04_ = musical(riemv_, gv_, 0, IndexMove::lower);  // slots (w; x, y, z)
  {
    // reorder to (x, y, z, w)
    TensorComponents r = zeros({0, 4}, dim());
    for (int x = 0; x < dim(); ++x)
      for (int y = 0; y < dim(); ++y)
        for (int z = 0; z < dim(); ++z)
          for (int w = 0; w < dim(); ++w) r(x, y, z, w) = riem04_(w, x, y, z);
    riem04_ = std::move(r);
  }
  ricciv_ = values(ricci_);
  tau_ = contract(contract(tensor_product(ginvv_, ricciv_), 0, 0), 0, 0).data()[0];
  // tau* = g^{ij} rho(e_i, phi e_j)
  TensorComponents rho_phi = zeros({0, 2}, dim());
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) {
      double s = 0.0;
      for (int a = 0; a < dim(); ++a) s += ricciv_(i, a) * phiv_(a, j);
      rho_phi(i, j) = s;
    }
  tau_star_ = contract(contract(tensor_product(ginvv_, rho_phi), 0, 0), 0, 0).data()[0];
}

Tensor<Jet3> LocalGeometry::field(const TensorField& f) const { return evaluate_field(f, p_, m_.coordinate_names); }

double LocalGeometry::inner(std::span<const double> x, std::span<const double> y) const {
  double s = 0.0;
  for (int a = 0; a < dim(); ++a)
    for (int b = 0; b < dim(); ++b) s += gv_(a, b) * x[a] * y[b];
  return s;
}

std::vector<double> LocalGeometry::apply_phi(std::span<const double> x) const {
  std::vector<double> out(static_cast<std::size_t>(dim()), 0.0);
  for (int a = 0; a < dim(); ++a)
    for (int b = 0; b < dim(); ++b) out[a] += phiv_(a, b) * x[b];
  return out;
}

double LocalGeometry::eta_of(std::span<const double> x) const {
  double s = 0.0;
  for (int a = 0; a < dim(); ++a) s += etav_(a) * x[a];
  return s;
}

TensorComponents christoffel(const ManifoldSpec& m, const Point& p) { return LocalGeometry(m, p).christoffel(); }

TensorComponents covariant_derivative(const TensorField& t, const ManifoldSpec& m, const Point& p) {
  const LocalGeometry geo(m, p);
  return values(geo.nabla(geo.field(t)));
}

CurvaturePack curvature_pack(const LocalGeometry& geo) {
  return {geo.christoffel(), geo.riemann04(), geo.ricci(), geo.tau(), geo.tau_star()};
}

CurvaturePack riemann(const ManifoldSpec& m, const Point& p) { return curvature_pack(LocalGeometry(m, p)); }

double sectional(const LocalGeometry& geo, std::span<const double> x, std::span<const double> y_in) {
  const int dim = geo.dim();
  double nx = 0.0, ny = 0.0, gmax = 0.0;
  for (int a = 0; a < dim; ++a) {
    nx += x[a] * x[a];
    ny += y_in[a] * y_in[a];
  }
  const auto& g = geo.metric();
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) gmax = std::max(gmax, std::abs(g(a, b)));
  // same plane, but y made g-orthogonal to x when g(x,x) is usable: avoids the
  // gxx*gyy - gxy^2 cancellation
  std::vector<double> y(y_in.begin(), y_in.end());
  const double gxx = geo.inner(x, x);
  if (std::abs(gxx) >= 1e-8 * nx * gmax) {
    const double s = geo.inner(x, y) / gxx;
    for (int a = 0; a < dim; ++a) y[a] -= s * x[a];
  }
  const double gyy = geo.inner(y, y), gxy = geo.inner(x, y);
  const double denom = gxx * gyy - gxy * gxy;
  if (std::abs(denom) < 1e-12 * nx * ny) throw DegeneracyError("degenerate plane: g(x,x)g(y,y) - g(x,y)^2 vanishes");
  const auto& r = geo.riemann04();
  double num = 0.0;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int c = 0; c < dim; ++c)
        for (int d = 0; d < dim; ++d) num += r(a, b, c, d) * x[a] * y[b] * y[c] * x[d];
  return num / denom;
}

double sectional(const ManifoldSpec& m, const Point& p, std::span<const double> x, std::span<const double> y) {
  return sectional(LocalGeometry(m, p), x, y);
}

TensorComponents lie_metric(const ManifoldSpec& m, const TensorField& v, const Point& p) {
  const LocalGeometry geo(m, p);
  const auto nv = geo.nabla(geo.field(v));  // Jet2
  return values(lie_metric_from(nv, truncate<2>(geo.metric_jet())));
}

double tau_from_riemann04(const LocalGeometry& geo) {
  const int dim = geo.dim();
  const auto& gi = geo.inverse_metric();
  const auto& r = geo.riemann04();
  double s = 0.0;
  for (int x = 0; x < dim; ++x)
    for (int w = 0; w < dim; ++w) {
      if (gi(x, w) == 0.0) continue;
      for (int y = 0; y < dim; ++y)
        for (int z = 0; z < dim; ++z) s += gi(x, w) * gi(y, z) * r(x, y, z, w);
    }
  return s;
}

double RiemannSymmetryReport::worst() const {
  return std::max({antisym_12, antisym_34, pair_swap, bianchi, ricci_symmetry, tau_routes, metric_compat});
}

RiemannSymmetryReport riemann_symmetries(const LocalGeometry& geo) {
  const int dim = geo.dim();
  const auto& r = geo.riemann04();
  const double scale = std::max(1.0, max_abs(r));
  RiemannSymmetryReport rep;
  for (int x = 0; x < dim; ++x)
    for (int y = 0; y < dim; ++y)
      for (int z = 0; z < dim; ++z)
        for (int w = 0; w < dim; ++w) {
          const double v = r(x, y, z, w);
          rep.antisym_12 = std::max(rep.antisym_12, std::abs(v + r(y, x, z, w)));
          rep.antisym_34 = std::max(rep.antisym_34, std::abs(v + r(x, y, w, z)));
          rep.pair_swap = std::max(rep.pair_swap, std::abs(v - r(z, w, x, y)));
          rep.bianchi = std::max(rep.bianchi, std::abs(v + r(y, z, x, w) + r(z, x, y, w)));
        }
  rep.antisym_12 /= scale;
  rep.antisym_34 /= scale;
  rep.pair_swap /= scale;
  rep.bianchi /= scale;
  const auto& rho = geo.ricci();
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) rep.ricci_symmetry = std::max(rep.ricci_symmetry, std::abs(rho(a, b) - rho(b, a)));
  rep.tau_routes = std::abs(geo.tau() - tau_from_riemann04(geo)) / std::max(1.0, std::abs(geo.tau()));
  rep.metric_compat = max_abs(values(geo.nabla(geo.metric_jet())));
  return rep;
}

GeodesicReport geodesic_check(const LocalGeometry& geo) {
  const int dim = geo.dim();
  const auto nxi = values(geo.nabla(geo.xi_jet()));  // (a; m)
  const auto& xi = geo.xi();
  GeodesicReport rep;
  for (int a = 0; a < dim; ++a) {
    double s = 0.0;
    for (int m = 0; m < dim; ++m) s += nxi(a, m) * xi(m);
    rep.nabla_xi_xi = std::max(rep.nabla_xi_xi, std::abs(s));
  }
  const auto& eta = geo.eta_jet();
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      rep.d_eta = std::max(rep.d_eta, std::abs(eta(j).d1(i) - eta(i).d1(j)));
  return rep;
}

}  // namespace sforge
