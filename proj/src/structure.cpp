#include "soliton_forge/structure.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace sforge {

double StructureReport::worst() const {
  double w = 0.0;
  for (const auto& r : residuals) w = std::max(w, r.residual);
  return w;
}

double StructureReport::residual(const std::string& name) const {
  for (const auto& r : residuals)
    if (r.name == name) return r.residual;
  throw UsageError("unknown axiom residual '" + name + "'");
}

StructureReport verify_axioms(const ManifoldSpec& m, const Point& p, double tol) {
  require_admitted(m, p);
  const auto& names = m.coordinate_names;
  const auto g = values(evaluate_field(m.metric, p, names));
  const auto phi = values(evaluate_field(m.phi, p, names));
  const auto xi = values(evaluate_field(m.xi, p, names));
  const auto eta = values(evaluate_field(m.eta, p, names));
  const int d = m.dim();

  double phi_xi = 0.0, phi2 = 0.0, eta_phi = 0.0, bmetric = 0.0, g_xi = 0.0, sym = 0.0;
  for (int a = 0; a < d; ++a) {
    double s = 0.0;
    for (int b = 0; b < d; ++b) s += phi(a, b) * xi(b);
    phi_xi = std::max(phi_xi, std::abs(s));
  }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      double s = 0.0;
      for (int c = 0; c < d; ++c) s += phi(a, c) * phi(c, b);
      s += (a == b ? 1.0 : 0.0) - xi(a) * eta(b);
      phi2 = std::max(phi2, std::abs(s));
    }
  for (int b = 0; b < d; ++b) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += eta(a) * phi(a, b);
    eta_phi = std::max(eta_phi, std::abs(s));
  }
  double eta_xi = 0.0;
  for (int a = 0; a < d; ++a) eta_xi += eta(a) * xi(a);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) s += g(a, b) * phi(a, i) * phi(b, j);
      bmetric = std::max(bmetric, std::abs(s + g(i, j) - eta(i) * eta(j)));
      sym = std::max(sym, std::abs(g(i, j) - g(j, i)));
    }
  double gxixi = 0.0;
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += g(i, a) * xi(a);
    g_xi = std::max(g_xi, std::abs(s - eta(i)));
    gxixi += s * xi(i);
  }

  StructureReport rep;
  rep.residuals = {{"phi_xi", phi_xi},
                   {"phi_squared", phi2},
                   {"eta_phi", eta_phi},
                   {"eta_xi", std::abs(eta_xi - 1.0)},
                   {"b_metric", bmetric},
                   {"g_xi_eta", g_xi},
                   {"g_xi_xi", std::abs(gxixi - 1.0)},
                   {"g_symmetry", sym}};

  Eigen::MatrixXd gm(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) gm(i, j) = 0.5 * (g(i, j) + g(j, i));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gm, Eigen::EigenvaluesOnly);
  for (int i = 0; i < d; ++i) {
    const double ev = es.eigenvalues()(i);
    if (ev > 1e-10) ++rep.positive_eigenvalues;
    if (ev < -1e-10) ++rep.negative_eigenvalues;
  }
  rep.signature_ok = rep.positive_eigenvalues == m.n + 1 && rep.negative_eigenvalues == m.n;
  rep.pass = rep.signature_ok && rep.worst() <= tol;
  return rep;
}

TensorField associated_metric(const ManifoldSpec& m) {
  return [metric = m.metric, phi = m.phi, eta = m.eta](CoordinateJets x) {
    const auto g = metric(x);
    const auto f = phi(x);
    const auto e = eta(x);
    const int d = g.dim();
    Tensor<Jet3> out({0, 2}, d, Jet3(d));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Jet3 acc = e(i) * e(j);
        for (int a = 0; a < d; ++a)
          if (!is_exact_zero(f(a, j))) acc += g(i, a) * f(a, j);
        out(i, j) = std::move(acc);
      }
    return out;
  };
}

ManifoldSpec with_associated_metric(const ManifoldSpec& m) {
  ManifoldSpec out = m;
  out.metric = associated_metric(m);
  return out;
}

TensorComponents fundamental_F(const LocalGeometry& geo) {
  const int d = geo.dim();
  const auto nphi = values(geo.nabla(geo.phi_jet()));  // (a; x, y) = ((nabla_x phi) d_y)^a
  const auto& g = geo.metric();
  TensorComponents f = zeros({0, 3}, d);
  for (int x = 0; x < d; ++x)
    for (int y = 0; y < d; ++y)
      for (int z = 0; z < d; ++z) {
        double s = 0.0;
        for (int a = 0; a < d; ++a) s += g(z, a) * nphi(a, x, y);
        f(x, y, z) = s;
      }
  return f;
}

TensorComponents fundamental_F(const ManifoldSpec& m, const Point& p) { return fundamental_F(LocalGeometry(m, p)); }

namespace {

std::vector<double> to_vector(const TensorComponents& t) { return {t.data().begin(), t.data().end()}; }

}  // namespace

LeeForms lee_forms(const LocalGeometry& geo) {
  const int d = geo.dim();
  const auto f = fundamental_F(geo);
  const auto& ginv = geo.inverse_metric();
  const auto& phi = geo.phi();
  const auto& xi = geo.xi();

  LeeForms lf;
  lf.theta = to_vector(contract(contract(tensor_product(ginv, f), 0, 0), 0, 0));

  // F(e_i, phi e_j, z) as a (0,3) tensor in (i, j, z)
  TensorComponents fphi = zeros({0, 3}, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int z = 0; z < d; ++z) {
        double s = 0.0;
        for (int a = 0; a < d; ++a) s += f(i, a, z) * phi(a, j);
        fphi(i, j, z) = s;
      }
  lf.theta_star = to_vector(contract(contract(tensor_product(ginv, fphi), 0, 0), 0, 0));

  const auto fx = contract(contract(tensor_product(tensor_product(xi, xi), f), 0, 0), 0, 0);
  lf.omega = to_vector(fx);
  return lf;
}

LeeForms lee_forms(const ManifoldSpec& m, const Point& p) { return lee_forms(LocalGeometry(m, p)); }

FIdentityReport f_identities(const LocalGeometry& geo) {
  const int d = geo.dim();
  const auto f = fundamental_F(geo);
  const auto& phi = geo.phi();
  const auto& xi = geo.xi();
  const auto& eta = geo.eta();
  const auto& g = geo.metric();
  const auto nxi = values(geo.nabla(geo.xi_jet()));  // (a; x)

  const auto f_at = [&](std::span<const double> x, std::span<const double> y, std::span<const double> z) {
    double s = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c) s += f(a, b, c) * x[a] * y[b] * z[c];
    return s;
  };
  const auto basis = [&](int i) {
    std::vector<double> e(static_cast<std::size_t>(d), 0.0);
    e[i] = 1.0;
    return e;
  };
  const std::vector<double> xiv(xi.data().begin(), xi.data().end());

  FIdentityReport rep;
  for (int x = 0; x < d; ++x) {
    const auto ex = basis(x);
    for (int y = 0; y < d; ++y) {
      const auto ey = basis(y);
      const auto py = geo.apply_phi(ey);
      for (int z = 0; z < d; ++z) {
        const auto ez = basis(z);
        const auto pz = geo.apply_phi(ez);
        rep.symmetry_23 = std::max(rep.symmetry_23, std::abs(f(x, y, z) - f(x, z, y)));
        const double rhs = f_at(ex, py, pz) + eta(y) * f_at(ex, xiv, ez) + eta(z) * f_at(ex, ey, xiv);
        rep.decomposition = std::max(rep.decomposition, std::abs(f(x, y, z) - rhs));
      }
      double gn = 0.0;
      for (int a = 0; a < d; ++a) gn += g(a, y) * nxi(a, x);
      rep.nabla_xi = std::max(rep.nabla_xi, std::abs(f_at(ex, py, xiv) - gn));
    }
  }
  const auto lf = lee_forms(geo);
  double omega_xi = 0.0;
  for (int a = 0; a < d; ++a) omega_xi += lf.omega[a] * xi(a);
  rep.lee_identity = std::abs(omega_xi);
  for (int b = 0; b < d; ++b) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
      s += lf.theta_star[a] * phi(a, b);
      double phi2 = 0.0;
      for (int c = 0; c < d; ++c) phi2 += phi(a, c) * phi(c, b);
      s += lf.theta[a] * phi2;
    }
    rep.lee_identity = std::max(rep.lee_identity, std::abs(s));
  }
  return rep;
}

ClassFlags class_flags(const LocalGeometry& geo, double tol) {
  const int d = geo.dim();
  const auto f = fundamental_F(geo);
  const auto& g = geo.metric();
  const auto& phi = geo.phi();
  const auto& eta = geo.eta();

  TensorComponents gphi = zeros({0, 2}, d);  // g(x, phi y)
  for (int x = 0; x < d; ++x)
    for (int y = 0; y < d; ++y) {
      double s = 0.0;
      for (int a = 0; a < d; ++a) s += g(x, a) * phi(a, y);
      gphi(x, y) = s;
    }
  TensorComponents tmpl = zeros({0, 3}, d);
  for (int x = 0; x < d; ++x)
    for (int y = 0; y < d; ++y)
      for (int z = 0; z < d; ++z) tmpl(x, y, z) = -(gphi(x, y) * eta(z) + gphi(x, z) * eta(y));

  ClassFlags cf;
  cf.F_norm = max_abs(f);
  cf.is_F0 = cf.F_norm <= tol;
  const double tt = frobenius_inner(tmpl, tmpl);
  cf.fitted_scale = tt > 0.0 ? frobenius_inner(f, tmpl) / tt : 0.0;
  const double fn = frobenius_norm(f);
  cf.template_residual = fn > 0.0 ? frobenius_norm(f - tmpl * cf.fitted_scale) / fn : 0.0;
  cf.matches_F5_torse_form = cf.template_residual <= tol;
  return cf;
}

ClassFlags class_flags(const ManifoldSpec& m, const Point& p, double tol) { return class_flags(LocalGeometry(m, p), tol); }

}  // namespace sforge
