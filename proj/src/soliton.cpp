#include "soliton_forge/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "soliton_forge/structure.hpp"

namespace sforge {

double RelationReport::worst() const {
  double w = 0.0;
  for (const auto& [name, r] : residuals) w = std::max(w, r);
  return w;
}

double RelationReport::residual(const std::string& name) const {
  for (const auto& [key, r] : residuals)
    if (key == name) return r;
  throw UsageError("unknown relation '" + name + "'");
}

namespace {

RelationReport finish(RelationReport rep, double tol) {
  rep.pass = true;
  for (const auto& [name, r] : rep.residuals)
    if (!(r <= tol)) rep.pass = false;
  return rep;
}

std::vector<double> column(const TensorComponents& t) { return {t.data().begin(), t.data().end()}; }

// |g|^{-1}: same eigenvectors as g, reciprocal absolute eigenvalues. In the
// frame it defines g is diag(+-1), so no block of the span is drowned out by
// the scale of another.
Eigen::MatrixXd abs_inverse(const TensorComponents& g) {
  const int d = g.dim();
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = g(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::VectorXd w = es.eigenvalues().cwiseAbs().cwiseInverse();
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd as_matrix(const TensorComponents& t) {
  const int d = t.dim();
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = t(i, j);
  return m;
}

// <A, B> = tr(H A H B^T)
double weighted_inner(const Eigen::MatrixXd& h, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (h * a * h * b.transpose()).trace();
}

}  // namespace

TorseFormingJet torse_forming_jet(const LocalGeometry& geo, const TensorField& theta, double tol) {
  const int d = geo.dim();
  const auto th3 = geo.field(theta);
  if (!(th3.valence() == Valence{1, 0})) throw UsageError("potential must be a vector field");
  const Tensor<Jet1> th = truncate<1>(th3);
  const Tensor<Jet1> nt = truncate<1>(geo.nabla(th3));  // (a; x) = (nabla_x theta)^a

  bool zero = true;
  for (int a = 0; a < d; ++a)
    if (th(a).value() != 0.0) zero = false;
  if (zero) throw DegeneracyError("degenerate potential: theta(p) = 0");

  // Normal equations for unknowns (f, gamma_0..gamma_{d-1}).
  const int u = d + 1;
  const Jet1 zero_jet(d);
  std::vector<Jet1> mat(static_cast<std::size_t>(u * u), zero_jet), rhs(static_cast<std::size_t>(u), zero_jet);
  Jet1 norm2(d);
  for (int a = 0; a < d; ++a) norm2 += th(a) * th(a);
  mat[0] = Jet1(d, static_cast<double>(d));
  for (int j = 0; j < d; ++j) {
    mat[static_cast<std::size_t>(1 + j)] = th(j);
    mat[static_cast<std::size_t>((1 + j) * u)] = th(j);
    mat[static_cast<std::size_t>((1 + j) * u + 1 + j)] = norm2;
  }
  for (int a = 0; a < d; ++a) rhs[0] += nt(a, a);
  for (int j = 0; j < d; ++j)
    for (int a = 0; a < d; ++a) rhs[static_cast<std::size_t>(1 + j)] += th(a) * nt(a, j);
  const auto sol = solve_linear(std::move(mat), std::move(rhs), u, "torse-forming normal equations");

  TorseFormingJet out;
  out.f = sol[0];
  out.gamma.assign(sol.begin() + 1, sol.end());

  auto& rep = out.report;
  rep.f = out.f.value();
  for (const auto& g : out.gamma) rep.gamma.push_back(g.value());
  const auto eta = geo.eta();
  for (int a = 0; a < d; ++a) rep.k += eta(a) * th(a).value();
  double rem = 0.0, target = 0.0;
  for (int a = 0; a < d; ++a)
    for (int x = 0; x < d; ++x) {
      const double nv = nt(a, x).value();
      const double model = (a == x ? rep.f : 0.0) + th(a).value() * rep.gamma[x];
      rem += (nv - model) * (nv - model);
      target += nv * nv;
    }
  rep.residual = std::sqrt(rem) / std::max(1.0, std::sqrt(target));
  rep.is_torse_forming = rep.residual <= tol;
  rep.trivial = std::abs(rep.f) <= tol;
  return out;
}

TorseFormingReport detect_torse_forming(const LocalGeometry& geo, const TensorField& theta, double tol) {
  return torse_forming_jet(geo, theta, tol).report;
}

TorseFormingReport detect_torse_forming(const ManifoldSpec& m, const TensorField& theta, const Point& p, double tol) {
  return detect_torse_forming(LocalGeometry(m, p), theta, tol);
}

RegularityReport regularity(const ManifoldSpec& m, const TensorField& theta, const Point& p, double tol, double eps) {
  const LocalGeometry geo(m, p);
  const auto tf = torse_forming_jet(geo, theta, tol);
  const auto xi = column(geo.xi());
  const auto f_at = [&](double s) { return detect_torse_forming(LocalGeometry(m, p.displaced(xi, s)), theta, tol).f; };
  // fourth-order central stencil
  const double f1 = f_at(eps) - f_at(-eps);
  const double f2 = f_at(2.0 * eps) - f_at(-2.0 * eps);

  RegularityReport rep;
  rep.f = tf.report.f;
  rep.k = tf.report.k;
  rep.df_xi = (8.0 * f1 - f2) / (12.0 * eps);
  for (int a = 0; a < geo.dim(); ++a) rep.df_xi_jet += tf.f.d1(a) * xi[a];
  rep.route_spread = std::abs(rep.df_xi - rep.df_xi_jet);
  rep.kdfxi_plus_f2 = rep.k * rep.df_xi + rep.f * rep.f;
  rep.is_regular = std::abs(rep.kdfxi_plus_f2) > tol;
  return rep;
}

TensorComponents associated_metric_values(const LocalGeometry& geo) {
  const int d = geo.dim();
  const auto& g = geo.metric();
  const auto& phi = geo.phi();
  const auto& eta = geo.eta();
  TensorComponents out = zeros({0, 2}, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = eta(i) * eta(j);
      for (int a = 0; a < d; ++a) s += g(i, a) * phi(a, j);
      out(i, j) = s;
    }
  return out;
}

FitResult fit_span(const LocalGeometry& geo, const TensorComponents& target) {
  const Eigen::MatrixXd h = abs_inverse(geo.metric());
  const std::array<Eigen::MatrixXd, 3> basis{as_matrix(geo.metric()), as_matrix(associated_metric_values(geo)),
                                             as_matrix(tensor_product(geo.eta(), geo.eta()))};
  const Eigen::MatrixXd tm = as_matrix(target);
  std::vector<double> gram(9), rhs(3);
  for (int i = 0; i < 3; ++i) {
    rhs[i] = weighted_inner(h, basis[i], tm);
    for (int j = 0; j < 3; ++j) gram[i * 3 + j] = weighted_inner(h, basis[i], basis[j]);
  }
  std::vector<double> c;
  try {
    c = solve_linear(gram, rhs, 3, "Gram matrix");
  } catch (const SingularMetricError& e) {
    throw DegeneracyError(std::string("singular Gram matrix of {g, g~, eta (x) eta}: ") + e.what());
  }
  FitResult fr;
  Eigen::MatrixXd rem = tm;
  for (int i = 0; i < 3; ++i) {
    fr.coeffs[i] = c[i];
    rem -= basis[i] * c[i];
  }
  const double tn = std::sqrt(std::max(0.0, weighted_inner(h, tm, tm)));
  fr.residual = std::sqrt(std::max(0.0, weighted_inner(h, rem, rem))) / std::max(1.0, tn);
  return fr;
}

EinsteinLikeFit einstein_like_fit(const LocalGeometry& geo, double tol) {
  EinsteinLikeFit out;
  out.fit = fit_span(geo, geo.ricci());
  const auto& c = out.fit.coeffs;
  out.almost_einstein_like = out.fit.residual <= tol;
  out.almost_eta_einstein = out.almost_einstein_like && std::abs(c[1]) <= tol;
  out.almost_einstein = out.almost_eta_einstein && std::abs(c[2]) <= tol;
  return out;
}

EinsteinLikeFit einstein_like_fit(const ManifoldSpec& m, const Point& p, double tol) {
  return einstein_like_fit(LocalGeometry(m, p), tol);
}

std::string to_string(SolitonKind kind) {
  switch (kind) {
    case SolitonKind::shrinking: return "shrinking";
    case SolitonKind::steady: return "steady";
    case SolitonKind::expanding: return "expanding";
  }
  return "unknown";
}

SolitonFit soliton_fit(const LocalGeometry& geo, const TensorField& theta, double tol) {
  const auto nt = geo.nabla(geo.field(theta));
  TensorComponents target = values(lie_metric_from(nt, truncate<2>(geo.metric_jet())));
  target *= 0.5;
  target += geo.ricci();

  SolitonFit out;
  out.fit = fit_span(geo, target);
  for (auto& c : out.fit.coeffs) c = -c;
  const auto& c = out.fit.coeffs;
  out.almost_ricci_like = out.fit.residual <= tol;
  out.almost_eta_ricci = out.almost_ricci_like && std::abs(c[1]) <= tol;
  out.almost_ricci = out.almost_eta_ricci && std::abs(c[2]) <= tol;
  if (c[0] < -tol)
    out.kind = SolitonKind::shrinking;
  else if (c[0] > tol)
    out.kind = SolitonKind::expanding;
  else
    out.kind = SolitonKind::steady;
  return out;
}

SolitonFit soliton_fit(const ManifoldSpec& m, const TensorField& theta, const Point& p, double tol) {
  return soliton_fit(LocalGeometry(m, p), theta, tol);
}

RelationReport verify_thm32(const std::array<double, 3>& abc, const std::array<double, 3>& lmn, double f, double k,
                            double df_xi, int n, double tol) {
  const auto [a, b, c] = abc;
  const auto [l, mu, nu] = lmn;
  const double s = l + mu + nu;
  RelationReport rep;
  rep.residuals = {{"a+lambda+f", std::abs(a + l + f)},
                   {"b+mu", std::abs(b + mu)},
                   {"c+nu-f", std::abs(c + nu - f)},
                   {"sum_lmn+sum_abc", std::abs(s + a + b + c)},
                   {"sum_lmn-regularity", std::abs(s - 2.0 * n / (k * k) * (k * df_xi + f * f))}};
  return finish(std::move(rep), tol);
}

RelationReport verify_cor35(const Cor35Input& in, double tol) {
  RelationReport rep;
  const double half = in.tau / (2.0 * in.n);
  rep.residuals.push_back(
      {"ode", std::abs(in.k * in.f_prime + in.f * in.f - in.k * in.k * (in.a - half))});
  if (in.K_xi)
    rep.residuals.push_back({"K_xi", std::abs(*in.K_xi - (half - in.a))});
  else
    rep.notices.push_back("K_xi not available; relation skipped");
  rep.residuals.push_back({"grad_f_horizontal", in.grad_f_horizontal});
  return finish(std::move(rep), tol);
}

double XiSectionSweep::spread() const {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

XiSectionSweep xi_sections(const LocalGeometry& geo, const std::vector<std::vector<double>>& directions) {
  const auto xi = column(geo.xi());
  XiSectionSweep sw;
  for (const auto& x : directions) {
    try {
      sw.values.push_back(sectional(geo, xi, x));
    } catch (const DegeneracyError&) {
      ++sw.skipped_degenerate;
    }
  }
  return sw;
}

std::vector<std::vector<double>> random_directions(int dim, int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(count), std::vector<double>(dim));
  for (auto& v : out)
    for (auto& c : v) c = dist(rng);
  return out;
}

double horizontal_gradient(const TorseFormingJet& tf, const LocalGeometry& geo) {
  const int d = geo.dim();
  double dfxi = 0.0;
  for (int a = 0; a < d; ++a) dfxi += tf.f.d1(a) * geo.xi()(a);
  double worst = 0.0;
  for (int a = 0; a < d; ++a) worst = std::max(worst, std::abs(tf.f.d1(a) - dfxi * geo.eta()(a)));
  return worst;
}

RelationReport thm22_curvature_checks(const LocalGeometry& geo, const TensorField& theta, double tol) {
  const int d = geo.dim();
  const int n = geo.n();
  const auto tf = torse_forming_jet(geo, theta, tol);
  const double f = tf.report.f, k = tf.report.k;
  if (k == 0.0) throw DegeneracyError("potential is horizontal: eta(theta) = 0");
  const auto& xi = geo.xi();
  const auto& eta = geo.eta();
  const auto& phi = geo.phi();
  const auto& r = geo.riemann();
  const auto& rho = geo.ricci();

  std::vector<double> df(static_cast<std::size_t>(d));
  double dfxi = 0.0;
  for (int a = 0; a < d; ++a) {
    df[a] = tf.f.d1(a);
    dfxi += df[a] * xi(a);
  }
  const double reg = k * dfxi + f * f;
  const double kk = k * k;
  TensorComponents phi2 = zeros({1, 1}, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      double s = 0.0;
      for (int c = 0; c < d; ++c) s += phi(a, c) * phi(c, b);
      phi2(a, b) = s;
    }

  // R(x,y)xi and R(x,xi)xi
  double rxy = 0.0, rxx = 0.0;
  for (int x = 0; x < d; ++x)
    for (int a = 0; a < d; ++a) {
      for (int y = 0; y < d; ++y) {
        double lhs = 0.0;
        for (int z = 0; z < d; ++z) lhs += r(a, x, y, z) * xi(z);
        const double rhs =
            -((k * df[x] + f * f * eta(x)) * phi2(a, y) - (k * df[y] + f * f * eta(y)) * phi2(a, x)) / kk;
        rxy = std::max(rxy, std::abs(lhs - rhs));
      }
      double lhs = 0.0;
      for (int y = 0; y < d; ++y)
        for (int z = 0; z < d; ++z) lhs += r(a, x, y, z) * xi(y) * xi(z);
      rxx = std::max(rxx, std::abs(lhs - reg / kk * phi2(a, x)));
    }

  double ryxi = 0.0, rxixi = 0.0;
  for (int y = 0; y < d; ++y) {
    double lhs = 0.0;
    for (int z = 0; z < d; ++z) lhs += rho(y, z) * xi(z);
    const double rhs = -((2.0 * n - 1.0) * k * df[y] + (k * dfxi + 2.0 * n * f * f) * eta(y)) / kk;
    ryxi = std::max(ryxi, std::abs(lhs - rhs));
    rxixi += lhs * xi(y);
  }
  rxixi = std::abs(rxixi + 2.0 * n / kk * reg);

  RelationReport rep;
  rep.residuals = {{"R(x,y)xi", rxy}, {"R(x,xi)xi", rxx}, {"rho(y,xi)", ryxi}, {"rho(xi,xi)", rxixi}};

  if (std::abs(reg) <= tol) {
    rep.notices.push_back("K(xi,x) skipped: non-regular potential, R(x,xi)xi degenerates");
  } else {
    std::vector<std::vector<double>> dirs;
    for (int a = 0; a < d; ++a) {
      std::vector<double> e(static_cast<std::size_t>(d), 0.0);
      e[a] = 1.0;
      dirs.push_back(std::move(e));
    }
    const auto sw = xi_sections(geo, dirs);
    double kres = 0.0;
    for (double kv : sw.values) kres = std::max(kres, std::abs(kv + reg / kk));
    if (sw.skipped_degenerate > 0)
      rep.notices.push_back("K(xi,x) skipped on " + std::to_string(sw.skipped_degenerate) + " degenerate sections");
    if (!sw.values.empty()) rep.residuals.push_back({"K(xi,x)", kres});
  }

  const auto geo_rep = geodesic_check(geo);
  rep.residuals.push_back({"nabla_xi_xi", geo_rep.nabla_xi_xi});
  rep.residuals.push_back({"d_eta", geo_rep.d_eta});
  double gam = 0.0;
  for (int a = 0; a < d; ++a) gam = std::max(gam, std::abs(tf.report.gamma[a] + f / k * eta(a)));
  rep.residuals.push_back({"gamma+(f/k)eta", gam});
  const auto xi_tf = detect_torse_forming(geo, geo.manifold().xi, tol);
  rep.residuals.push_back({"xi_conformal_scalar", std::abs(xi_tf.f - f / k)});
  return finish(std::move(rep), tol);
}

RelationReport thm22_curvature_checks(const ManifoldSpec& m, const TensorField& theta, const Point& p, double tol) {
  return thm22_curvature_checks(LocalGeometry(m, p), theta, tol);
}

GeometricField metric_multiple(double c) {
  return [c](const LocalGeometry& geo) {
    Tensor<Jet1> h = truncate<1>(geo.metric_jet());
    h *= c;
    return h;
  };
}

GeometricScalar constant_scalar(double c) {
  return [c](const LocalGeometry& geo) { return Jet1(geo.dim(), c); };
}

GeometricScalar conformal_scalar(TensorField theta) {
  return [theta = std::move(theta)](const LocalGeometry& geo) { return torse_forming_jet(geo, theta, 0.0).f; };
}

GeometricField soliton_tensor(TensorField theta, GeometricScalar mu, GeometricScalar nu) {
  return [theta = std::move(theta), mu = std::move(mu), nu = std::move(nu)](const LocalGeometry& geo) {
    const int d = geo.dim();
    const auto nt = geo.nabla(geo.field(theta));
    const Tensor<Jet1> lie = truncate<1>(lie_metric_from(nt, truncate<2>(geo.metric_jet())));
    const Tensor<Jet1> g = truncate<1>(geo.metric_jet());
    const Tensor<Jet1> phi = truncate<1>(geo.phi_jet());
    const Tensor<Jet1> eta = truncate<1>(geo.eta_jet());
    const Tensor<Jet1>& rho = geo.ricci_jet();
    const Jet1 m = mu(geo), v = nu(geo);
    Tensor<Jet1> h({0, 2}, d, Jet1(d));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const Jet1 ee = eta(i) * eta(j);
        Jet1 gt = ee;
        for (int a = 0; a < d; ++a)
          if (!is_exact_zero(phi(a, j))) gt += g(i, a) * phi(a, j);
        h(i, j) = 0.5 * lie(i, j) + rho(i, j) + m * gt + v * ee;
      }
    return h;
  };
}

ParallelPoint parallel_point(const LocalGeometry& geo, const GeometricField& h) {
  const int d = geo.dim();
  const auto hj = h(geo);
  ParallelPoint out;
  out.nabla_norm = frobenius_norm(values(geo.nabla(hj)));
  out.h = values(hj);
  out.g = geo.metric();

  const auto& hv = out.h;
  const auto& xi = geo.xi();
  const auto& eta = geo.eta();
  const auto& r = geo.riemann();
  double hxixi = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) hxixi += hv(a, b) * xi(a) * xi(b);
  for (int x = 0; x < d; ++x) {
    double hx = 0.0;
    for (int b = 0; b < d; ++b) hx += hv(x, b) * xi(b);
    out.h_vertical = std::max(out.h_vertical, std::abs(hx - hxixi * eta(x)));
    for (int y = 0; y < d; ++y) {
      double s = 0.0;
      for (int a = 0; a < d; ++a) {
        double ra = 0.0;
        for (int z = 0; z < d; ++z) ra += r(a, x, y, z) * xi(z);
        for (int b = 0; b < d; ++b) s += hv(a, b) * ra * xi(b);
      }
      out.h_curvature_xi = std::max(out.h_curvature_xi, std::abs(s));
    }
  }
  return out;
}

ParallelReport combine_parallel(const std::vector<ParallelPoint>& points, double tol) {
  ParallelReport rep;
  for (const auto& pt : points) {
    rep.nabla_norms.push_back(pt.nabla_norm);
    rep.max_nabla_norm = std::max(rep.max_nabla_norm, pt.nabla_norm);
    rep.h_curvature_xi = std::max(rep.h_curvature_xi, pt.h_curvature_xi);
    rep.h_vertical = std::max(rep.h_vertical, pt.h_vertical);
  }
  rep.is_parallel = rep.max_nabla_norm <= tol;
  if (rep.is_parallel && !points.empty()) {
    double hg = 0.0, gg = 0.0, hh = 0.0;
    for (const auto& pt : points) {
      hg += frobenius_inner(pt.h, pt.g);
      gg += frobenius_inner(pt.g, pt.g);
      hh += frobenius_inner(pt.h, pt.h);
    }
    const double c = hg / gg;
    double rem = 0.0;
    for (const auto& pt : points) {
      const auto diff = pt.h - pt.g * c;
      rem += frobenius_inner(diff, diff);
    }
    rep.constant_multiple = c;
    rep.multiple_residual = std::sqrt(rem) / std::max(1.0, std::sqrt(hh));
  }
  return rep;
}

ParallelReport parallel_check(const ManifoldSpec& m, const GeometricField& h, const std::vector<Point>& grid,
                              double tol) {
  std::vector<ParallelPoint> pts;
  pts.reserve(grid.size());
  for (const auto& p : grid) pts.push_back(parallel_point(LocalGeometry(m, p), h));
  return combine_parallel(pts, tol);
}

}  // namespace sforge
