#include "soliton_forge/example_manifold.hpp"

#include <cmath>
#include <numbers>

namespace sforge {

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::log: return "log";
    case ProfileKind::scaled_log: return "scaled_log";
    case ProfileKind::linear: return "linear";
    case ProfileKind::exp: return "exp";
    case ProfileKind::custom: return "custom";
  }
  return "unknown";
}

EllProfile::EllProfile(ProfileKind kind, std::vector<double> params, std::string label,
                       std::function<Derivatives(double)> d, bool positive_t_only)
    : kind_(kind),
      params_(std::move(params)),
      label_(std::move(label)),
      derivs_(std::move(d)),
      positive_t_only_(positive_t_only) {}

EllProfile EllProfile::log(double c) {
  return EllProfile(
      ProfileKind::log, {c}, "log",
      [c](double t) -> Derivatives {
        return {c * std::log(t), c / t, -c / (t * t), 2.0 * c / (t * t * t)};
      },
      true);
}

EllProfile EllProfile::scaled_log() {
  const double c = (1.0 + std::numbers::sqrt3) / 2.0;
  EllProfile p = log(c);
  p.kind_ = ProfileKind::scaled_log;
  p.label_ = "scaled_log";
  p.params_.clear();
  return p;
}

EllProfile EllProfile::linear(double alpha) {
  return EllProfile(
      ProfileKind::linear, {alpha}, "linear",
      [alpha](double t) -> Derivatives { return {alpha * t, alpha, 0.0, 0.0}; }, false);
}

EllProfile EllProfile::exponential(double q, double k, int n) {
  if (k == 0.0 || n < 1) throw UsageError("exp profile needs k != 0 and n >= 1");
  const double m = 2.0 * n - 1.0;
  const double amp = -q * m / (k * k);
  const double rate = -k / m;
  return EllProfile(
      ProfileKind::exp, {q}, "exp",
      [amp, rate](double t) -> Derivatives {
        const double e = amp * std::exp(rate * t);
        return {e, rate * e, rate * rate * e, rate * rate * rate * e};
      },
      false);
}

EllProfile EllProfile::custom(std::string label, std::function<Derivatives(double)> derivatives, bool positive_t_only) {
  return EllProfile(ProfileKind::custom, {}, std::move(label), std::move(derivatives), positive_t_only);
}

Jet3 EllProfile::apply(const Jet3& t) const {
  const auto d = derivs_(t.value());
  return Jet3::compose(t, d[0], d[1], d[2], d[3]);
}

namespace {

TensorComponents base_metric(int n) {
  const int d = 2 * n + 1;
  TensorComponents g = zeros({0, 2}, d);
  for (int i = 0; i < n; ++i) {
    g(i, i) = -1.0;
    g(n + i, n + i) = 1.0;
  }
  g(2 * n, 2 * n) = 1.0;
  return g;
}

TensorComponents base_associated_metric(int n) {
  const int d = 2 * n + 1;
  TensorComponents g = zeros({0, 2}, d);
  for (int i = 0; i < n; ++i) {
    g(i, n + i) = 1.0;
    g(n + i, i) = 1.0;
  }
  g(2 * n, 2 * n) = 1.0;
  return g;
}

TensorComponents base_phi(int n) {
  const int d = 2 * n + 1;
  TensorComponents phi = zeros({1, 1}, d);
  for (int i = 0; i < n; ++i) {
    phi(n + i, i) = 1.0;   // phi(d_i) = d_{n+i}
    phi(i, n + i) = -1.0;  // phi(d_{n+i}) = -d_i
  }
  return phi;
}

TensorComponents unit_t(int n, Valence v) {
  TensorComponents e = zeros(v, 2 * n + 1);
  e(2 * n) = 1.0;
  return e;
}

DomainGuard example_guard(int n, bool positive_t) {
  return [n, positive_t](const Point& p) -> std::optional<std::string> {
    for (int i = 0; i < n; ++i) {
      if (p[n + i] == 0.0) return "x" + std::to_string(n + i + 1) + " must be nonzero";
    }
    const double t = p[2 * n];
    if (t == 0.0) return std::string("t must be nonzero");
    if (positive_t && t < 0.0) return std::string("t must be positive for a logarithmic profile");
    return std::nullopt;
  };
}

}  // namespace

ExampleManifold build_example(int n, EllProfile profile, double k, int v_sign) {
  if (n < 1) throw UsageError("n must be at least 1");
  if (k == 0.0) throw UsageError("k must be nonzero");
  if (v_sign != 1 && v_sign != -1) throw UsageError("v_sign must be 1 or -1");
  for (double t : default_t_values()) {
    if (profile.first(t) == 0.0)
      throw UsageError("profile '" + profile.label() + "' has l'(t) = 0 at t = " + detail::format_value(t));
  }

  const auto names = default_coordinate_names(n);
  const auto guard = example_guard(n, profile.positive_t_only());

  ManifoldSpec base;
  base.n = n;
  base.metric = constant_field(base_metric(n));
  base.phi = constant_field(base_phi(n));
  base.xi = constant_field(unit_t(n, {1, 0}));
  base.eta = constant_field(unit_t(n, {0, 1}));
  base.domain_guard = guard;
  base.coordinate_names = names;

  ScalarField u = [n, profile](CoordinateJets x) {
    Jet3 acc = profile.apply(x[2 * n]);
    for (int i = 0; i < n; ++i) acc += 0.5 * log(x[i] * x[i] + x[n + i] * x[n + i]);
    return acc;
  };
  ScalarField v = [n, v_sign](CoordinateJets x) {
    Jet3 acc(static_cast<int>(x.size()));
    for (int i = 0; i < n; ++i) acc += atan(x[i] / x[n + i]);
    if (v_sign < 0) acc *= -1.0;
    return acc;
  };

  const TensorComponents g0 = base_metric(n), gt0 = base_associated_metric(n);
  const TensorComponents ee = tensor_product(unit_t(n, {0, 1}), unit_t(n, {0, 1}));
  ManifoldSpec transformed = base;
  transformed.metric = [u, v, g0, gt0, ee](CoordinateJets x) {
    const int d = static_cast<int>(x.size());
    const Jet3 e2u = exp(2.0 * u(x));
    const Jet3 two_v = 2.0 * v(x);
    const Jet3 A = e2u * cos(two_v);
    const Jet3 B = e2u * sin(two_v);
    const Jet3 C = 1.0 - A - B;
    Tensor<Jet3> out({0, 2}, d, Jet3(d));
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        Jet3 acc(d);
        if (g0(a, b) != 0.0) acc += g0(a, b) * A;
        if (gt0(a, b) != 0.0) acc += gt0(a, b) * B;
        if (ee(a, b) != 0.0) acc += ee(a, b) * C;
        out(a, b) = std::move(acc);
      }
    return out;
  };

  return ExampleManifold{n, k, v_sign, std::move(profile), std::move(base), std::move(transformed), std::move(u), std::move(v)};
}

ExampleOracles oracles(const ExampleManifold& e, const Point& p) {
  require_admitted(e.transformed, p);
  const int n = e.n;
  const int d = 2 * n + 1;
  const double k = e.k;
  const auto g = values(evaluate_field(e.transformed.metric, p, e.transformed.coordinate_names));
  const double t = p[2 * n];
  const auto ell = e.profile.derivatives(t);
  const double l1 = ell[1], l2 = ell[2];
  std::vector<double> eta(static_cast<std::size_t>(d), 0.0);
  eta[2 * n] = 1.0;

  ExampleOracles o;
  o.riemann04 = zeros({0, 4}, d);
  for (int x = 0; x < d; ++x)
    for (int y = 0; y < d; ++y)
      for (int z = 0; z < d; ++z)
        for (int w = 0; w < d; ++w) {
          const double vert = eta[y] * eta[z] * g(x, w) - eta[x] * eta[z] * g(y, w) + eta[x] * eta[w] * g(y, z) -
                              eta[y] * eta[w] * g(x, z);
          const double horiz = g(y, z) * g(x, w) - g(x, z) * g(y, w);
          o.riemann04(x, y, z, w) = -l2 * vert - l1 * l1 * horiz;
        }
  o.ricci = zeros({0, 2}, d);
  for (int y = 0; y < d; ++y)
    for (int z = 0; z < d; ++z)
      o.ricci(y, z) = -(l2 + 2.0 * n * l1 * l1) * g(y, z) - (2.0 * n - 1.0) * l2 * eta[y] * eta[z];
  o.tau = -4.0 * n * l2 - 2.0 * n * (2.0 * n + 1.0) * l1 * l1;
  o.tau_star = 0.0;

  o.f = k * l1;
  o.f_prime = k * l2;
  o.a = -(l2 + 2.0 * n * l1 * l1);
  o.b = 0.0;
  o.c = -(2.0 * n - 1.0) * l2;
  o.lambda = (k * o.f_prime + 2.0 * n * o.f * o.f) / (k * k) - o.f;
  o.mu = 0.0;
  o.nu = (2.0 * n - 1.0) / k * o.f_prime + o.f;
  o.kdfxi_plus_f2 = k * o.f_prime + o.f * o.f;
  o.K_xi = -o.kdfxi_plus_f2 / (k * k);
  o.theta_star_xi = 2.0 * n * l1;
  return o;
}

const std::vector<double>& default_coordinate_values() {
  static const std::vector<double> v{-1.0, -0.5, 0.5, 1.0, 2.0};
  return v;
}

const std::vector<double>& default_t_values() {
  static const std::vector<double> v{0.5, 1.0, 2.0};
  return v;
}

std::vector<Point> product_grid(int n, const std::vector<double>& coordinate_values,
                                const std::vector<double>& t_values, int size) {
  if (size < 1) throw UsageError("grid size must be at least 1");
  if (coordinate_values.empty() || t_values.empty()) throw UsageError("grid value lists must be nonempty");
  const std::size_t base = coordinate_values.size();
  std::size_t horizontal = 1;
  for (int i = 0; i < 2 * n; ++i) horizontal *= base;
  const std::size_t total = horizontal * t_values.size();
  const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(size), total);

  std::vector<Point> pts;
  pts.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    std::size_t h = (j * horizontal) / count;
    if (count > horizontal) h = (j / t_values.size()) % horizontal;
    std::vector<double> c(static_cast<std::size_t>(2 * n + 1));
    for (int s = 2 * n - 1; s >= 0; --s) {
      c[static_cast<std::size_t>(s)] = coordinate_values[h % base];
      h /= base;
    }
    c[static_cast<std::size_t>(2 * n)] = t_values[j % t_values.size()];
    pts.emplace_back(std::move(c));
  }
  return pts;
}

std::vector<Point> default_grid(const ExampleManifold& e, int size) {
  return product_grid(e.n, default_coordinate_values(), default_t_values(), size);
}

}  // namespace sforge
