#include "soliton_forge/suite.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "soliton_forge/curvature.hpp"
#include "soliton_forge/soliton.hpp"
#include "soliton_forge/structure.hpp"

namespace sforge {

const std::vector<std::string>& all_check_names() {
  static const std::vector<std::string> names{
      "structure",         "class_flags",  "lee_forms",      "f_identities", "curvature_symmetries",
      "curvature_oracle",  "geodesic",     "torse_forming",  "regularity",   "einstein_like_fit",
      "soliton_fit",       "thm32",        "cor35",          "thm22",        "scalar_consistency",
      "parallel"};
  return names;
}

bool is_check_name(const std::string& name) {
  const auto& all = all_check_names();
  return std::find(all.begin(), all.end(), name) != all.end();
}

bool SuiteReport::all_pass() const {
  return std::all_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.pass; });
}

const CheckSummary* SuiteReport::find(const std::string& check) const {
  for (const auto& s : summary)
    if (s.check == check) return &s;
  return nullptr;
}

SuiteSubject subject_from_example(const ExampleManifold& e, std::vector<Point> grid) {
  SuiteSubject s{e.transformed, e.base, e.k, e, std::move(grid)};
  return s;
}

std::vector<std::string> default_checks(const SuiteSubject& s) {
  std::vector<std::string> out;
  for (const auto& c : all_check_names()) {
    if (c == "curvature_oracle" && !s.example) continue;
    if (c == "parallel" && !(s.example && s.example->profile.kind() == ProfileKind::linear)) continue;
    out.push_back(c);
  }
  return out;
}

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double rel(const TensorComponents& a, const TensorComponents& b) {
  return frobenius_norm(a - b) / std::max(1.0, frobenius_norm(b));
}

double flag(bool b) { return b ? 1.0 : 0.0; }

// Per-point quantities shared between checks, computed on first use.
class PointContext {
 public:
  PointContext(const SuiteSubject& s, const Tolerances& tol, const Point& p, int index)
      : s_(s), tol_(tol), p_(p), index_(index), theta_(vertical_potential(s.manifold, s.k)) {}

  const Point& point() const { return p_; }
  int index() const { return index_; }
  const SuiteSubject& subject() const { return s_; }
  const Tolerances& tol() const { return tol_; }
  const TensorField& theta() const { return theta_; }

  const LocalGeometry& geo() {
    if (!geo_) geo_.emplace(s_.manifold, p_);
    return *geo_;
  }
  const ExampleOracles& oracle() {
    if (!oracle_) oracle_ = oracles(*s_.example, p_);
    return *oracle_;
  }
  const TorseFormingJet& tf() {
    if (!tf_) tf_ = torse_forming_jet(geo(), theta_, tol_.jet_exact);
    return *tf_;
  }
  const RegularityReport& reg() {
    if (!reg_) reg_ = regularity(s_.manifold, theta_, p_, tol_.refit_derivative);
    return *reg_;
  }
  const EinsteinLikeFit& el() {
    if (!el_) el_ = einstein_like_fit(geo(), tol_.jet_exact);
    return *el_;
  }
  const SolitonFit& sf() {
    if (!sf_) sf_ = soliton_fit(geo(), theta_, tol_.jet_exact);
    return *sf_;
  }

 private:
  const SuiteSubject& s_;
  const Tolerances& tol_;
  Point p_;
  int index_;
  TensorField theta_;
  std::optional<LocalGeometry> geo_;
  std::optional<ExampleOracles> oracle_;
  std::optional<TorseFormingJet> tf_;
  std::optional<RegularityReport> reg_;
  std::optional<EinsteinLikeFit> el_;
  std::optional<SolitonFit> sf_;
};

void add_relations(CheckRecord& r, const RelationReport& rep) {
  for (const auto& v : rep.residuals) r.values.push_back(v);
  for (const auto& n : rep.notices) r.notes.push_back(n);
  r.residual = std::max(r.residual, rep.worst());
}

double ell1(PointContext& c) { return c.subject().example->profile.first(c.point()[c.geo().dim() - 1]); }

void check_structure(PointContext& c, CheckRecord& r) {
  const auto& s = c.subject();
  r.tolerance = c.tol().structure;
  const auto rt = verify_axioms(s.manifold, c.point(), r.tolerance);
  for (const auto& a : rt.residuals) r.values.push_back({a.name, a.residual});
  r.values.push_back({"signature_ok", flag(rt.signature_ok)});
  r.residual = rt.worst();
  bool ok = rt.signature_ok;
  if (s.base) {
    const auto rb = verify_axioms(*s.base, c.point(), r.tolerance);
    r.values.push_back({"base_worst", rb.worst()});
    r.values.push_back({"base_signature_ok", flag(rb.signature_ok)});
    r.residual = std::max(r.residual, rb.worst());
    ok = ok && rb.signature_ok;
  }
  if (!ok) r.notes.push_back("metric signature differs from (n+1, n)");
  r.pass = ok && r.residual <= r.tolerance;
}

void check_class_flags(PointContext& c, CheckRecord& r) {
  const auto& s = c.subject();
  r.tolerance = c.tol().jet_exact;
  const auto cf = class_flags(c.geo(), r.tolerance);
  r.values = {{"is_F0", flag(cf.is_F0)},
              {"matches_F5_torse_form", flag(cf.matches_F5_torse_form)},
              {"fitted_scale", cf.fitted_scale},
              {"F_norm", cf.F_norm},
              {"template_residual", cf.template_residual}};
  if (s.example) {
    const auto cb = class_flags(*s.base, c.point(), r.tolerance);
    const double l1 = ell1(c);
    r.values.push_back({"base_F_norm", cb.F_norm});
    r.values.push_back({"expected_scale", l1});
    r.residual = std::max({cb.F_norm, cf.template_residual, rel(cf.fitted_scale, l1)});
    r.pass = cb.is_F0 && !cf.is_F0 && r.residual <= r.tolerance;
  } else {
    r.residual = cf.is_F0 ? cf.F_norm : cf.template_residual;
    r.pass = cf.is_F0 || cf.matches_F5_torse_form;
    if (!r.pass) r.notes.push_back("F is neither zero nor of the torse-forming F5 form");
  }
}

void check_lee_forms(PointContext& c, CheckRecord& r) {
  const auto& geo = c.geo();
  const int d = geo.dim();
  r.tolerance = c.tol().jet_exact;
  const auto lf = lee_forms(geo);
  const auto fi = f_identities(geo);
  double theta_xi = 0.0, theta_star_xi = 0.0, omega = 0.0;
  for (int a = 0; a < d; ++a) {
    theta_xi += lf.theta[a] * geo.xi()(a);
    theta_star_xi += lf.theta_star[a] * geo.xi()(a);
    omega = std::max(omega, std::abs(lf.omega[a]));
  }
  r.values = {{"lee_identity", fi.lee_identity}, {"theta(xi)", theta_xi}, {"theta_star(xi)", theta_star_xi},
              {"omega", omega}};
  r.residual = fi.lee_identity;
  if (c.subject().example) {
    const double expect = 2.0 * geo.n() * ell1(c);
    double covector = 0.0;
    for (int a = 0; a < d; ++a) covector = std::max(covector, std::abs(lf.theta_star[a] - expect * geo.eta()(a)));
    r.values.push_back({"expected_theta_star(xi)", expect});
    r.values.push_back({"theta_star_covector", covector});
    r.residual = std::max({r.residual, std::abs(theta_star_xi - expect), std::abs(theta_xi), omega, covector});
  }
  r.pass = r.residual <= r.tolerance;
}

void check_f_identities(PointContext& c, CheckRecord& r) {
  r.tolerance = c.tol().jet_exact;
  const auto fi = f_identities(c.geo());
  r.values = {{"symmetry_23", fi.symmetry_23}, {"decomposition", fi.decomposition}, {"nabla_xi", fi.nabla_xi}};
  r.residual = std::max({fi.symmetry_23, fi.decomposition, fi.nabla_xi});
  r.pass = r.residual <= r.tolerance;
}

void check_curvature_symmetries(PointContext& c, CheckRecord& r) {
  r.tolerance = c.tol().jet_exact;
  const auto s = riemann_symmetries(c.geo());
  r.values = {{"antisym_12", s.antisym_12},         {"antisym_34", s.antisym_34},
              {"pair_swap", s.pair_swap},           {"bianchi", s.bianchi},
              {"ricci_symmetry", s.ricci_symmetry}, {"tau_routes", s.tau_routes},
              {"metric_compat", s.metric_compat}};
  r.residual = s.worst();
  r.pass = r.residual <= r.tolerance;
}

void check_curvature_oracle(PointContext& c, CheckRecord& r) {
  const auto& geo = c.geo();
  const auto& o = c.oracle();
  r.tolerance = c.tol().jet_exact;
  const double er = rel(geo.riemann04(), o.riemann04);
  const double eq = rel(geo.ricci(), o.ricci);
  const double et = rel(geo.tau(), o.tau);
  const double es = rel(geo.tau_star(), o.tau_star);
  r.values = {{"riemann", er}, {"ricci", eq}, {"tau", et}, {"tau_star", es}, {"tau_value", geo.tau()},
              {"tau_oracle", o.tau}};
  r.residual = std::max({er, eq, et, es});
  r.pass = r.residual <= r.tolerance;
}

void check_geodesic(PointContext& c, CheckRecord& r) {
  r.tolerance = c.tol().jet_exact;
  const auto g = geodesic_check(c.geo());
  r.values = {{"nabla_xi_xi", g.nabla_xi_xi}, {"d_eta", g.d_eta}};
  r.residual = std::max(g.nabla_xi_xi, g.d_eta);
  r.pass = r.residual <= r.tolerance;
}

void check_torse_forming(PointContext& c, CheckRecord& r) {
  const auto& geo = c.geo();
  const auto& tf = c.tf().report;
  r.tolerance = c.tol().jet_exact;
  double gam = 0.0;
  for (int a = 0; a < geo.dim(); ++a) gam = std::max(gam, std::abs(tf.gamma[a] + tf.f / tf.k * geo.eta()(a)));
  r.values = {{"f", tf.f}, {"k", tf.k}, {"fit_residual", tf.residual}, {"gamma+(f/k)eta", gam}};
  r.residual = std::max(tf.residual, gam);
  if (c.subject().example) {
    const double expect = c.subject().k * ell1(c);
    r.values.push_back({"expected_f", expect});
    r.residual = std::max(r.residual, rel(tf.f, expect));
  }
  if (tf.trivial) r.notes.push_back("trivial case f = 0: potential is parallel");
  r.pass = tf.is_torse_forming && r.residual <= r.tolerance;
}

void check_regularity(PointContext& c, CheckRecord& r) {
  const auto& reg = c.reg();
  r.tolerance = c.tol().refit_derivative;
  r.values = {{"kdfxi_plus_f2", reg.kdfxi_plus_f2}, {"is_regular", flag(reg.is_regular)}, {"df_xi", reg.df_xi},
              {"df_xi_jet", reg.df_xi_jet}};
  r.residual = std::abs(reg.k) * reg.route_spread;
  if (c.subject().example) {
    const double expect = c.oracle().kdfxi_plus_f2;
    r.values.push_back({"expected", expect});
    r.residual = std::max(r.residual, std::abs(reg.kdfxi_plus_f2 - expect));
  }
  r.notes.push_back(reg.is_regular ? "regular" : "non-regular");
  r.pass = r.residual <= r.tolerance;
}

void check_einstein_like(PointContext& c, CheckRecord& r) {
  const auto& el = c.el();
  const auto& [a, b, cc] = el.fit.coeffs;
  r.tolerance = c.tol().jet_exact;
  r.values = {{"a", a},
              {"b", b},
              {"c", cc},
              {"fit_residual", el.fit.residual},
              {"almost_einstein_like", flag(el.almost_einstein_like)},
              {"almost_eta_einstein", flag(el.almost_eta_einstein)},
              {"almost_einstein", flag(el.almost_einstein)}};
  r.residual = el.fit.residual;
  if (c.subject().example) {
    const auto& o = c.oracle();
    r.values.push_back({"expected_a", o.a});
    r.values.push_back({"expected_c", o.c});
    r.residual = std::max({r.residual, rel(a, o.a), std::abs(b - o.b), rel(cc, o.c)});
  }
  r.pass = r.residual <= r.tolerance;
}

void check_soliton(PointContext& c, CheckRecord& r) {
  const auto& sf = c.sf();
  const auto& [l, mu, nu] = sf.fit.coeffs;
  r.tolerance = c.tol().jet_exact;
  r.values = {{"lambda", l},
              {"mu", mu},
              {"nu", nu},
              {"fit_residual", sf.fit.residual},
              {"almost_ricci_like", flag(sf.almost_ricci_like)},
              {"almost_eta_ricci", flag(sf.almost_eta_ricci)},
              {"almost_ricci", flag(sf.almost_ricci)}};
  r.notes.push_back(to_string(sf.kind));
  r.residual = sf.fit.residual;
  if (c.subject().example) {
    const auto& o = c.oracle();
    r.values.push_back({"expected_lambda", o.lambda});
    r.values.push_back({"expected_nu", o.nu});
    r.residual = std::max({r.residual, rel(l, o.lambda), std::abs(mu - o.mu), rel(nu, o.nu)});
  }
  r.pass = r.residual <= r.tolerance;
}

void check_thm32(PointContext& c, CheckRecord& r) {
  const auto& el = c.el();
  const auto& sf = c.sf();
  const auto& reg = c.reg();
  const double jt = c.tol().jet_exact;
  r.tolerance = c.tol().refit_derivative;
  const bool el_ok = el.fit.residual <= jt;
  const bool sf_ok = sf.fit.residual <= jt;
  r.values = {{"einstein_like_residual", el.fit.residual}, {"soliton_residual", sf.fit.residual},
              {"equivalence_holds", flag(el_ok == sf_ok)}};
  const auto rel32 =
      verify_thm32(el.fit.coeffs, sf.fit.coeffs, reg.f, reg.k, reg.df_xi, c.geo().n(), r.tolerance);
  add_relations(r, rel32);
  if (!el_ok) r.notes.push_back("not almost Einstein-like at this point");
  r.pass = el_ok == sf_ok && rel32.pass;
}

std::optional<double> xi_section_value(PointContext& c) {
  const auto& geo = c.geo();
  const auto sw = xi_sections(geo, random_directions(geo.dim(), 10, 7u + static_cast<unsigned>(c.index())));
  if (sw.values.empty()) return std::nullopt;
  return sw.values.front();
}

void check_cor35(PointContext& c, CheckRecord& r) {
  const auto& geo = c.geo();
  const auto& reg = c.reg();
  r.tolerance = c.tol().refit_derivative;
  Cor35Input in;
  in.f = reg.f;
  in.f_prime = reg.df_xi;
  in.k = reg.k;
  in.a = c.el().fit.coeffs[0];
  in.tau = geo.tau();
  in.n = geo.n();
  in.K_xi = xi_section_value(c);
  in.grad_f_horizontal = horizontal_gradient(c.tf(), geo);
  const auto rep = verify_cor35(in, r.tolerance);
  add_relations(r, rep);
  if (c.el().fit.residual > c.tol().jet_exact) r.notes.push_back("hypothesis not met: not almost Einstein-like");
  r.pass = rep.pass;
}

void check_thm22(PointContext& c, CheckRecord& r) {
  const auto& geo = c.geo();
  r.tolerance = c.tol().jet_exact;
  const auto rep = thm22_curvature_checks(geo, c.theta(), r.tolerance);
  add_relations(r, rep);
  const auto sw = xi_sections(geo, random_directions(geo.dim(), 10, 7u + static_cast<unsigned>(c.index())));
  r.values.push_back({"K_spread", sw.spread()});
  r.residual = std::max(r.residual, sw.spread());
  r.pass = rep.pass && sw.spread() <= r.tolerance;
}

void check_scalar_consistency(PointContext& c, CheckRecord& r) {
  const auto& geo = c.geo();
  const auto& [a, b, cc] = c.el().fit.coeffs;
  const int n = geo.n();
  r.tolerance = c.tol().jet_exact;
  const double t1 = std::abs(geo.tau() - ((2.0 * n + 1.0) * a + b + cc));
  const double t2 = std::abs(geo.tau_star() + 2.0 * n * b);
  r.values = {{"tau_relation", t1}, {"tau_star_relation", t2}};
  r.residual = std::max(t1, t2);
  r.pass = r.residual <= r.tolerance;
}

using CheckFn = void (*)(PointContext&, CheckRecord&);

CheckFn point_check(const std::string& name) {
  if (name == "structure") return check_structure;
  if (name == "class_flags") return check_class_flags;
  if (name == "lee_forms") return check_lee_forms;
  if (name == "f_identities") return check_f_identities;
  if (name == "curvature_symmetries") return check_curvature_symmetries;
  if (name == "curvature_oracle") return check_curvature_oracle;
  if (name == "geodesic") return check_geodesic;
  if (name == "torse_forming") return check_torse_forming;
  if (name == "regularity") return check_regularity;
  if (name == "einstein_like_fit") return check_einstein_like;
  if (name == "soliton_fit") return check_soliton;
  if (name == "thm32") return check_thm32;
  if (name == "cor35") return check_cor35;
  if (name == "thm22") return check_thm22;
  if (name == "scalar_consistency") return check_scalar_consistency;
  return nullptr;
}

// Per-point inputs of the grid-level parallel check.
struct ParallelSample {
  std::optional<ParallelPoint> point;
  double lambda = 0.0;
  double fit_residual = 0.0;
  double sum_relation = 0.0;
  std::string error;
};

ParallelSample parallel_sample(PointContext& c) {
  ParallelSample out;
  try {
    const auto h = soliton_tensor(c.theta(), constant_scalar(0.0), conformal_scalar(c.theta()));
    out.point = parallel_point(c.geo(), h);
    const auto& [l, mu, nu] = c.sf().fit.coeffs;
    const auto& reg = c.reg();
    const double n = c.geo().n();
    out.lambda = l;
    out.fit_residual = c.sf().fit.residual;
    out.sum_relation = std::abs(l + mu + nu - 2.0 * n / (reg.k * reg.k) * (reg.k * reg.df_xi + reg.f * reg.f));
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

CheckRecord parallel_record(const std::vector<ParallelSample>& samples, const Tolerances& tol) {
  CheckRecord r;
  r.check = "parallel";
  r.tolerance = tol.jet_exact;
  std::vector<ParallelPoint> pts;
  double lmin = inf, lmax = -inf, fit_worst = 0.0, sum_rel = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!s.point) {
      r.residual = inf;
      r.pass = false;
      r.notes.push_back("error at point " + std::to_string(i) + ": " + s.error);
      return r;
    }
    pts.push_back(*s.point);
    lmin = std::min(lmin, s.lambda);
    lmax = std::max(lmax, s.lambda);
    fit_worst = std::max(fit_worst, s.fit_residual);
    sum_rel = std::max(sum_rel, s.sum_relation);
  }
  const auto pr = combine_parallel(pts, tol.jet_exact);
  double mult_lambda = 0.0;
  if (pr.constant_multiple)
    for (const auto& s : samples) mult_lambda = std::max(mult_lambda, std::abs(*pr.constant_multiple + s.lambda));

  // Parallel h must go together with a soliton of constant lambda obeying
  // the sum relation, and then h = -lambda g.
  const bool soliton_side =
      fit_worst <= tol.jet_exact && (lmax - lmin) <= tol.jet_exact && sum_rel <= tol.refit_derivative;
  r.values = {{"max_nabla_h", pr.max_nabla_norm},
              {"is_parallel", flag(pr.is_parallel)},
              {"constant_multiple", pr.constant_multiple.value_or(std::nan(""))},
              {"multiple_residual", pr.multiple_residual},
              {"h_curvature_xi", pr.h_curvature_xi},
              {"h_vertical", pr.h_vertical},
              {"lambda_spread", lmax - lmin},
              {"soliton_fit_worst", fit_worst},
              {"sum_relation", sum_rel},
              {"soliton_side", flag(soliton_side)}};
  r.residual =
      pr.is_parallel ? std::max({pr.max_nabla_norm, pr.multiple_residual, mult_lambda}) : pr.max_nabla_norm;
  r.notes.push_back(pr.is_parallel ? "parallel" : "not parallel");
  r.pass = pr.is_parallel == soliton_side &&
           (!pr.is_parallel || (pr.multiple_residual <= tol.jet_exact && mult_lambda <= tol.jet_exact));
  return r;
}

double tolerance_for(const std::string& name, const Tolerances& tol) {
  if (name == "structure") return tol.structure;
  if (name == "regularity" || name == "thm32" || name == "cor35") return tol.refit_derivative;
  return tol.jet_exact;
}

int thread_count(int requested, std::size_t work) {
  int t = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  t = std::max(1, t);
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(t), std::max<std::size_t>(1, work)));
}

}  // namespace

SuiteReport run_checks(const SuiteSubject& s, const SuiteOptions& options) {
  std::vector<std::string> checks = options.checks.empty() ? default_checks(s) : options.checks;
  for (const auto& c : checks) {
    if (!is_check_name(c)) throw UsageError("unknown check '" + c + "'");
    if (c == "curvature_oracle" && !s.example) throw UsageError("check 'curvature_oracle' needs the example family");
    if (c == "parallel" && !s.example) throw UsageError("check 'parallel' needs the example family");
  }
  // report order follows the canonical list
  std::vector<std::string> ordered;
  for (const auto& c : all_check_names())
    if (std::find(checks.begin(), checks.end(), c) != checks.end()) ordered.push_back(c);

  std::vector<std::string> per_point;
  for (const auto& c : ordered)
    if (c != "parallel") per_point.push_back(c);

  const std::size_t np = s.grid.size();
  const bool want_parallel = std::find(ordered.begin(), ordered.end(), "parallel") != ordered.end();
  std::vector<std::vector<CheckRecord>> results(np);
  std::vector<ParallelSample> samples(want_parallel ? np : 0);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < np; i = next++) {
      PointContext ctx(s, options.tolerances, s.grid[i], static_cast<int>(i));
      auto& out = results[i];
      for (const auto& name : per_point) {
        CheckRecord r;
        r.check = name;
        r.point_index = static_cast<int>(i);
        r.point.assign(s.grid[i].coords().begin(), s.grid[i].coords().end());
        r.tolerance = tolerance_for(name, options.tolerances);
        try {
          point_check(name)(ctx, r);
        } catch (const std::exception& e) {
          r.values.clear();
          r.residual = inf;
          r.pass = false;
          r.notes.push_back(std::string("error: ") + e.what());
        }
        out.push_back(std::move(r));
      }
      if (want_parallel) samples[i] = parallel_sample(ctx);
    }
  };
  const int nt = thread_count(options.threads, np);
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SuiteReport rep;
  for (std::size_t c = 0; c < per_point.size(); ++c)
    for (std::size_t i = 0; i < np; ++i) rep.records.push_back(std::move(results[i][c]));
  if (want_parallel) rep.records.push_back(parallel_record(samples, options.tolerances));

  for (const auto& name : ordered) {
    CheckSummary sum;
    sum.check = name;
    for (const auto& r : rep.records) {
      if (r.check != name) continue;
      ++sum.count;
      if (r.pass)
        ++sum.passed;
      else
        ++sum.failed;
      sum.worst_residual = std::max(sum.worst_residual, r.residual);
      sum.tolerance = r.tolerance;
    }
    rep.summary.push_back(sum);
  }
  return rep;
}

SuiteReport paper_suite(const ExampleManifold& e, const Tolerances& tolerances, int grid_size, int threads) {
  SuiteOptions opt;
  opt.tolerances = tolerances;
  opt.threads = threads;
  return run_checks(subject_from_example(e, default_grid(e, grid_size)), opt);
}

}  // namespace sforge
