#include "soliton_forge/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "soliton_forge/example_manifold.hpp"
#include "soliton_forge/expression.hpp"

namespace sforge {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void only_keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ConfigError(join(path, key), "unknown field");
  }
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

int integer(const Json& j, const std::string& path) {
  const double v = number(j, path);
  if (std::floor(v) != v || std::abs(v) > 1e9) throw ConfigError(path, "expected an integer");
  return static_cast<int>(v);
}

std::string string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

bool boolean(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

std::vector<double> numbers(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], index(path, i)));
  return out;
}

std::vector<std::string> strings(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(string(j[i], index(path, i)));
  return out;
}

// An expression entry: a string, or a number written directly.
std::string expression_text(const Json& j, const std::string& path, const std::vector<std::string>& vars) {
  std::string text;
  if (j.is_number())
    text = detail::format_value(number(j, path));
  else
    text = string(j, path);
  try {
    (void)Expression::parse(text, vars);
  } catch (const ParseError& e) {
    throw ConfigError(path, e.what());
  }
  return text;
}

std::vector<std::string> expression_row(const Json& j, const std::string& path, std::size_t dim,
                                        const std::vector<std::string>& vars) {
  if (!j.is_array() || j.size() != dim)
    throw ConfigError(path, "expected an array of " + std::to_string(dim) + " expressions");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < dim; ++i) out.push_back(expression_text(j[i], index(path, i), vars));
  return out;
}

std::vector<std::vector<std::string>> expression_matrix(const Json& j, const std::string& path, std::size_t dim,
                                                        const std::vector<std::string>& vars) {
  if (!j.is_array() || j.size() != dim)
    throw ConfigError(path, "expected " + std::to_string(dim) + " rows");
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < dim; ++i) out.push_back(expression_row(j[i], index(path, i), dim, vars));
  return out;
}

ProfileConfig parse_profile(const Json& j, const std::string& path) {
  ProfileConfig p;
  if (j.is_string()) {
    p.kind = j.get<std::string>();
  } else {
    require_object(j, path);
    only_keys(j, path, {"kind", "params"});
    if (!j.contains("kind")) throw ConfigError(join(path, "kind"), "missing");
    p.kind = string(j["kind"], join(path, "kind"));
  }
  static const std::set<std::string> kinds{"log", "scaled_log", "linear", "exp", "custom"};
  if (!kinds.count(p.kind))
    throw ConfigError(join(path, "kind"), "unknown profile '" + p.kind + "' (log, scaled_log, linear, exp, custom)");
  const bool has_params = j.is_object() && j.contains("params");
  if (p.kind == "custom" && !has_params) throw ConfigError(join(path, "params"), "custom profile needs an expression");
  if (!has_params) return p;
  const std::string pp = join(path, "params");
  const Json& params = j["params"];
  require_object(params, pp);
  if (p.kind == "log") {
    only_keys(params, pp, {"c"});
    if (params.contains("c")) p.c = number(params["c"], join(pp, "c"));
    if (p.c == 0.0) throw ConfigError(join(pp, "c"), "must be nonzero");
  } else if (p.kind == "linear") {
    only_keys(params, pp, {"alpha"});
    if (params.contains("alpha")) p.alpha = number(params["alpha"], join(pp, "alpha"));
    if (p.alpha == 0.0) throw ConfigError(join(pp, "alpha"), "must be nonzero");
  } else if (p.kind == "exp") {
    only_keys(params, pp, {"q"});
    if (params.contains("q")) p.q = number(params["q"], join(pp, "q"));
    if (p.q == 0.0) throw ConfigError(join(pp, "q"), "must be nonzero");
  } else if (p.kind == "custom") {
    only_keys(params, pp, {"expression", "positive_t"});
    if (!params.contains("expression")) throw ConfigError(join(pp, "expression"), "missing");
    p.expression = expression_text(params["expression"], join(pp, "expression"), {"t"});
    if (params.contains("positive_t")) p.positive_t = boolean(params["positive_t"], join(pp, "positive_t"));
  } else {
    only_keys(params, pp, {});
  }
  return p;
}

ExpressionManifold parse_manifold(const Json& j, const std::string& path) {
  require_object(j, path);
  only_keys(j, path, {"coordinates", "metric", "phi", "xi", "eta", "nonzero", "positive"});
  for (const char* key : {"coordinates", "metric", "phi", "xi", "eta"})
    if (!j.contains(key)) throw ConfigError(join(path, key), "missing");
  ExpressionManifold m;
  m.coordinates = strings(j["coordinates"], join(path, "coordinates"));
  const std::size_t dim = m.coordinates.size();
  if (dim < 3 || dim % 2 == 0) throw ConfigError(join(path, "coordinates"), "need an odd number (2n+1 >= 3) of names");
  for (std::size_t i = 0; i < dim; ++i) {
    const auto& c = m.coordinates[i];
    const bool ok = !c.empty() && (std::isalpha(static_cast<unsigned char>(c[0])) || c[0] == '_') &&
                    std::all_of(c.begin(), c.end(), [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; });
    if (!ok || c == "pi") throw ConfigError(index(join(path, "coordinates"), i), "invalid coordinate name '" + c + "'");
    if (std::count(m.coordinates.begin(), m.coordinates.end(), c) > 1)
      throw ConfigError(index(join(path, "coordinates"), i), "duplicate coordinate name '" + c + "'");
  }
  m.metric = expression_matrix(j["metric"], join(path, "metric"), dim, m.coordinates);
  m.phi = expression_matrix(j["phi"], join(path, "phi"), dim, m.coordinates);
  m.xi = expression_row(j["xi"], join(path, "xi"), dim, m.coordinates);
  m.eta = expression_row(j["eta"], join(path, "eta"), dim, m.coordinates);
  for (const char* key : {"nonzero", "positive"}) {
    if (!j.contains(key)) continue;
    auto names = strings(j[key], join(path, key));
    for (std::size_t i = 0; i < names.size(); ++i)
      if (std::find(m.coordinates.begin(), m.coordinates.end(), names[i]) == m.coordinates.end())
        throw ConfigError(index(join(path, key), i), "unknown coordinate '" + names[i] + "'");
    (std::string(key) == "nonzero" ? m.nonzero : m.positive) = std::move(names);
  }
  return m;
}

std::vector<std::string> parse_checks(const Json& j, const std::string& path) {
  std::vector<std::string> out;
  if (j.is_string()) {
    out.push_back(j.get<std::string>());
  } else {
    out = strings(j, path);
    if (out.empty()) throw ConfigError(path, "no checks requested");
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i] != "paper_suite" && !is_check_name(out[i]))
      throw ConfigError(j.is_string() ? path : index(path, i), "unknown check '" + out[i] + "'");
  return out;
}

double tolerance(const Json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) throw ConfigError(path, "must be > 0");
  return v;
}

TensorField expression_field(Valence valence, std::vector<Expression> components) {
  return [valence, comps = std::move(components)](CoordinateJets x) {
    const int dim = static_cast<int>(x.size());
    std::vector<Jet3> data;
    data.reserve(comps.size());
    for (const auto& e : comps) data.push_back(e.evaluate(x));
    return Tensor<Jet3>(valence, dim, std::move(data));
  };
}

std::vector<Expression> compile(const std::vector<std::vector<std::string>>& rows, const std::vector<std::string>& vars) {
  std::vector<Expression> out;
  for (const auto& row : rows)
    for (const auto& text : row) out.push_back(Expression::parse(text, vars));
  return out;
}

ManifoldSpec manifold_from_expressions(const ExpressionManifold& em) {
  const auto& vars = em.coordinates;
  ManifoldSpec m;
  m.n = static_cast<int>(vars.size() - 1) / 2;
  m.coordinate_names = vars;
  m.metric = expression_field({0, 2}, compile(em.metric, vars));
  m.phi = expression_field({1, 1}, compile(em.phi, vars));
  m.xi = expression_field({1, 0}, compile({em.xi}, vars));
  m.eta = expression_field({0, 1}, compile({em.eta}, vars));
  std::vector<int> nonzero, positive;
  const auto pos = [&](const std::string& name) {
    return static_cast<int>(std::find(vars.begin(), vars.end(), name) - vars.begin());
  };
  for (const auto& s : em.nonzero) nonzero.push_back(pos(s));
  for (const auto& s : em.positive) positive.push_back(pos(s));
  m.domain_guard = [vars, nonzero, positive](const Point& p) -> std::optional<std::string> {
    const auto x = p.coords();
    for (int i : nonzero)
      if (x[static_cast<std::size_t>(i)] == 0.0) return "coordinate " + vars[static_cast<std::size_t>(i)] + " must be nonzero";
    for (int i : positive)
      if (!(x[static_cast<std::size_t>(i)] > 0.0)) return "coordinate " + vars[static_cast<std::size_t>(i)] + " must be positive";
    return std::nullopt;
  };
  return m;
}

EllProfile make_profile(const RunConfig& c) {
  const auto& p = c.profile;
  if (p.kind == "log") return EllProfile::log(p.c);
  if (p.kind == "scaled_log") return EllProfile::scaled_log();
  if (p.kind == "linear") return EllProfile::linear(p.alpha);
  if (p.kind == "exp") return EllProfile::exponential(p.q, c.k, c.n);
  const auto e = Expression::parse(p.expression, {"t"});
  return EllProfile::custom(
      p.expression,
      [e](double t) {
        const Jet3 x = Jet3::variable(1, t, 0);
        const std::array<Jet3, 1> vars{x};
        const Jet3 l = e.evaluate(std::span<const Jet3>(vars));
        return EllProfile::Derivatives{l.value(), l.d1(0), l.d2(0, 0), l.d3(0, 0, 0)};
      },
      p.positive_t);
}

}  // namespace

RunConfig parse_config(const Json& doc) {
  require_object(doc, "");
  only_keys(doc, "",
            {"description", "n", "k", "v_sign", "profile", "grid", "tolerances", "checks", "output", "manifold"});
  RunConfig c;
  if (doc.contains("manifold")) {
    c.manifold = parse_manifold(doc["manifold"], "manifold");
    c.n = static_cast<int>(c.manifold->coordinates.size() - 1) / 2;
    if (doc.contains("n") && integer(doc["n"], "n") != c.n)
      throw ConfigError("n", "does not match the " + std::to_string(c.manifold->coordinates.size()) +
                                 " coordinates of manifold");
  } else if (doc.contains("n")) {
    c.n = integer(doc["n"], "n");
    if (c.n < 1) throw ConfigError("n", "must be >= 1");
  }
  if (doc.contains("k")) {
    c.k = number(doc["k"], "k");
    if (c.k == 0.0) throw ConfigError("k", "must be nonzero");
  }
  if (doc.contains("v_sign")) {
    c.v_sign = integer(doc["v_sign"], "v_sign");
    if (c.v_sign != 1 && c.v_sign != -1) throw ConfigError("v_sign", "must be 1 or -1");
  }
  if (doc.contains("profile")) c.profile = parse_profile(doc["profile"], "profile");

  c.grid.coordinate_values = default_coordinate_values();
  c.grid.t_values = default_t_values();
  if (doc.contains("grid")) {
    const Json& g = doc["grid"];
    require_object(g, "grid");
    only_keys(g, "grid", {"coordinate_values", "t_values", "size", "points"});
    if (g.contains("coordinate_values")) {
      c.grid.coordinate_values = numbers(g["coordinate_values"], "grid.coordinate_values");
      if (c.grid.coordinate_values.empty()) throw ConfigError("grid.coordinate_values", "must not be empty");
    }
    if (g.contains("t_values")) {
      c.grid.t_values = numbers(g["t_values"], "grid.t_values");
      if (c.grid.t_values.empty()) throw ConfigError("grid.t_values", "must not be empty");
    }
    if (g.contains("size")) {
      c.grid.size = integer(g["size"], "grid.size");
      if (c.grid.size < 1) throw ConfigError("grid.size", "must be >= 1");
    }
    if (g.contains("points")) {
      const Json& pts = g["points"];
      if (!pts.is_array() || pts.empty()) throw ConfigError("grid.points", "expected a non-empty array of points");
      for (std::size_t i = 0; i < pts.size(); ++i) {
        auto p = numbers(pts[i], index("grid.points", i));
        if (p.size() != static_cast<std::size_t>(2 * c.n + 1))
          throw ConfigError(index("grid.points", i), "expected " + std::to_string(2 * c.n + 1) + " coordinates");
        c.grid.points.push_back(std::move(p));
      }
    }
  }
  if (doc.contains("tolerances")) {
    const Json& t = doc["tolerances"];
    require_object(t, "tolerances");
    only_keys(t, "tolerances", {"jet_exact", "refit_derivative", "structure"});
    if (t.contains("jet_exact")) c.tolerances.jet_exact = tolerance(t["jet_exact"], "tolerances.jet_exact");
    if (t.contains("refit_derivative"))
      c.tolerances.refit_derivative = tolerance(t["refit_derivative"], "tolerances.refit_derivative");
    if (t.contains("structure")) c.tolerances.structure = tolerance(t["structure"], "tolerances.structure");
  }
  if (doc.contains("checks")) c.checks = parse_checks(doc["checks"], "checks");
  if (doc.contains("output")) {
    const Json& o = doc["output"];
    require_object(o, "output");
    only_keys(o, "output", {"path", "format"});
    if (o.contains("path")) c.output.path = string(o["path"], "output.path");
    if (o.contains("format")) {
      c.output.format = string(o["format"], "output.format");
      if (c.output.format != "json" && c.output.format != "csv" && c.output.format != "text")
        throw ConfigError("output.format", "must be json, csv or text");
    }
  }
  return c;
}

Json load_config_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", "malformed JSON in '" + path + "': " + e.what());
  }
}

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set " + assignment, "expected key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  Json value = Json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  Json* cur = &doc;
  std::string path;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string seg = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (seg.empty()) throw ConfigError(key, "empty path segment");
    const bool numeric = std::all_of(seg.begin(), seg.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
    if (cur->is_array()) {
      if (!numeric) throw ConfigError(path, "is an array; index it with a number");
      const auto i = std::stoul(seg);
      if (i > cur->size()) throw ConfigError(index(path, i), "index out of range");
      if (i == cur->size()) cur->push_back(nullptr);
      path = index(path, i);
      cur = &(*cur)[i];
    } else if (cur->is_object() || cur->is_null()) {
      path = join(path, seg);
      cur = &(*cur)[seg];
    } else {
      throw ConfigError(path, "is not an object or array");
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *cur = std::move(value);
}

SuiteSubject build_subject(const RunConfig& c) {
  SuiteSubject s;
  if (c.manifold) {
    s.manifold = manifold_from_expressions(*c.manifold);
    s.k = c.k;
  } else {
    ExampleManifold e = [&] {
      try {
        return build_example(c.n, make_profile(c), c.k, c.v_sign);
      } catch (const UsageError& err) {
        throw ConfigError("profile", err.what());
      } catch (const DomainError& err) {
        throw ConfigError("profile", err.what());
      }
    }();
    s = subject_from_example(e, {});
  }
  if (!c.grid.points.empty()) {
    for (const auto& p : c.grid.points) s.grid.emplace_back(p);
  } else {
    s.grid = product_grid(c.n, c.grid.coordinate_values, c.grid.t_values, c.grid.size);
  }
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    try {
      require_admitted(s.manifold, s.grid[i]);
    } catch (const DomainError& err) {
      throw ConfigError(c.grid.points.empty() ? "grid" : index("grid.points", i),
                        "point " + std::to_string(i) + " rejected: " + err.what());
    }
  }
  return s;
}

std::vector<std::string> resolve_checks(const std::vector<std::string>& requested, const SuiteSubject& subject) {
  std::vector<std::string> out;
  const auto add = [&](const std::string& name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  };
  for (const auto& r : requested) {
    if (r == "paper_suite") {
      for (const auto& d : default_checks(subject)) add(d);
      continue;
    }
    if (!is_check_name(r)) throw ConfigError("checks", "unknown check '" + r + "'");
    if ((r == "curvature_oracle" || r == "parallel") && !subject.example)
      throw ConfigError("checks", "check '" + r + "' needs the example family, not a user-defined manifold");
    add(r);
  }
  return out;
}

}  // namespace sforge
