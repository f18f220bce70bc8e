#include "soliton_forge/cli.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "soliton_forge/report.hpp"

namespace sforge {

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"run",         "verify-structure", "classify", "curvature-report",
                                              "soliton-fit", "paper-suite"};
  return names;
}

std::vector<std::string> subcommand_checks(const std::string& sub) {
  if (sub == "verify-structure") return {"structure", "class_flags", "lee_forms", "f_identities"};
  if (sub == "classify") return {"class_flags", "torse_forming", "regularity", "einstein_like_fit", "soliton_fit"};
  if (sub == "curvature-report")
    return {"curvature_symmetries", "curvature_oracle", "geodesic", "thm22", "scalar_consistency"};
  if (sub == "soliton-fit")
    return {"torse_forming", "regularity", "einstein_like_fit", "soliton_fit", "thm32", "cor35", "parallel"};
  if (sub == "paper-suite") return {"paper_suite"};
  return {};
}

SuiteReport run(const RunConfig& config, const std::vector<std::string>& checks, int threads,
                const std::string& provenance) {
  SuiteSubject subject = build_subject(config);
  std::vector<std::string> names;
  if (checks.empty()) {
    names = resolve_checks(config.checks, subject);
  } else {
    // presets keep only what applies to the subject
    const auto applicable = default_checks(subject);
    for (const auto& c : checks) {
      if (c == "paper_suite") {
        for (const auto& d : applicable)
          if (std::find(names.begin(), names.end(), d) == names.end()) names.push_back(d);
      } else if (std::find(applicable.begin(), applicable.end(), c) != applicable.end()) {
        names.push_back(c);
      }
    }
  }
  SuiteOptions opt;
  opt.tolerances = config.tolerances;
  opt.checks = names;
  opt.threads = threads;
  SuiteReport rep = run_checks(subject, opt);
  rep.config_json = provenance;
  return rep;
}

int thread_cap_from_env() {
  const char* v = std::getenv("SOLITON_FORGE_THREADS");
  if (!v || !*v) return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096)
    throw ConfigError("SOLITON_FORGE_THREADS", "expected a positive integer, got '" + std::string(v) + "'");
  return static_cast<int>(n);
}

namespace {

std::vector<double> parse_point(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("--point", "cannot read coordinate '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("--point", "no coordinates");
  return out;
}

struct Invocation {
  std::string subcommand;
  std::string config_path;
  bool json = false;
  std::optional<double> tol;
  std::string point;
  std::vector<std::string> sets;
};

int execute(const Invocation& inv, std::ostream& out, std::ostream& err) {
  Json doc = inv.config_path.empty() ? Json::object() : load_config_document(inv.config_path);
  Json effective = doc;
  for (const auto& s : inv.sets) apply_override(effective, s);
  RunConfig config = parse_config(effective);
  if (inv.tol) {
    if (!(*inv.tol > 0.0) || !std::isfinite(*inv.tol)) throw ConfigError("--tol", "must be a positive number");
    config.tolerances = Tolerances{*inv.tol, *inv.tol, *inv.tol};
  }
  std::vector<double> point;
  if (!inv.point.empty()) {
    point = parse_point(inv.point);
    if (point.size() != static_cast<std::size_t>(2 * config.n + 1))
      throw ConfigError("--point", "expected " + std::to_string(2 * config.n + 1) + " coordinates, got " +
                                       std::to_string(point.size()));
    config.grid.points = {point};
  }
  const int cap = thread_cap_from_env();
  const int hw = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  const int threads = cap > 0 ? std::min(cap, hw) : hw;

  Json prov = Json::object();
  prov["subcommand"] = inv.subcommand;
  prov["config"] = doc;
  prov["overrides"] = inv.sets;
  prov["tol"] = inv.tol ? Json(*inv.tol) : Json(nullptr);
  prov["point"] = point.empty() ? Json(nullptr) : Json(point);

  const SuiteReport rep = run(config, subcommand_checks(inv.subcommand), threads, write_json(prov));

  if (!config.output.path.empty())
    write_file(config.output.path, emit_report(rep, parse_format(config.output.format)));
  if (inv.json) {
    out << emit_report(rep, ReportFormat::json);
  } else {
    out << emit_report(rep, ReportFormat::text);
  }
  if (!rep.all_pass()) {
    err << failure_summary(rep);
    return exit_failures;
  }
  return exit_pass;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for almost contact B-metric structures and Ricci-like solitons", "soliton_forge"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(engine_version));
  Invocation inv;
  const std::vector<std::pair<std::string, std::string>> help{
      {"run", "run the checks listed in the config"},
      {"verify-structure", "structure axioms, class flags, Lee forms, F identities"},
      {"classify", "class flags, torse-forming potential, regularity, Einstein-like and soliton fits"},
      {"curvature-report", "curvature symmetries and closed forms, geodesic field, xi-sections, scalars"},
      {"soliton-fit", "potential, fits, coefficient relations, parallel soliton tensor"},
      {"paper-suite", "every applicable check"}};
  for (const auto& [name, desc] : help) {
    auto* sub = app.add_subcommand(name, desc);
    sub->add_option("--config,-c", inv.config_path, "JSON config file");
    sub->add_flag("--json", inv.json, "print the JSON report on stdout");
    sub->add_option("--tol", inv.tol, "one tolerance for every check");
    sub->add_option("--point", inv.point, "single point, comma separated coordinates");
    sub->add_option("--set", inv.sets, "override a config field: dotted.path=value");
    sub->callback([&inv, name = name] { inv.subcommand = name; });
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_config;
  }

  try {
    return execute(inv, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return exit_io;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_config;
  }
}

}  // namespace sforge
