#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "soliton_forge/cli.hpp"
#include "soliton_forge/config.hpp"
#include "soliton_forge/expression.hpp"
#include "soliton_forge/report.hpp"

using namespace sforge;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "soliton_forge");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "soliton_forge_tests";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_config(const std::string& name, const Json& doc) {
  const fs::path p = scratch(name);
  std::ofstream(p) << doc.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double value_of(const Json& record, const std::string& name) {
  for (const auto& pair : record["values"])
    if (pair[0] == name) return pair[1].get<double>();
  FAIL("no value " << name);
  return 0.0;
}

std::string config_error_path(const Json& doc) {
  try {
    (void)build_subject(parse_config(doc));
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<none>";
}

// The n = 1 deformed structure for l = ln t written out by hand: with
// A = t^2 (y^2 - x^2), B = 2 t^2 x y the metric is [[-A, B, 0], [B, A, 0], [0, 0, 1]].
Json hand_manifold() {
  return Json::parse(R"json({
    "coordinates": ["x", "y", "t"],
    "metric": [["-t^2*(y^2 - x^2)", "2*t^2*x*y", "0"],
               ["2*t^2*x*y", "t^2*(y^2 - x^2)", "0"],
               ["0", "0", "1"]],
    "phi": [["0", "-1", "0"], ["1", "0", "0"], ["0", "0", "0"]],
    "xi": ["0", "0", "1"],
    "eta": ["0", "0", "1"],
    "nonzero": ["y"],
    "positive": ["t"]
  })json");
}

}  // namespace

TEST_CASE("expressions") {
  const std::vector<std::string> xy{"x", "y"};
  SUBCASE("precedence and associativity") {
    const double at[] = {2.0, 3.0};
    CHECK(Expression::parse("1 + 2*3^2", xy).evaluate(at) == 19.0);
    CHECK(Expression::parse("-x^2", xy).evaluate(at) == -4.0);
    CHECK(Expression::parse("2^3^2", xy).evaluate(at) == 512.0);
    CHECK(Expression::parse("x^-1", xy).evaluate(at) == 0.5);
    CHECK(Expression::parse("(x + y)/y - 1", xy).evaluate(at) == doctest::Approx(2.0 / 3.0));
    CHECK(Expression::parse("8/2/2", xy).evaluate(at) == 2.0);
    CHECK(Expression::parse("x - y - 1", xy).evaluate(at) == -2.0);
  }
  SUBCASE("functions and constants") {
    const double at[] = {0.5, 2.0};
    CHECK(Expression::parse("ln(exp(x))", xy).evaluate(at) == doctest::Approx(0.5));
    CHECK(Expression::parse("sin(pi/2) + cos(0)", xy).evaluate(at) == doctest::Approx(2.0));
    CHECK(Expression::parse("arctan(x/y) - atan(0.25)", xy).evaluate(at) == doctest::Approx(0.0));
    CHECK(Expression::parse("sqrt(y)^2", xy).evaluate(at) == doctest::Approx(2.0));
    CHECK(Expression::parse("1.5e-1 + .25", xy).evaluate(at) == doctest::Approx(0.4));
  }
  SUBCASE("jets carry derivatives") {
    const std::vector<Jet3> v{Jet3::variable(2, 2.0, 0), Jet3::variable(2, 3.0, 1)};
    const Jet3 r = Expression::parse("x^2*y", xy).evaluate(v);
    CHECK(r.value() == 12.0);
    CHECK(r.d1(0) == 12.0);
    CHECK(r.d1(1) == 4.0);
    CHECK(r.d2(0, 1) == 4.0);
    CHECK(r.d3(0, 0, 1) == 2.0);
  }
  SUBCASE("constants and dependencies") {
    CHECK(Expression::parse("2*pi", xy).is_constant());
    CHECK_FALSE(Expression::parse("y + 0*x", xy).is_constant());
    CHECK(Expression::parse("y^2 + 1", xy).dependencies() == std::vector<int>{1});
    CHECK(Expression::constant(4.0).evaluate(std::span<const double>{}) == 4.0);
  }
  SUBCASE("errors name the column") {
    auto column = [&](const char* text) -> std::size_t {
      try {
        (void)Expression::parse(text, xy);
      } catch (const ParseError& e) {
        return e.column();
      }
      return 0;
    };
    CHECK(column("1 + * 2") == 5);
    CHECK(column("x + z") == 5);
    CHECK(column("ln(x") == 5);
    CHECK(column("foo(x)") == 1);
    CHECK(column("x y") == 3);
    CHECK(column("") == 1);
    CHECK_THROWS_WITH_AS(Expression::parse("2 $ x", xy), doctest::Contains("column 3"), ParseError);
  }
}

TEST_CASE("config parsing") {
  SUBCASE("defaults") {
    const RunConfig c = parse_config(Json::object());
    CHECK(c.n == 1);
    CHECK(c.k == 1.0);
    CHECK(c.v_sign == 1);
    CHECK(c.profile.kind == "scaled_log");
    CHECK(c.grid.size == 27);
    CHECK(c.tolerances.jet_exact == 1e-8);
    CHECK(c.tolerances.refit_derivative == 1e-6);
    CHECK(c.checks == std::vector<std::string>{"paper_suite"});
  }
  SUBCASE("profile forms") {
    auto c = parse_config(Json::parse(R"({"profile": "linear"})"));
    CHECK(c.profile.kind == "linear");
    c = parse_config(Json::parse(R"({"profile": {"kind": "log", "params": {"c": 2}}})"));
    CHECK(c.profile.c == 2.0);
    c = parse_config(Json::parse(R"({"profile": {"kind": "custom", "params": {"expression": "t^2", "positive_t": true}}})"));
    CHECK(c.profile.expression == "t^2");
    CHECK(c.profile.positive_t);
  }
  SUBCASE("errors name the field") {
    CHECK(config_error_path(Json::parse(R"({"bogus": 1})")) == "bogus");
    CHECK(config_error_path(Json::parse(R"({"grid": {"sizes": 3}})")) == "grid.sizes");
    CHECK(config_error_path(Json::parse(R"({"n": 0})")) == "n");
    CHECK(config_error_path(Json::parse(R"({"n": 1.5})")) == "n");
    CHECK(config_error_path(Json::parse(R"({"k": 0})")) == "k");
    CHECK(config_error_path(Json::parse(R"({"v_sign": 3})")) == "v_sign");
    CHECK(config_error_path(Json::parse(R"({"tolerances": {"jet_exact": -1}})")) == "tolerances.jet_exact");
    CHECK(config_error_path(Json::parse(R"({"profile": "quadratic"})")) == "profile.kind");
    CHECK(config_error_path(Json::parse(R"({"profile": {"kind": "log", "params": {"alpha": 1}}})")) ==
          "profile.params.alpha");
    CHECK(config_error_path(Json::parse(R"({"profile": {"kind": "custom", "params": {"expression": "x^2"}}})")) ==
          "profile.params.expression");
    CHECK(config_error_path(Json::parse(R"({"checks": ["structure", "nope"]})")) == "checks[1]");
    CHECK(config_error_path(Json::parse(R"({"output": {"format": "xml"}})")) == "output.format");
    CHECK(config_error_path(Json::parse(R"({"grid": {"points": [[1, 1, 1], [1, 0, 1]]}})")) == "grid.points[1]");
    CHECK(config_error_path(Json::parse(R"({"grid": {"points": [[1, 1]]}})")) == "grid.points[0]");
    CHECK(config_error_path(Json::parse(R"({"profile": {"kind": "custom", "params": {"expression": "5"}}})")) ==
          "profile");
    Json m = Json::object();
    m["manifold"] = hand_manifold();
    m["manifold"]["metric"][0][1] = "2*t^2*x*";
    CHECK(config_error_path(m) == "manifold.metric[0][1]");
    m["manifold"] = hand_manifold();
    m["manifold"]["coordinates"] = {"x", "y"};
    CHECK(config_error_path(m) == "manifold.coordinates");
    m["manifold"] = hand_manifold();
    m["manifold"]["xi"] = {"0", "1"};
    CHECK(config_error_path(m) == "manifold.xi");
  }
  SUBCASE("overrides") {
    Json doc = Json::parse(R"({"profile": {"kind": "log", "params": {"c": 1}}, "grid": {"t_values": [1, 2]}})");
    apply_override(doc, "profile.params.c=2.5");
    apply_override(doc, "grid.t_values.1=3");
    apply_override(doc, "grid.t_values.2=4");
    apply_override(doc, "n=2");
    apply_override(doc, "output.format=csv");
    CHECK(doc["profile"]["params"]["c"] == 2.5);
    CHECK(doc["grid"]["t_values"] == Json::parse("[1, 3, 4]"));
    CHECK(doc["n"] == 2);
    CHECK(doc["output"]["format"] == "csv");
    CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "grid.t_values.9=1"), ConfigError);
  }
  SUBCASE("missing and malformed files") {
    CHECK_THROWS_AS(load_config_document(scratch("does_not_exist.json").string()), IoError);
    const auto p = scratch("malformed.json");
    std::ofstream(p) << "{\"n\": ";
    CHECK_THROWS_AS(load_config_document(p.string()), ConfigError);
  }
}

TEST_CASE("exit codes") {
  SUBCASE("0: every check passes") {
    const auto r = cli({"paper-suite", "--set", "v_sign=-1", "--set", "profile=scaled_log"});
    CHECK(r.code == exit_pass);
    CHECK(r.out.find("all checks passed") != std::string::npos);
    CHECK(r.err.empty());
  }
  SUBCASE("1: failures, with a summary on stderr") {
    const auto r = cli({"paper-suite", "--tol", "1e-300", "--set", "v_sign=-1"});
    CHECK(r.code == exit_failures);
    CHECK(r.err.find("FAIL") != std::string::npos);
  }
  SUBCASE("2: invalid config or usage") {
    CHECK(cli({"paper-suite", "--set", "n=0"}).code == exit_config);
    CHECK(cli({"paper-suite", "--tol", "-1"}).code == exit_config);
    CHECK(cli({"paper-suite", "--point", "1,1"}).code == exit_config);
    CHECK(cli({"frobnicate"}).code == exit_config);
    CHECK(cli({}).code == exit_config);
    const auto cfg = write_config("bad.json", Json::parse(R"({"grid": {"size": "many"}})"));
    const auto r = cli({"run", "--config", cfg.string()});
    CHECK(r.code == exit_config);
    CHECK(r.err.find("grid.size") != std::string::npos);
  }
  SUBCASE("3: unreadable config or unwritable report") {
    CHECK(cli({"run", "--config", scratch("missing.json").string()}).code == exit_io);
    CHECK(cli({"verify-structure", "--set", "output.path=/nonexistent_dir/x/report.json"}).code == exit_io);
  }
  SUBCASE("help and version") {
    const auto v = cli({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find(engine_version) != std::string::npos);
    CHECK(cli({"--help"}).code == 0);
  }
}

TEST_CASE("reports") {
  const Json doc = Json::parse(R"({"n": 1, "profile": "linear", "v_sign": -1, "grid": {"size": 9}})");
  const auto cfg = write_config("linear.json", doc);
  SUBCASE("two runs are byte-identical, and JSON round-trips through the writer") {
    const auto a = cli({"paper-suite", "--config", cfg.string(), "--json"});
    const auto b = cli({"paper-suite", "--config", cfg.string(), "--json"});
    REQUIRE(a.code == exit_pass);
    CHECK(a.out == b.out);
    const Json parsed = Json::parse(a.out);
    CHECK(write_json(parsed) == a.out);
    CHECK(parsed["engine_version"] == engine_version);
    CHECK(parsed["pass"] == true);
    CHECK(parsed["provenance"]["config"] == doc);
    CHECK(parsed["provenance"]["subcommand"] == "paper-suite");
    CHECK(parsed["records"].size() == 9 * 15 + 1);
  }
  SUBCASE("file outputs in each format") {
    for (const char* fmt : {"json", "csv", "text"}) {
      const auto out = scratch(std::string("report.") + fmt);
      fs::remove(out);
      const auto r = cli({"soliton-fit", "--config", cfg.string(), "--set", std::string("output.format=") + fmt,
                          "--set", "output.path=" + out.string()});
      CHECK(r.code == exit_pass);
      REQUIRE(fs::exists(out));
      const std::string body = slurp(out);
      if (std::string(fmt) == "csv") {
        const Json rep = Json::parse(cli({"soliton-fit", "--config", cfg.string(), "--json"}).out);
        CHECK(static_cast<std::size_t>(std::count(body.begin(), body.end(), '\n')) == rep["records"].size() + 1);
        CHECK(body.rfind("check,point_index,point,residual,tolerance,pass,notes\n", 0) == 0);
      } else if (std::string(fmt) == "json") {
        CHECK(Json::parse(body)["pass"] == true);
      } else {
        CHECK(body.find("soliton_forge") == 0);
      }
    }
  }
  SUBCASE("subcommands run their own check lists") {
    const Json rep = Json::parse(cli({"verify-structure", "--config", cfg.string(), "--json"}).out);
    std::vector<std::string> names;
    for (const auto& s : rep["summary"]) names.push_back(s["check"]);
    CHECK(names == std::vector<std::string>{"structure", "class_flags", "lee_forms", "f_identities"});
  }
}

TEST_CASE("log profile: non-regular at every grid point") {
  const auto r = cli({"classify", "--set", "profile=log", "--json"});
  const Json rep = Json::parse(r.out);
  int seen = 0;
  for (const auto& rec : rep["records"])
    if (rec["check"] == "regularity") {
      ++seen;
      CHECK(value_of(rec, "is_regular") == 0.0);
      CHECK(std::abs(value_of(rec, "kdfxi_plus_f2")) <= 1e-6);
      CHECK(rec["notes"][0] == "non-regular");
    }
  CHECK(seen == 27);
}

TEST_CASE("single point") {
  const auto r = cli({"soliton-fit", "--point", "1,1,1", "--json"});
  const Json rep = Json::parse(r.out);
  for (const auto& rec : rep["records"]) {
    if (rec["point_index"] == -1) continue;
    CHECK(rec["point"] == Json::parse("[1, 1, 1]"));
    if (rec["check"] == "soliton_fit") CHECK(value_of(rec, "lambda") == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(rep["provenance"]["point"] == Json::parse("[1.0, 1.0, 1.0]"));
}

TEST_CASE("user-defined structure from component expressions") {
  Json doc = Json::object();
  doc["manifold"] = hand_manifold();
  doc["grid"] = Json::parse(R"({"size": 9})");
  const auto subject = build_subject(parse_config(doc));
  CHECK_FALSE(subject.example.has_value());
  CHECK(subject.grid.size() == 9);

  const Json mine = Json::parse(cli({"run", "--config", write_config("hand.json", doc).string(), "--set",
                                     "checks=[\"structure\", \"einstein_like_fit\", \"regularity\", \"thm22\"]",
                                     "--json"})
                                    .out);
  const Json ref = Json::parse(
      cli({"run", "--set", "profile=log", "--set", "grid.size=9", "--set",
           "checks=[\"structure\", \"einstein_like_fit\", \"regularity\", \"thm22\"]", "--json"})
          .out);
  REQUIRE(mine["records"].size() == ref["records"].size());
  for (std::size_t i = 0; i < mine["records"].size(); ++i) {
    const auto& a = mine["records"][i];
    const auto& b = ref["records"][i];
    CHECK(a["check"] == b["check"]);
    CHECK(a["point"] == b["point"]);
    if (a["check"] == "einstein_like_fit")
      for (const char* v : {"a", "b", "c"}) CHECK(value_of(a, v) == doctest::Approx(value_of(b, v)).epsilon(1e-10));
    if (a["check"] == "regularity") CHECK(a["notes"][0] == "non-regular");
    if (a["check"] == "structure" || a["check"] == "thm22") CHECK(a["pass"] == true);
  }
  CHECK(cli({"run", "--config", write_config("hand2.json", doc).string(), "--set", "checks=curvature_oracle"}).code ==
        exit_config);
}

TEST_CASE("thread cap from the environment") {
  ::setenv("SOLITON_FORGE_THREADS", "1", 1);
  CHECK(thread_cap_from_env() == 1);
  const auto one = cli({"paper-suite", "--set", "v_sign=-1", "--json"});
  ::setenv("SOLITON_FORGE_THREADS", "3", 1);
  const auto three = cli({"paper-suite", "--set", "v_sign=-1", "--json"});
  CHECK(one.out == three.out);
  ::setenv("SOLITON_FORGE_THREADS", "lots", 1);
  CHECK_THROWS_AS(thread_cap_from_env(), ConfigError);
  CHECK(cli({"paper-suite"}).code == exit_config);
  ::unsetenv("SOLITON_FORGE_THREADS");
  CHECK(thread_cap_from_env() == 0);
}
