#pragma once

// Run configuration: a JSON document, optional `key=value` overrides, and
// the subject (manifold + grid) it describes.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "soliton_forge/errors.hpp"
#include "soliton_forge/suite.hpp"

namespace sforge {

/// Invalid configuration. `path` names the offending field, e.g. "grid.t_values[2]".
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Unreadable config or unwritable report.
class IoError : public Error {
 public:
  using Error::Error;
};

struct ProfileConfig {
  std::string kind = "scaled_log";  // log | scaled_log | linear | exp | custom
  double c = 1.0;                   // log
  double alpha = 1.0;               // linear
  double q = 1.0;                   // exp
  std::string expression;           // custom, in t
  bool positive_t = false;          // custom
};

struct GridConfig {
  std::vector<double> coordinate_values;
  std::vector<double> t_values;
  int size = 27;
  std::vector<std::vector<double>> points;  // explicit points replace the product grid
};

/// Component expressions of a user-defined structure. phi[a][b] is phi^a_b.
struct ExpressionManifold {
  std::vector<std::string> coordinates;
  std::vector<std::vector<std::string>> metric;
  std::vector<std::vector<std::string>> phi;
  std::vector<std::string> xi;
  std::vector<std::string> eta;
  std::vector<std::string> nonzero;   // coordinates that must not vanish
  std::vector<std::string> positive;  // coordinates that must be > 0
};

struct OutputConfig {
  std::string path;  // empty: no file
  std::string format = "json";
};

struct RunConfig {
  int n = 1;
  double k = 1.0;
  int v_sign = 1;
  ProfileConfig profile;
  GridConfig grid;
  Tolerances tolerances;
  std::vector<std::string> checks{"paper_suite"};
  OutputConfig output;
  std::optional<ExpressionManifold> manifold;
};

using Json = nlohmann::ordered_json;

/// Validates and converts. Throws ConfigError naming the field.
RunConfig parse_config(const Json& doc);

/// Reads and parses a JSON file. IoError if unreadable, ConfigError if malformed.
Json load_config_document(const std::string& path);

/// Applies `dotted.path=value` in place. The value is read as JSON when it
/// parses, else as a string. Array elements are addressed by index.
void apply_override(Json& doc, const std::string& assignment);

/// Builds the manifold and grid the config describes.
SuiteSubject build_subject(const RunConfig& config);

/// Resolves "paper_suite" and validates names against the subject.
std::vector<std::string> resolve_checks(const std::vector<std::string>& requested, const SuiteSubject& subject);

}  // namespace sforge
