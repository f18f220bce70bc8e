#pragma once

// Grid sweeps over a manifold: every per-point check plus the grid-level
// parallel-tensor check, aggregated in a fixed order.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "soliton_forge/example_manifold.hpp"
#include "soliton_forge/manifold.hpp"

namespace sforge {

inline constexpr const char* engine_version = "0.1.0";

struct Tolerances {
  double jet_exact = 1e-8;
  double refit_derivative = 1e-6;
  double structure = 1e-10;
};

/// Check names in report order.
const std::vector<std::string>& all_check_names();
bool is_check_name(const std::string& name);

struct CheckRecord {
  std::string check;
  int point_index = -1;  // -1 for grid-level records
  std::vector<double> point;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::string> notes;
};

struct CheckSummary {
  std::string check;
  int count = 0;
  int passed = 0;
  int failed = 0;
  double worst_residual = 0.0;
  double tolerance = 0.0;
};

struct SuiteReport {
  std::vector<CheckRecord> records;
  std::vector<CheckSummary> summary;
  std::string config_json;  // echo of the input, verbatim
  std::string engine_version = sforge::engine_version;

  bool all_pass() const;
  const CheckSummary* find(const std::string& check) const;
};

/// What a sweep runs on. `example` enables the closed-form comparisons.
struct SuiteSubject {
  ManifoldSpec manifold;
  std::optional<ManifoldSpec> base;
  double k = 1.0;
  std::optional<ExampleManifold> example;
  std::vector<Point> grid;
};

SuiteSubject subject_from_example(const ExampleManifold& e, std::vector<Point> grid);

struct SuiteOptions {
  Tolerances tolerances;
  std::vector<std::string> checks;  // empty: every applicable check
  int threads = 0;                  // 0: hardware concurrency
};

/// Checks that apply to the subject when none are requested explicitly.
std::vector<std::string> default_checks(const SuiteSubject& s);

/// Runs the checks. Per-point failures, including evaluation errors, are
/// recorded and never abort the sweep. Throws UsageError for checks that
/// cannot apply to the subject.
SuiteReport run_checks(const SuiteSubject& s, const SuiteOptions& options);

/// Every check on the default grid of the example.
SuiteReport paper_suite(const ExampleManifold& e, const Tolerances& tolerances, int grid_size = 27, int threads = 0);

}  // namespace sforge
