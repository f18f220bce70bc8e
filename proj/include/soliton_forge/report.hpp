#pragma once

// Serialization of suite reports: JSON (stable key order, 17 significant
// digits), CSV (one row per record) and an aligned text table.

#include <string>

#include "soliton_forge/config.hpp"
#include "soliton_forge/suite.hpp"

namespace sforge {

enum class ReportFormat { json, csv, text };

/// Throws ConfigError for names other than json, csv, text.
ReportFormat parse_format(const std::string& name);

/// The report as a JSON document. Non-finite numbers become null.
Json report_document(const SuiteReport& report);

/// Deterministic writer: two-space indent, scalar arrays on one line,
/// floating point numbers with 17 significant digits.
std::string write_json(const Json& doc);

std::string emit_report(const SuiteReport& report, ReportFormat format);

/// Failing checks with their worst points, for the console.
std::string failure_summary(const SuiteReport& report, int per_check = 3);

/// Writes bytes to path. Throws IoError.
void write_file(const std::string& path, const std::string& bytes);

}  // namespace sforge
