#pragma once

// Command-line front end. Subcommands are `run` with a preset check list.

#include <iosfwd>
#include <string>
#include <vector>

#include "soliton_forge/config.hpp"
#include "soliton_forge/suite.hpp"

namespace sforge {

enum ExitCode : int { exit_pass = 0, exit_failures = 1, exit_config = 2, exit_io = 3 };

/// Subcommand names, `run` first.
const std::vector<std::string>& subcommand_names();

/// Checks a subcommand runs; {"paper_suite"} for paper-suite, empty for run
/// (use the config's list).
std::vector<std::string> subcommand_checks(const std::string& subcommand);

/// Builds the subject and runs the checks. `checks` empty: the config's own
/// list. Checks a preset names but the subject cannot support are dropped.
/// `provenance` is stored verbatim as the report's config echo.
SuiteReport run(const RunConfig& config, const std::vector<std::string>& checks = {}, int threads = 0,
                const std::string& provenance = "");

/// Parallelism cap from SOLITON_FORGE_THREADS; 0 when unset.
int thread_cap_from_env();

/// Full command line, argv[0] included. Returns an ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sforge
