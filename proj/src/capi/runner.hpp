#pragma once

// Scenario drivers behind the command line: each command reads its options,
// runs the requested parameter sweep and writes summary.csv, meta.json and
// the command-specific artifacts into the output directory.

#include <string>

#include <json.hpp>

namespace cutfem::app {

inline constexpr const char* kVersion = "0.1.0";

struct RunReport {
  int runs = 0;
  int failed = 0;
  std::string message;  // first failure, if any
};

/// Names accepted by run_command.
const char* const* command_names();

/// Runs `command` with `options` (string, number or boolean values keyed by
/// option name without dashes). Throws cutfem::Error for invalid options;
/// failures of individual runs are counted in the report.
RunReport run_command(const std::string& command, const nlohmann::json& options);

}  // namespace cutfem::app
