#pragma once

#include "maslov/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace maslov {

enum ExitCode : int { kExitOk = 0, kExitNumerical = 2, kExitConfig = 3 };

/// The system named by a spec, plus its rotational view when it is a builtin rotational system.
struct BuiltSystem {
  IntegrableSystem system;
  std::optional<RotationalSystem> rotational;
};

BuiltSystem build_system(const SystemSpec& spec);

/// Runs one scenario: prints a table to `out`, writes the JSON record (and, for index runs, the
/// phase trace CSV) into out_dir, and returns the exit code. Errors are reported in the record
/// rather than thrown.
int run_scenario(const RunConfig& cfg, const std::string& out_dir, bool verbose, std::ostream& out, std::ostream& err);

/// Record for a run that failed before a configuration existed (unreadable or invalid file).
void write_config_failure(const std::string& out_dir, const std::string& scenario, const std::string& config_path,
                          const std::string& message);

}  // namespace maslov
