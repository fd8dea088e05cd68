#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fracvi {

enum class Command { solve, solve_local, verify_estimates, study_sigma, study_epsilon, study_identity, cross_check };

/// Parses a command name such as "study-sigma"; throws ValidationError.
Command parse_command(const std::string& name);
std::string to_string(Command c);

struct RunConfig {
  std::filesystem::path problem;
  Command command = Command::solve;
  std::filesystem::path out;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  /// Test hook for negative controls: k_eps + 1 everywhere.
  bool corrupt_penalty = false;
};

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNonConvergence = 2, kExitCheckFailed = 3 };

/// Runs one command: writes its artifacts and summary.report into config.out
/// and prints one line per check to log.
int run(const RunConfig& config, std::ostream& log);

}  // namespace fracvi
