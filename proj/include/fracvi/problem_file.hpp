#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracvi/local_ref.hpp"
#include "fracvi/primal_dual.hpp"
#include "fracvi/problem.hpp"

namespace fracvi {

/// One key = value entry with its position in the source text.
struct IniEntry {
  std::string value;
  int line = 0;
  int column = 0;  // column of the value
};

/// section -> key -> entry, keys lower-case.
using IniDocument = std::map<std::string, std::map<std::string, IniEntry>>;

/// Sections in brackets, key = value pairs, ';' or '#' comments.
IniDocument parse_ini(const std::string& text);

/// Keys accepted in each section.
const std::map<std::string, std::vector<std::string>>& problem_file_keys();

/// Applies "key=value" or "section.key=value" overrides; bare keys refer to
/// [solver]. Throws ValidationError for unknown names.
void apply_overrides(IniDocument& doc, const std::vector<std::string>& overrides);

enum class SolveMethod { penalized, primal_dual };

struct ProblemFile {
  ProblemSpec spec;
  PenaltySchedule schedule;
  PrimalDualConfig primal_dual;
  SolveMethod method = SolveMethod::penalized;
  std::vector<double> sigma_ladder = {0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
  double sigma_tol = 5e-2;
  double cross_tol = 5e-3;
  /// Closed-form local solution, when the file asks for one and the data fit.
  std::optional<LocalExactSolution> reference;
  /// Field files the problem reads.
  std::vector<std::filesystem::path> inputs;
};

/// Builds a validated problem; relative file paths resolve against base_dir.
ProblemFile build_problem(const IniDocument& doc, const std::filesystem::path& base_dir);

ProblemFile parse_problem(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
ProblemFile parse_problem_text(const std::string& text, const std::filesystem::path& base_dir = ".",
                               const std::vector<std::string>& overrides = {});

}  // namespace fracvi
