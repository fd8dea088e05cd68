#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "fracvi/grid.hpp"
#include "fracvi/riesz.hpp"

namespace fracvi {

/// One side-by-side inequality: passed iff lhs <= rhs (1 + slack).
struct EstimateCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool passed = false;
  std::string context;

  double margin() const { return rhs - lhs; }
  static EstimateCheck make(std::string name, double lhs, double rhs, double slack = 0.0, std::string context = {});
  /// A boolean property with no natural two-sided form; lhs = 0, rhs = 1 on pass.
  static EstimateCheck condition(std::string name, bool ok, std::string context = {});
};

struct ConvergenceStudy {
  std::string name;
  std::string parameter_name;
  std::vector<double> parameters;
  std::vector<double> errors;
  double slope = 0.0;
  bool monotone = false;
  bool degenerate = false;
  std::vector<EstimateCheck> checks;

  bool passed() const;
};

/// Least-squares slope of log(error) against log(parameter) over the entries
/// with positive error.
double loglog_slope(const std::vector<double>& parameters, const std::vector<double>& errors);

struct LevelRecord {
  double eps = 0.0;
  int outer_iterations = 0;
  int krylov_iterations = 0;
  double h_sigma = 0.0;
  double energy = 0.0;
  /// sup (|D^sigma u| - g)^+
  double violation_sup = 0.0;
  /// measure of { |D^sigma u|^2 - g^2 > sqrt(eps) }
  double bad_set_measure = 0.0;
  double multiplier_l1 = 0.0;
  double complementarity = 0.0;
  double complementarity_abs = 0.0;
  double equation_residual = 0.0;
  /// int kappa D^sigma u . D^sigma v_i for the test panel.
  std::vector<double> pairings;
  /// int kappa v_i for the test panel.
  std::vector<double> multiplier_pairings;
};

struct SolveReport {
  std::string solver;
  double sigma = 1.0;
  ScalarField u;
  ScalarField lambda_eps;
  ScalarField gamma;
  VectorField grad_u;
  VectorField Lambda;

  NormSuite u_norms;
  NormSuite lambda_norms;
  NormSuite gamma_norms;
  double Lambda_l1 = 0.0;
  double constraint_violation_sup = 0.0;
  /// int lambda (g - |D^sigma u|), signed; nonpositive for penalty multipliers.
  double complementarity_residual = 0.0;
  /// int lambda |g - |D^sigma u||
  double complementarity_abs = 0.0;
  /// ||L u - F|| / ||F|| of the final (penalized) equation.
  double energy_residual = 0.0;
  double energy = 0.0;
  double gamma_residual = 0.0;
  double eps_final = 0.0;
  int total_iterations = 0;
  int total_krylov_iterations = 0;
  std::vector<LevelRecord> levels;
  double wall_time = 0.0;
  bool converged = false;

  double c_star = 0.0;
  double c_sigma = 0.0;
  double f_sharp_norm = 0.0;  // in L^{2#}
  double f_vec_l1 = 0.0;
  double f_vec_l2 = 0.0;
  double g_star = 0.0;
  double g_upper = 0.0;
  double a_star = 0.0;
  double a_upper = 0.0;
  std::vector<EstimateCheck> checks;
  std::uint64_t seed = 0;
};

/// Ordered key = value view of every scalar in a report; wall_time is the one
/// nondeterministic entry.
std::vector<std::pair<std::string, std::string>> report_scalars(const SolveReport& report);
std::vector<std::pair<std::string, std::string>> study_scalars(const ConvergenceStudy& study);
std::vector<std::pair<std::string, std::string>> check_scalars(const EstimateCheck& check, const std::string& prefix);

/// 17 significant digits.
std::string format_number(double value);

/// Writes <stem>_u.fvif etc. plus <stem>.report into dir; returns the report path.
std::filesystem::path write_report(const std::filesystem::path& dir, const std::string& stem,
                                   const SolveReport& report);
/// Writes <stem>.report and <stem>.dat (parameter, error).
std::filesystem::path write_study(const std::filesystem::path& dir, const std::string& stem,
                                  const ConvergenceStudy& study);

}  // namespace fracvi
