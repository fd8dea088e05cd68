#include "fracvi/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "fracvi/errors.hpp"
#include "fracvi/field_io.hpp"

namespace fracvi {

EstimateCheck EstimateCheck::make(std::string name, double lhs, double rhs, double slack, std::string context) {
  EstimateCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = slack;
  c.context = std::move(context);
  c.passed = std::isfinite(lhs) && std::isfinite(rhs) && lhs <= rhs * (1.0 + slack);
  return c;
}

EstimateCheck EstimateCheck::condition(std::string name, bool ok, std::string context) {
  EstimateCheck c;
  c.name = std::move(name);
  c.lhs = ok ? 0.0 : 1.0;
  c.rhs = ok ? 1.0 : 0.0;
  c.passed = ok;
  c.context = std::move(context);
  return c;
}

bool ConvergenceStudy::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

double loglog_slope(const std::vector<double>& parameters, const std::vector<double>& errors) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < parameters.size() && i < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || !(parameters[i] > 0.0)) continue;
    double x = std::log(parameters[i]), y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return 0.0;
  double denom = m * sxx - sx * sx;
  return denom != 0.0 ? (m * sxy - sx * sy) / denom : 0.0;
}

std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

using Entries = std::vector<std::pair<std::string, std::string>>;

void add(Entries& e, const std::string& key, double v) { e.emplace_back(key, format_number(v)); }
void add(Entries& e, const std::string& key, const std::string& v) { e.emplace_back(key, v); }

void add_norms(Entries& e, const std::string& prefix, const NormSuite& n) {
  add(e, prefix + ".l1", n.l1);
  add(e, prefix + ".l2", n.l2);
  add(e, prefix + ".linf", n.linf);
  add(e, prefix + ".h_sigma", n.h_sigma);
}

void write_entries(const std::filesystem::path& path, const Entries& entries) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& [k, v] : entries) out << k << " = " << v << "\n";
}

}  // namespace

Entries check_scalars(const EstimateCheck& c, const std::string& prefix) {
  Entries e;
  add(e, prefix + ".lhs", c.lhs);
  add(e, prefix + ".rhs", c.rhs);
  add(e, prefix + ".margin", c.margin());
  add(e, prefix + ".slack", c.slack);
  add(e, prefix + ".passed", std::string(c.passed ? "true" : "false"));
  if (!c.context.empty()) add(e, prefix + ".context", c.context);
  return e;
}

Entries report_scalars(const SolveReport& r) {
  Entries e;
  add(e, "solver", r.solver);
  add(e, "sigma", r.sigma);
  add(e, "seed", std::to_string(r.seed));
  add(e, "converged", std::string(r.converged ? "true" : "false"));
  add(e, "eps_final", r.eps_final);
  add_norms(e, "u", r.u_norms);
  add_norms(e, "lambda", r.lambda_norms);
  add_norms(e, "gamma", r.gamma_norms);
  add(e, "Lambda.l1", r.Lambda_l1);
  add(e, "constraint_violation_sup", r.constraint_violation_sup);
  add(e, "complementarity_residual", r.complementarity_residual);
  add(e, "complementarity_abs", r.complementarity_abs);
  add(e, "energy_residual", r.energy_residual);
  add(e, "energy", r.energy);
  add(e, "gamma_residual", r.gamma_residual);
  add(e, "total_iterations", static_cast<double>(r.total_iterations));
  add(e, "total_krylov_iterations", static_cast<double>(r.total_krylov_iterations));
  add(e, "c_star", r.c_star);
  add(e, "c_sigma", r.c_sigma);
  add(e, "f_sharp_norm", r.f_sharp_norm);
  add(e, "f_vec_l1", r.f_vec_l1);
  add(e, "f_vec_l2", r.f_vec_l2);
  add(e, "g_star", r.g_star);
  add(e, "g_upper", r.g_upper);
  add(e, "a_star", r.a_star);
  add(e, "a_upper", r.a_upper);
  for (std::size_t l = 0; l < r.levels.size(); ++l) {
    const auto& lv = r.levels[l];
    std::string p = "level." + std::to_string(l);
    add(e, p + ".eps", lv.eps);
    add(e, p + ".outer_iterations", static_cast<double>(lv.outer_iterations));
    add(e, p + ".krylov_iterations", static_cast<double>(lv.krylov_iterations));
    add(e, p + ".h_sigma", lv.h_sigma);
    add(e, p + ".energy", lv.energy);
    add(e, p + ".violation_sup", lv.violation_sup);
    add(e, p + ".bad_set_measure", lv.bad_set_measure);
    add(e, p + ".multiplier_l1", lv.multiplier_l1);
    add(e, p + ".complementarity", lv.complementarity);
    add(e, p + ".complementarity_abs", lv.complementarity_abs);
    add(e, p + ".equation_residual", lv.equation_residual);
    for (std::size_t k = 0; k < lv.pairings.size(); ++k) add(e, p + ".pairing." + std::to_string(k), lv.pairings[k]);
    for (std::size_t k = 0; k < lv.multiplier_pairings.size(); ++k)
      add(e, p + ".multiplier_pairing." + std::to_string(k), lv.multiplier_pairings[k]);
  }
  for (const auto& c : r.checks) {
    auto ce = check_scalars(c, "check." + c.name);
    e.insert(e.end(), ce.begin(), ce.end());
  }
  add(e, "wall_time", r.wall_time);
  return e;
}

Entries study_scalars(const ConvergenceStudy& s) {
  Entries e;
  add(e, "study", s.name);
  add(e, "parameter", s.parameter_name);
  for (std::size_t i = 0; i < s.parameters.size(); ++i) {
    add(e, "value." + std::to_string(i) + ".parameter", s.parameters[i]);
    add(e, "value." + std::to_string(i) + ".error", s.errors[i]);
  }
  add(e, "slope", s.slope);
  add(e, "monotone", std::string(s.monotone ? "true" : "false"));
  add(e, "degenerate", std::string(s.degenerate ? "true" : "false"));
  for (const auto& c : s.checks) {
    auto ce = check_scalars(c, "check." + c.name);
    e.insert(e.end(), ce.begin(), ce.end());
  }
  return e;
}

std::filesystem::path write_report(const std::filesystem::path& dir, const std::string& stem,
                                   const SolveReport& report) {
  std::filesystem::create_directories(dir);
  Entries e = report_scalars(report);
  auto write = [&](const std::string& name, const auto& field) {
    std::string file = stem + "_" + name + ".fvif";
    io::write_field(dir / file, field);
    e.emplace_back("file." + name, file);
  };
  write("u", report.u);
  write("lambda", report.lambda_eps);
  write("gamma", report.gamma);
  write("Lambda", report.Lambda);
  auto path = dir / (stem + ".report");
  write_entries(path, e);
  return path;
}

std::filesystem::path write_study(const std::filesystem::path& dir, const std::string& stem,
                                  const ConvergenceStudy& study) {
  std::filesystem::create_directories(dir);
  Entries e = study_scalars(study);
  std::string dat = stem + ".dat";
  {
    std::ofstream out(dir / dat);
    if (!out) throw Error("cannot write " + (dir / dat).string());
    out << "# " << study.parameter_name << " error\n";
    for (std::size_t i = 0; i < study.parameters.size(); ++i)
      out << format_number(study.parameters[i]) << " " << format_number(study.errors[i]) << "\n";
  }
  e.emplace_back("file.plot_data", dat);
  auto path = dir / (stem + ".report");
  write_entries(path, e);
  return path;
}

}  // namespace fracvi
