#include "fracvi/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "fracvi/constants.hpp"
#include "fracvi/errors.hpp"
#include "fracvi/field_io.hpp"
#include "fracvi/local_ref.hpp"
#include "fracvi/primal_dual.hpp"
#include "fracvi/problem_file.hpp"
#include "fracvi/verify.hpp"

namespace fracvi {

namespace {

const std::vector<std::pair<std::string, Command>>& command_names() {
  static const std::vector<std::pair<std::string, Command>> names = {
      {"solve", Command::solve},
      {"solve-local", Command::solve_local},
      {"verify-estimates", Command::verify_estimates},
      {"study-sigma", Command::study_sigma},
      {"study-epsilon", Command::study_epsilon},
      {"study-identity", Command::study_identity},
      {"cross-check", Command::cross_check},
  };
  return names;
}

using Entries = std::vector<std::pair<std::string, std::string>>;

// Collects checks and emitted files while a command runs.
struct Session {
  std::filesystem::path out;
  std::vector<EstimateCheck> checks;
  std::vector<std::string> files;
  Entries extra;

  void add_report(const std::string& stem, const SolveReport& r) {
    write_report(out, stem, r);
    files.push_back(stem + ".report");
    for (const char* f : {"u", "lambda", "gamma", "Lambda"}) files.push_back(stem + "_" + f + ".fvif");
    for (const auto& c : r.checks) add_check(c, stem);
  }
  void add_study(const std::string& stem, const ConvergenceStudy& s) {
    write_study(out, stem, s);
    files.push_back(stem + ".report");
    files.push_back(stem + ".dat");
    for (const auto& c : s.checks) add_check(c, stem);
  }
  void add_check(EstimateCheck c, const std::string& scope) {
    c.name = scope + "." + c.name;
    checks.push_back(std::move(c));
  }
  void add_field(const std::string& name, const ScalarField& f) {
    io::write_field(out / name, f);
    files.push_back(name);
  }
  void value(const std::string& key, double v) { extra.emplace_back(key, format_number(v)); }
};

VerifyOptions verify_options(const ProblemFile& pf, std::uint64_t seed, bool corrupt) {
  VerifyOptions o;
  o.schedule = pf.schedule;
  o.seed = seed;
  o.corrupt_penalty = corrupt;
  return o;
}

PenalizedOptions penalized_options(std::uint64_t seed, bool corrupt) {
  PenalizedOptions o;
  o.seed = seed;
  o.corrupt_penalty = corrupt;
  return o;
}

void closed_form_comparison(Session& s, const ProblemFile& pf, const SolveReport& r) {
  if (!pf.reference) return;
  const Grid& grid = pf.spec.grid;
  ScalarField exact = exact_local(*pf.reference, grid);
  s.value("closed_form.u_linf_error", linf_norm(r.u - exact));
  s.value("closed_form.u_l2_relative_error", l2_norm(r.u - exact) / l2_norm(exact));
  s.value("closed_form.lambda_l1_error", l1_norm(r.lambda_eps - exact_local_multiplier(*pf.reference, grid)));
  s.add_field("closed_form_u.fvif", exact);
}

SolveReport solve_with_method(const ProblemFile& pf, std::uint64_t seed, bool corrupt) {
  if (pf.method == SolveMethod::primal_dual) {
    PrimalDualConfig cfg = pf.primal_dual;
    cfg.seed = seed;
    SolveReport r = solve_primal_dual(pf.spec, cfg);
    r.checks.push_back(EstimateCheck::make("complementarity", r.complementarity_abs,
                                           1e-5 * r.lambda_norms.l1 * r.g_upper));
    return r;
  }
  return solve_penalized(pf.spec, pf.schedule, penalized_options(seed, corrupt));
}

void cmd_solve(Session& s, const ProblemFile& pf, std::uint64_t seed, bool corrupt) {
  SolveReport r = solve_with_method(pf, seed, corrupt);
  s.add_report("solve", r);
  closed_form_comparison(s, pf, r);
}

void cmd_solve_local(Session& s, const ProblemFile& pf, std::uint64_t seed, bool corrupt) {
  ProblemSpec spec = with_sigma(pf.spec, 1.0);
  SolveReport r = solve_local(spec, pf.schedule, penalized_options(seed, corrupt));
  s.add_report("solve_local", r);
  if (pf.reference) s.value("closed_form.slope_excess", slope_excess(r.u, spec.mask, pf.reference->g0));
  closed_form_comparison(s, pf, r);
}

void cmd_verify(Session& s, const ProblemFile& pf, std::uint64_t seed, bool corrupt) {
  const ProblemSpec& spec = pf.spec;
  const double sigma = spec.sigma;
  VerifyOptions opts = verify_options(pf, seed, corrupt);
  SolveReport r = solve_penalized(spec, pf.schedule, penalized_options(seed, corrupt));
  s.add_report("solve", r);

  for (const auto& c : check_multiplier_bounds(r, spec, seed)) s.add_check(c, "multipliers");
  s.add_check(check_discrete_vi(spec, r.u, seed), "vi");
  for (const auto& c : check_holder_charges(r.lambda_eps, seed)) s.add_check(c, "charges");
  s.add_check(check_uniqueness(spec, r, opts), "uniqueness");

  double p = l1_data_exponent(spec.grid.dim(), sigma);
  SobolevCheck sob = check_sobolev(spec.mask, sigma, p, seed);
  s.add_check(sob.check, "sobolev");
  // the estimates use the measured maximum times the safety factor
  s.add_check(EstimateCheck::make("solution_ratio", interpolation_ratio(r.u, sigma, p), kConstantSafety * sob.c_p),
              "sobolev");

  // f_sharp perturbed on Omega when present, the vector source otherwise
  ScalarField d_sharp(spec.grid);
  VectorField d_vec(spec.grid);
  if (spec.data.has_f_sharp()) {
    d_sharp = indicator_field(spec.mask);
    d_sharp *= 0.1;
  } else {
    ScalarField bump = indicator_field(spec.mask);
    bump *= 0.1;
    d_vec.component_data(0) = bump.data();
  }
  DataStabilityResult ds = check_data_stability(spec, d_sharp, d_vec, opts);
  s.add_check(ds.sobolev_form, "data");
  s.add_check(ds.l1_form, "data");
  s.add_check(ds.gamma_form, "data");
  s.value("data.c_star", ds.c_star);
  s.value("data.c_p", ds.c_p);
  s.value("data.p", ds.p);
  s.value("data.a_p", ds.a_p);
  s.value("data.b_1", ds.b_1);

  GStabilityResult gs = check_g_stability(spec, opts);
  s.add_study("g_stability", gs.study);
  s.extra.emplace_back("g_stability.inactive", gs.inactive ? "true" : "false");

  ConvergenceStudy eps = epsilon_decay_from(r, spec);
  s.add_study("epsilon_decay", eps);

  std::vector<double> gaps = potential_pairing_gaps(r, spec);
  for (std::size_t l = 0; l < gaps.size(); ++l) s.value("potential_gap." + std::to_string(l), gaps[l]);
}

void cmd_study_sigma(Session& s, const ProblemFile& pf, std::uint64_t seed, bool corrupt) {
  SigmaStudyResult res = study_sigma_limit(pf.spec, verify_options(pf, seed, corrupt), pf.sigma_ladder, pf.sigma_tol);
  s.add_study("sigma_l2", res.l2);
  s.add_study("sigma_h_half", res.h_half);
  s.add_report("sigma_local", res.local);
  for (std::size_t k = 0; k < res.reports.size(); ++k)
    s.add_report("sigma_" + std::to_string(k), res.reports[k]);
  for (std::size_t k = 0; k < res.successive_differences.size(); ++k)
    s.value("panel_difference." + std::to_string(k), res.successive_differences[k]);
  if (pf.reference) {
    ScalarField exact = exact_local(*pf.reference, pf.spec.grid);
    s.value("closed_form.local_l2_relative_error", l2_norm(res.local.u - exact) / l2_norm(exact));
    const SolveReport& last = res.reports.back();
    s.value("closed_form.last_sigma_l2_relative_error", l2_norm(last.u - exact) / l2_norm(exact));
  }
}

void cmd_study_epsilon(Session& s, const ProblemFile& pf, std::uint64_t seed, bool corrupt) {
  SolveReport r = solve_penalized(pf.spec, pf.schedule, penalized_options(seed, corrupt));
  s.add_report("solve", r);
  s.add_study("epsilon_decay", epsilon_decay_from(r, pf.spec));
}

void cmd_study_identity(Session& s, const ProblemFile& pf) {
  IdentityStudyResult res = study_identity_approx(pf.spec.grid);
  s.add_study("identity_riesz", res.riesz);
  s.add_study("identity_gradient", res.gradient);
}

void cmd_cross_check(Session& s, const ProblemFile& pf, std::uint64_t seed, bool corrupt) {
  PrimalDualConfig cfg = pf.primal_dual;
  cfg.seed = seed;
  const ProblemSpec& spec = pf.spec;
  std::vector<std::function<SolveReport()>> jobs = {
      [&] { return solve_penalized(spec, pf.schedule, penalized_options(seed, corrupt)); },
      [&] { return solve_primal_dual(spec, cfg); }};
  auto reports = run_parallel(jobs);
  s.add_report("penalized", reports[0]);
  s.add_report("primal_dual", reports[1]);
  s.add_check(check_cross_solver(reports[0], reports[1], spec.sigma, pf.cross_tol), "cross");
}

void write_summary(const Session& s, const RunConfig& config, std::uint64_t seed, int code,
                   const std::string& status, const std::vector<std::filesystem::path>& inputs) {
  std::filesystem::create_directories(config.out);
  std::ofstream out(config.out / "summary.report");
  if (!out) throw Error("cannot write summary.report");
  out << "command = " << to_string(config.command) << "\n";
  out << "problem = " << config.problem.string() << "\n";
  out << "seed = " << seed << "\n";
  out << "status = " << status << "\n";
  out << "exit_code = " << code << "\n";
  for (const auto& o : config.overrides) out << "override = " << o << "\n";
  for (std::size_t i = 0; i < inputs.size(); ++i) out << "input." << i << " = " << inputs[i].string() << "\n";
  for (const auto& [k, v] : s.extra) out << k << " = " << v << "\n";
  for (const auto& c : s.checks)
    for (const auto& [k, v] : check_scalars(c, "check." + c.name)) out << k << " = " << v << "\n";
  std::set<std::string> seen;
  std::size_t idx = 0;
  for (const auto& f : s.files)
    if (seen.insert(f).second) out << "file." << idx++ << " = " << f << "\n";
}

}  // namespace

Command parse_command(const std::string& name) {
  for (const auto& [n, c] : command_names())
    if (n == name) return c;
  throw ValidationError("unknown command '" + name + "'");
}

std::string to_string(Command c) {
  for (const auto& [n, cmd] : command_names())
    if (cmd == c) return n;
  return "unknown";
}

int run(const RunConfig& config, std::ostream& log) {
  const std::uint64_t seed = config.seed.value_or(1);
  Session session;
  session.out = config.out;
  int code = kExitOk;
  std::string status = "ok";
  std::vector<std::filesystem::path> inputs;
  try {
    if (config.out.empty()) throw ValidationError("an output directory is required");
    if (!std::filesystem::exists(config.problem))
      throw ValidationError("problem file does not exist: " + config.problem.string());
    std::filesystem::create_directories(config.out);
    ProblemFile pf = parse_problem(config.problem, config.overrides);
    inputs = pf.inputs;
    inputs.insert(inputs.begin(), config.problem);
    switch (config.command) {
      case Command::solve: cmd_solve(session, pf, seed, config.corrupt_penalty); break;
      case Command::solve_local: cmd_solve_local(session, pf, seed, config.corrupt_penalty); break;
      case Command::verify_estimates: cmd_verify(session, pf, seed, config.corrupt_penalty); break;
      case Command::study_sigma: cmd_study_sigma(session, pf, seed, config.corrupt_penalty); break;
      case Command::study_epsilon: cmd_study_epsilon(session, pf, seed, config.corrupt_penalty); break;
      case Command::study_identity: cmd_study_identity(session, pf); break;
      case Command::cross_check: cmd_cross_check(session, pf, seed, config.corrupt_penalty); break;
    }
    for (const auto& c : session.checks) {
      log << c.name << " " << (c.passed ? "PASS" : "FAIL") << " margin=" << format_number(c.margin()) << "\n";
      if (!c.passed) code = kExitCheckFailed;
    }
    if (code == kExitCheckFailed) status = "check_failed";
  } catch (const NonConvergence& e) {
    log << "error: " << e.what() << "\n";
    code = kExitNonConvergence;
    status = "nonconvergence";
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: " << e.what() << "\n";
    code = kExitConfig;
    status = "config_error";
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    code = kExitConfig;
    status = "config_error";
  }
  if (!config.out.empty()) {
    try {
      write_summary(session, config, seed, code, status, inputs);
    } catch (const std::exception& e) {
      log << "error: " << e.what() << "\n";
      if (code == kExitOk) code = kExitConfig;
    }
  }
  log << "status " << status << " exit " << code << "\n";
  return code;
}

}  // namespace fracvi
