#include "fracvi/verify.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "fracvi/constants.hpp"
#include "fracvi/errors.hpp"
#include "fracvi/local_ref.hpp"
#include "fracvi/random_fields.hpp"

namespace fracvi {

int worker_limit() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("FRACVI_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<int>(std::min<long>(v, 256));
  }
  return hw;
}

ProblemSpec with_data(const ProblemSpec& spec, const ScalarField& f_sharp, const VectorField& f_vec) {
  ProblemSpec out = spec;
  out.data = SourceData(f_sharp, f_vec, spec.mask);
  return out;
}

ProblemSpec with_obstacle(const ProblemSpec& spec, const ScalarField& g) {
  ProblemSpec out = spec;
  out.obstacle = Obstacle(g, spec.obstacle.regime(), spec.mask);
  return out;
}

ProblemSpec with_sigma(const ProblemSpec& spec, double sigma) {
  ProblemSpec out = spec;
  out.sigma = FracOrder(sigma);
  return out;
}

namespace {

PenalizedOptions penalized_options(const VerifyOptions& options, double c_star = 0.0) {
  PenalizedOptions p;
  p.seed = options.seed;
  p.corrupt_penalty = options.corrupt_penalty;
  p.c_star = c_star;
  return p;
}

bool nonincreasing(const std::vector<double>& v, std::size_t from = 0) {
  for (std::size_t i = from + 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) return false;
  return true;
}

bool strictly_decreasing(const std::vector<double>& v, std::size_t from = 0) {
  for (std::size_t i = from + 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

std::string sigma_context(double sigma) { return "sigma=" + format_number(sigma); }

}  // namespace

double relative_h_sigma_distance(const ScalarField& a, const ScalarField& b, double sigma) {
  double ref = h_sigma_norm(a, sigma);
  double diff = h_sigma_norm(a - b, sigma);
  return ref > 0.0 ? diff / ref : diff;
}

// ---------------------------------------------------------------------------

DataStabilityResult check_data_stability(const ProblemSpec& spec, const ScalarField& d_sharp, const VectorField& d_vec,
                                         const VerifyOptions& options) {
  DataStabilityResult out;
  const double sigma = spec.sigma;
  out.c_star = measure_c_star(spec.mask, sigma, options.seed);
  ProblemSpec perturbed = with_data(spec, spec.data.f_sharp() + d_sharp, spec.data.f_vec() + d_vec);
  auto opts = penalized_options(options, out.c_star);
  std::vector<std::function<SolveReport()>> jobs = {
      [&] { return solve_penalized(spec, options.schedule, opts); },
      [&] { return solve_penalized(perturbed, options.schedule, opts); }};
  auto reports = run_parallel(jobs);
  const SolveReport& a = reports[0];
  const SolveReport& b = reports[1];

  const ScalarField ds = masked(d_sharp, spec.mask);
  auto ex = sobolev_exponents(spec.grid.dim(), sigma);
  const double a_star = spec.coeffs.a_star(), a_upper = spec.coeffs.a_upper();
  const double ds_sharp = lp_norm(ds, ex.sharp), ds_l1 = l1_norm(ds);
  const double dv_l2 = l2_norm(d_vec), dv_l1 = l1_norm(d_vec);
  const double lhs = h_sigma_norm(a.u - b.u, sigma);
  const std::string ctx = sigma_context(sigma) + " eps_final=" + format_number(options.schedule.eps_final());

  out.sobolev_form = EstimateCheck::make("data_stability_sobolev", lhs, out.c_star / a_star * ds_sharp + dv_l2 / a_star,
                                         0.0, ctx);

  out.p = l1_data_exponent(spec.grid.dim(), sigma);
  out.c_p = kConstantSafety * measure_c_p_raw(spec.mask, sigma, out.p, options.seed, 200);
  const double g_upper = spec.obstacle.g_upper();
  const double p = out.p;
  out.a_p = std::pow(2.0 * out.c_p * std::pow(2.0 * g_upper, 1.0 - 2.0 / p) / a_star, p / (2.0 * p - 2.0));
  out.b_1 = std::sqrt(4.0 * g_upper / a_star);
  double rhs_l1 = out.a_p * std::pow(ds_l1, p / (2.0 * p - 2.0)) + out.b_1 * std::sqrt(dv_l1);
  out.l1_form = EstimateCheck::make("data_stability_l1", lhs, rhs_l1, 0.0, ctx + " p=" + format_number(p));

  const double factor = 1.0 + a_upper / a_star;
  out.gamma_form = EstimateCheck::make("potential_stability", h_sigma_norm(a.gamma - b.gamma, sigma),
                                       factor * (out.c_star * ds_sharp + dv_l2), 0.0, ctx);
  return out;
}

GStabilityResult check_g_stability(const ProblemSpec& spec, const VerifyOptions& options,
                                   const std::vector<double>& fractions) {
  GStabilityResult out;
  out.study.name = "g_stability";
  out.study.parameter_name = "delta";
  const double sigma = spec.sigma;
  const double c_star = measure_c_star(spec.mask, sigma, options.seed);
  auto opts = penalized_options(options, c_star);
  std::vector<std::function<SolveReport()>> jobs;
  jobs.push_back([&] { return solve_penalized(spec, options.schedule, opts); });
  std::vector<ProblemSpec> specs;
  for (double frac : fractions) {
    double delta = frac * spec.obstacle.g_star();
    ScalarField g = spec.obstacle.g();
    for (double& v : g.values()) v += delta;
    specs.push_back(with_obstacle(spec, g));
    out.study.parameters.push_back(delta);
  }
  for (const auto& s : specs) jobs.push_back([&s, &options, &opts] { return solve_penalized(s, options.schedule, opts); });
  auto reports = run_parallel(jobs);
  const ScalarField& u = reports[0].u;
  const double scale = h_sigma_norm(u, sigma);
  bool all_tiny = true;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    double err = h_sigma_norm(u - reports[i].u, sigma);
    out.study.errors.push_back(err);
    out.normalized.push_back(err / std::sqrt(out.study.parameters[i - 1]));
    if (err > 100.0 * options.schedule.picard_tol * std::max(scale, 1e-300)) all_tiny = false;
  }
  out.inactive = reports[0].lambda_norms.l1 == 0.0 && all_tiny;
  out.study.degenerate = out.inactive;
  out.study.slope = loglog_slope(out.study.parameters, out.study.errors);
  out.study.monotone = nonincreasing(out.study.errors);
  if (out.inactive) return out;
  out.study.checks.push_back(EstimateCheck::make("g_stability_slope", 0.45, out.study.slope, 0.0,
                                                 "log-log slope of the difference against delta"));
  double worst = 0.0;
  for (double r : out.normalized) worst = std::max(worst, r);
  out.study.checks.push_back(EstimateCheck::make("g_stability_half_power", worst, 1.2 * out.normalized.front(), 0.0,
                                                 "difference / sqrt(delta) relative to the largest delta"));
  return out;
}

std::vector<EstimateCheck> check_multiplier_bounds(const SolveReport& report, const ProblemSpec& spec,
                                                   std::uint64_t seed, int samples) {
  std::vector<EstimateCheck> out;
  const double g_star = spec.obstacle.g_star(), g_upper = spec.obstacle.g_upper();
  const double c1 = spec.coeffs.a_star() * report.c_sigma * report.c_sigma / 2.0;
  const std::string ctx = sigma_context(report.sigma) + " eps=" + format_number(report.eps_final);
  out.push_back(EstimateCheck::make("multiplier_l1", report.lambda_norms.l1, c1 / (g_star * g_star), 0.0, ctx));
  RandomFields rng(seed);
  double sup = 0.0;
  for (int s = 0; s < samples; ++s) sup = std::max(sup, inner(report.Lambda, rng.unit_vectors(spec.grid)));
  out.push_back(EstimateCheck::make("flux_dual_norm_random", sup, c1 / g_star, 0.0, ctx));
  out.push_back(EstimateCheck::make("flux_dual_norm_exact", report.Lambda_l1, c1 / g_star, 0.0, ctx));
  if (!spec.data.has_f_sharp()) {
    out.push_back(EstimateCheck::make("multiplier_l1_gradient_source", report.lambda_norms.l1,
                                      spec.data.f_vec_l1() * g_upper / (g_star * g_star), 0.0, ctx));
  }
  out.push_back(EstimateCheck::make("complementarity", report.complementarity_abs,
                                    1e-5 * report.lambda_norms.l1 * g_upper, 0.0, ctx));
  bool nonnegative = true;
  for (double v : report.lambda_eps.values())
    if (!(v >= 0.0)) nonnegative = false;
  out.push_back(EstimateCheck::condition("multiplier_nonnegative", nonnegative, ctx));
  return out;
}

SobolevCheck check_sobolev(const DomainMask& mask, double sigma, double p, std::uint64_t seed, int samples) {
  SobolevCheck out;
  out.c_p = measure_c_p_raw(mask, sigma, p, seed, samples);
  bool ok = std::isfinite(out.c_p) && out.c_p > 0.0 && sigma * p > mask.grid().dim();
  out.check = EstimateCheck::condition("interpolation_constant_finite", ok,
                                       sigma_context(sigma) + " p=" + format_number(p) + " C_p=" + format_number(out.c_p));
  return out;
}

ConvergenceStudy sobolev_refinement(int dim, const std::vector<int>& ns, double half_length,
                                    const std::function<DomainMask(const Grid&)>& domain, double sigma, double p,
                                    std::uint64_t seed, int samples) {
  ConvergenceStudy study;
  study.name = "interpolation_constant_refinement";
  study.parameter_name = "n";
  for (int n : ns) {
    Grid grid(dim, n, half_length);
    DomainMask mask = domain(grid);
    study.parameters.push_back(n);
    study.errors.push_back(measure_c_p_raw(mask, sigma, p, seed, samples));
  }
  double worst = 0.0;
  for (std::size_t i = 1; i < study.errors.size(); ++i)
    worst = std::max(worst, std::abs(study.errors[i] - study.errors[i - 1]) / study.errors[i - 1]);
  study.slope = loglog_slope(study.parameters, study.errors);
  study.monotone = true;
  study.checks.push_back(EstimateCheck::make("interpolation_constant_stable", worst, 0.1));
  return study;
}

ConvergenceStudy epsilon_decay_from(const SolveReport& report, const ProblemSpec& spec, double minimum_slope) {
  ConvergenceStudy study;
  study.name = "epsilon_decay";
  study.parameter_name = "eps";
  std::vector<double> violation;
  for (const auto& lv : report.levels) {
    study.parameters.push_back(lv.eps);
    study.errors.push_back(lv.bad_set_measure);
    violation.push_back(lv.violation_sup);
  }
  std::size_t positive = 0;
  for (double e : study.errors)
    if (e > 0.0) ++positive;
  study.monotone = nonincreasing(study.errors);
  study.slope = loglog_slope(study.parameters, study.errors);
  study.degenerate = positive == 0;
  if (study.degenerate) return study;
  study.checks.push_back(EstimateCheck::condition("bad_set_monotone", study.monotone));
  study.checks.push_back(EstimateCheck::condition("violation_monotone", nonincreasing(violation)));
  // A single positive level leaves no slope to fit; the drop to zero measure is
  // itself consistent with the decay.
  if (positive >= 2)
    study.checks.push_back(EstimateCheck::make("bad_set_slope", minimum_slope, study.slope, 0.0,
                                               "least-squares log-log slope over levels with positive measure"));
  const double factor = spec.coeffs.a_star() * report.c_sigma * report.c_sigma /
                        (2.0 * spec.obstacle.g_star() * spec.obstacle.g_star());
  for (std::size_t l = 0; l < report.levels.size(); ++l) {
    const auto& lv = report.levels[l];
    study.checks.push_back(EstimateCheck::make("bad_set_bound." + std::to_string(l), lv.bad_set_measure,
                                               factor * std::sqrt(lv.eps), 0.0, "eps=" + format_number(lv.eps)));
  }
  return study;
}

ConvergenceStudy study_epsilon_decay(const ProblemSpec& spec, const VerifyOptions& options) {
  SolveReport report = solve_penalized(spec, options.schedule, penalized_options(options));
  return epsilon_decay_from(report, spec);
}

SigmaStudyResult study_sigma_limit(const ProblemSpec& spec, const VerifyOptions& options,
                                   const std::vector<double>& ladder, double sigma_tol, bool keep_fields) {
  if (spec.data.has_f_sharp()) throw ValidationError("the sigma study requires f_sharp = 0");
  if (ladder.size() < 4) throw ValidationError("the sigma study needs at least 4 ladder values");
  SigmaStudyResult out;
  std::vector<ProblemSpec> specs;
  for (double s : ladder) specs.push_back(with_sigma(spec, s));
  ProblemSpec local_spec = with_sigma(spec, 1.0);
  std::vector<std::function<SolveReport()>> jobs;
  jobs.push_back([&] { return solve_local(local_spec, options.schedule, penalized_options(options)); });
  for (const auto& s : specs)
    jobs.push_back([&s, &options] { return solve_penalized(s, options.schedule, penalized_options(options)); });
  auto reports = run_parallel(jobs);
  out.local = reports[0];
  const ScalarField& ref = out.local.u;
  const double ref_l2 = l2_norm(ref), ref_h = h_sigma_norm(ref, 0.5);

  out.l2.name = "sigma_limit_l2";
  out.h_half.name = "sigma_limit_h_half";
  out.l2.parameter_name = out.h_half.parameter_name = "sigma";
  const double g_star = spec.obstacle.g_star(), g_upper = spec.obstacle.g_upper();
  const double f_l1 = spec.data.f_vec_l1();
  const double uniform_bound = std::sqrt(g_upper / spec.coeffs.a_star() * f_l1);
  const double multiplier_bound = f_l1 * g_upper / (g_star * g_star);
  auto panel = test_panel(spec.mask);
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const SolveReport& r = reports[k + 1];
    ScalarField diff = r.u - ref;
    out.l2.parameters.push_back(ladder[k]);
    out.h_half.parameters.push_back(ladder[k]);
    out.l2.errors.push_back(l2_norm(diff) / ref_l2);
    out.h_half.errors.push_back(h_sigma_norm(diff, 0.5) / ref_h);
    out.l2.checks.push_back(EstimateCheck::make("uniform_sigma_bound." + std::to_string(k), r.u_norms.h_sigma,
                                                uniform_bound, 0.0, sigma_context(ladder[k])));
    out.l2.checks.push_back(EstimateCheck::make("sigma_multiplier_bound." + std::to_string(k), r.lambda_norms.l1,
                                                multiplier_bound, 0.0, sigma_context(ladder[k])));
    std::vector<double> pairings;
    for (const auto& phi : panel) pairings.push_back(inner(r.lambda_eps, phi));
    out.panel_pairings.push_back(std::move(pairings));
  }
  // the sigma = 1 row closes the plot data
  out.l2.parameters.push_back(1.0);
  out.l2.errors.push_back(0.0);
  out.h_half.parameters.push_back(1.0);
  out.h_half.errors.push_back(0.0);
  std::vector<double> local_pairings;
  for (const auto& phi : panel) local_pairings.push_back(inner(out.local.lambda_eps, phi));

  const std::size_t tail = ladder.size() - 4;
  std::vector<double> frac_l2(out.l2.errors.begin(), out.l2.errors.end() - 1);
  std::vector<double> frac_h(out.h_half.errors.begin(), out.h_half.errors.end() - 1);
  out.l2.monotone = strictly_decreasing(frac_l2, tail);
  out.h_half.monotone = strictly_decreasing(frac_h, tail);
  out.l2.slope = out.h_half.slope = 0.0;  // no rate is claimed
  out.l2.checks.push_back(EstimateCheck::condition("sigma_l2_monotone_tail", out.l2.monotone));
  out.l2.checks.push_back(EstimateCheck::condition("sigma_h_half_monotone_tail", out.h_half.monotone));
  out.l2.checks.push_back(EstimateCheck::make("sigma_final_error", frac_l2.back(), sigma_tol, 0.0,
                                              sigma_context(ladder.back())));
  for (std::size_t k = 1; k < out.panel_pairings.size(); ++k) {
    double d = 0.0;
    for (std::size_t i = 0; i < panel.size(); ++i)
      d = std::max(d, std::abs(out.panel_pairings[k][i] - out.panel_pairings[k - 1][i]));
    out.successive_differences.push_back(d);
  }
  std::vector<double> tail_diffs(out.successive_differences.begin() + static_cast<long>(tail),
                                 out.successive_differences.end());
  out.l2.checks.push_back(EstimateCheck::condition("panel_pairings_cauchy", strictly_decreasing(tail_diffs)));
  if (!keep_fields)
    for (auto& r : reports) r.lambda_eps = r.gamma = ScalarField();
  out.reports.assign(reports.begin() + 1, reports.end());
  return out;
}

IdentityStudyResult study_identity_approx(const Grid& grid, const std::vector<double>& alphas,
                                          const std::vector<double>& sigmas, double amplitude) {
  IdentityStudyResult out;
  out.riesz.name = "identity_riesz";
  out.riesz.parameter_name = "alpha";
  out.gradient.name = "identity_gradient";
  out.gradient.parameter_name = "sigma";
  ScalarField h = ScalarField::from_function(
      grid, [amplitude](double x, double y) { return amplitude * std::exp(-(x * x + y * y)); });
  const double h_inf = linf_norm(h);
  for (double a : alphas) {
    ScalarField diff = riesz_potential(h, a, RieszBackend::quadrature).field - h;
    out.riesz.parameters.push_back(a);
    out.riesz.errors.push_back(h_inf > 0.0 ? linf_norm(diff) / h_inf : linf_norm(diff));
  }
  const double rho = 1.0;
  ScalarField w = ScalarField::from_function(grid, [amplitude, rho](double x, double y) {
    double r = std::hypot(x, y);
    return r < rho ? amplitude * 0.5 * (1.0 + std::cos(std::numbers::pi * r / rho)) : 0.0;
  });
  VectorField dw = classical_gradient(w);
  const double dw_inf = linf_norm(dw);
  for (double s : sigmas) {
    VectorField diff = frac_gradient(w, s) - dw;
    out.gradient.parameters.push_back(s);
    out.gradient.errors.push_back(dw_inf > 0.0 ? linf_norm(diff) / dw_inf : linf_norm(diff));
  }
  out.riesz.monotone = strictly_decreasing(out.riesz.errors);
  out.gradient.monotone = strictly_decreasing(out.gradient.errors);
  out.riesz.slope = loglog_slope(out.riesz.parameters, out.riesz.errors);
  out.gradient.slope = loglog_slope(out.gradient.parameters, out.gradient.errors);
  out.riesz.degenerate = out.gradient.degenerate = amplitude == 0.0;
  if (amplitude == 0.0) return out;
  out.riesz.checks.push_back(EstimateCheck::condition("riesz_identity_monotone", out.riesz.monotone));
  out.riesz.checks.push_back(EstimateCheck::make("riesz_identity_final", out.riesz.errors.back(), 0.05, 0.0,
                                                 "alpha=" + format_number(alphas.back())));
  out.gradient.checks.push_back(EstimateCheck::condition("gradient_limit_monotone", out.gradient.monotone));
  return out;
}

EstimateCheck check_discrete_vi(const ProblemSpec& spec, const ScalarField& u, std::uint64_t seed, int directions) {
  RandomFields rng(seed);
  const double sigma = spec.sigma;
  const ScalarField& g = spec.obstacle.g();
  VectorField Du = frac_gradient(u, sigma);
  VectorField ADu = spec.coeffs.apply(Du);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < directions; ++k) {
    ScalarField phi = rng.smooth(spec.mask, 1 + k % 6);
    VectorField dphi = frac_gradient(phi, sigma);
    double scale = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
      double m = dphi.magnitude(i);
      if (m > 0.0) scale = std::min(scale, g[i] / m);
    }
    ScalarField w = phi;
    w *= scale * rng.uniform(0.0, 1.0);
    double theta = rng.uniform(0.05, 1.0);
    ScalarField dir = w - u;
    dir *= theta;
    VectorField ddir = frac_gradient(dir, sigma);
    double value = inner(ADu, ddir) - spec.load(dir);
    double norm = spec.coeffs.a_upper() * l2_norm(Du) * l2_norm(ddir) + std::abs(spec.load(dir));
    worst = std::max(worst, norm > 0.0 ? -value / norm : -value);
  }
  return EstimateCheck::make("discrete_vi", worst, 1e-5, 0.0, "relative to the pairing scale");
}

std::vector<EstimateCheck> check_holder_charges(const ScalarField& lambda, std::uint64_t seed, int samples) {
  RandomFields rng(seed);
  std::vector<EstimateCheck> out;
  for (double p : {2.0, 3.0}) {
    const double q = p / (p - 1.0);
    double worst_lhs = 0.0, worst_rhs = 0.0, worst_ratio = -1.0;
    for (int s = 0; s < samples; ++s) {
      ScalarField phi = rng.bounded(lambda.grid()), psi = rng.bounded(lambda.grid());
      ScalarField prod(lambda.grid()), a(lambda.grid()), b(lambda.grid());
      for (std::size_t i = 0; i < prod.size(); ++i) {
        prod[i] = phi[i] * psi[i];
        a[i] = std::pow(std::abs(phi[i]), p);
        b[i] = std::pow(std::abs(psi[i]), q);
      }
      double lhs = std::abs(inner(lambda, prod));
      double rhs = std::pow(inner(lambda, a), 1.0 / p) * std::pow(inner(lambda, b), 1.0 / q);
      double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? 2.0 : 0.0);
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        worst_lhs = lhs;
        worst_rhs = rhs;
      }
    }
    out.push_back(EstimateCheck::make("holder_charges_p" + format_number(p), worst_lhs, worst_rhs, 1e-12));
  }
  return out;
}

EstimateCheck check_uniqueness(const ProblemSpec& spec, const SolveReport& reference, const VerifyOptions& options) {
  RandomFields rng(options.seed + 7919);
  PenalizedOptions opts = penalized_options(options, reference.c_star);
  ScalarField guess = rng.smooth(spec.mask);
  guess *= linf_norm(reference.u) + 1.0;
  opts.initial_guess = guess;
  SolveReport other = solve_penalized(spec, options.schedule, opts);
  double d = relative_h_sigma_distance(reference.u, other.u, spec.sigma);
  return EstimateCheck::make("uniqueness", d, 10.0 * options.schedule.picard_tol, 0.0,
                             "relative h_sigma distance between two initial guesses");
}

EstimateCheck check_cross_solver(const SolveReport& penalized, const SolveReport& primal_dual, double sigma,
                                 double tol) {
  return EstimateCheck::make("cross_solver", relative_h_sigma_distance(primal_dual.u, penalized.u, sigma), tol, 0.0,
                             sigma_context(sigma));
}

std::vector<double> potential_pairing_gaps(const SolveReport& report, const ProblemSpec& spec) {
  auto panel = test_panel(spec.mask);
  VectorField dgamma = frac_gradient(report.gamma, spec.sigma);
  std::vector<double> target;
  for (const auto& v : panel) target.push_back(inner(dgamma, frac_gradient(v, spec.sigma)));
  std::vector<double> gaps;
  for (const auto& lv : report.levels) {
    double gap = 0.0;
    for (std::size_t i = 0; i < target.size() && i < lv.pairings.size(); ++i)
      gap = std::max(gap, std::abs(lv.pairings[i] - target[i]));
    gaps.push_back(gap);
  }
  return gaps;
}

}  // namespace fracvi
