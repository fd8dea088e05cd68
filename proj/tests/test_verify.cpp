#include <cmath>

#include "doctest.h"
#include "fracvi/constants.hpp"
#include "fracvi/errors.hpp"
#include "fracvi/verify.hpp"
#include "helpers.hpp"

using namespace fracvi;
using testing_helpers::Instance;

namespace {

Instance base_instance() {
  Instance in;
  in.sigma = 0.8;
  in.f_sharp = "constant(2)";
  return in;
}

Instance inactive_instance() {
  Instance in;
  in.sigma = 0.75;
  in.f_sharp = "constant(1)";
  in.g = "constant(100)";
  return in;
}

VerifyOptions options_for(const ProblemFile& pf) {
  VerifyOptions o;
  o.schedule = pf.schedule;
  return o;
}

void require_passed(const std::vector<EstimateCheck>& checks) {
  for (const auto& c : checks) CHECK_MESSAGE(c.passed, c.name << " lhs=" << c.lhs << " rhs=" << c.rhs);
}

}  // namespace

TEST_CASE("data stability with zero perturbation") {
  ProblemFile pf = base_instance().build();
  ScalarField zero(pf.spec.grid);
  DataStabilityResult r = check_data_stability(pf.spec, zero, VectorField(pf.spec.grid), options_for(pf));
  CHECK(r.sobolev_form.lhs == 0.0);
  CHECK(r.sobolev_form.rhs == 0.0);
  CHECK(r.sobolev_form.passed);
  CHECK(r.l1_form.passed);
}

TEST_CASE("data stability under a scalar source perturbation") {
  ProblemFile pf = base_instance().build();
  ScalarField d = 0.1 * indicator_field(pf.spec.mask);
  DataStabilityResult r = check_data_stability(pf.spec, d, VectorField(pf.spec.grid), options_for(pf));
  require_passed({r.sobolev_form, r.l1_form, r.gamma_form});
  CHECK(r.sobolev_form.lhs > 0.0);
  CHECK(r.p == l1_data_exponent(1, 0.8));
}

TEST_CASE("data stability under a vector source perturbation") {
  Instance in = base_instance();
  in.f_sharp.clear();
  in.f_vec = "linear_source(4)";
  ProblemFile pf = in.build();
  VectorField d(pf.spec.grid);
  for (std::size_t i = 0; i < d.component(0).size(); ++i)
    if (pf.spec.mask.contains(i)) d.component(0)[i] = 0.1;
  DataStabilityResult r = check_data_stability(pf.spec, ScalarField(pf.spec.grid), d, options_for(pf));
  require_passed({r.sobolev_form, r.l1_form, r.gamma_form});
}

TEST_CASE("g stability scales like the square root") {
  ProblemFile pf = base_instance().build();
  GStabilityResult r = check_g_stability(pf.spec, options_for(pf));
  CHECK_FALSE(r.inactive);
  CHECK(r.study.parameters.size() == 4);
  require_passed(r.study.checks);
  CHECK(r.study.slope >= 0.45);
}

TEST_CASE("g stability of an inactive instance is flagged") {
  ProblemFile pf = inactive_instance().build();
  GStabilityResult r = check_g_stability(pf.spec, options_for(pf));
  CHECK(r.inactive);
  for (double e : r.study.errors) CHECK(e < 1e-6);
}

TEST_CASE("multiplier bounds") {
  SUBCASE("inactive") {
    ProblemFile pf = inactive_instance().build();
    SolveReport rep = solve_penalized(pf.spec, pf.schedule);
    auto checks = check_multiplier_bounds(rep, pf.spec, 1);
    for (const auto& c : checks) CHECK(c.lhs == 0.0);
    require_passed(checks);
  }
  SUBCASE("active") {
    ProblemFile pf = base_instance().build();
    SolveReport rep = solve_penalized(pf.spec, pf.schedule);
    auto checks = check_multiplier_bounds(rep, pf.spec, 1);
    require_passed(checks);
    auto again = check_multiplier_bounds(rep, pf.spec, 1);
    REQUIRE(again.size() == checks.size());
    for (std::size_t i = 0; i < checks.size(); ++i) CHECK(again[i].lhs == checks[i].lhs);
  }
  SUBCASE("gradient source") {
    Instance in = base_instance();
    in.f_sharp.clear();
    in.f_vec = "linear_source(4)";
    ProblemFile pf = in.build();
    SolveReport rep = solve_penalized(pf.spec, pf.schedule);
    auto checks = check_multiplier_bounds(rep, pf.spec, 1);
    bool found = false;
    for (const auto& c : checks) found = found || c.name == "multiplier_l1_gradient_source";
    CHECK(found);
    require_passed(checks);
  }
}

TEST_CASE("interpolation ratio of a single mode") {
  double L = 2.0;
  Grid g = make_grid(1, 256, L);
  double k = 2 * M_PI * 2 / (2 * L);
  ScalarField v = ScalarField::from_function(g, [&](double x, double) { return std::cos(k * x); });
  double sigma = 0.75, p = 4.0;
  // ||v||_inf = 1, ||D v||_inf = k^s, ||D v||_2 = k^s sqrt(L)
  double expected = std::pow(k, -sigma) * std::pow(L, -1.0 / p);
  CHECK(interpolation_ratio(v, sigma, p) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("interpolation constant is stable under refinement") {
  auto domain = [](const Grid& g) { return DomainMask::interval(g, 1.0); };
  ConvergenceStudy s = sobolev_refinement(1, {256, 512, 1024}, 4.0, domain, 0.75, 4.0, 1);
  require_passed(s.checks);
  for (double c : s.errors) CHECK(std::isfinite(c));
}

TEST_CASE("solution interpolation ratio against the measured constant") {
  ProblemFile pf = base_instance().build();
  SolveReport rep = solve_penalized(pf.spec, pf.schedule);
  double p = l1_data_exponent(1, 0.8);
  SobolevCheck sob = check_sobolev(pf.spec.mask, 0.8, p, 1);
  CHECK(sob.check.passed);
  CHECK(interpolation_ratio(rep.u, 0.8, p) <= kConstantSafety * sob.c_p);
}

TEST_CASE("epsilon decay") {
  SUBCASE("inactive instance is degenerate") {
    ProblemFile pf = inactive_instance().build();
    ConvergenceStudy s = study_epsilon_decay(pf.spec, options_for(pf));
    CHECK(s.degenerate);
    for (double e : s.errors) CHECK(e == 0.0);
  }
  SUBCASE("shipped decay instance") {
    ProblemFile pf = parse_problem(FRACVI_SOURCE_DIR "/problems/epsilon_decay_1d.ini");
    ConvergenceStudy s = study_epsilon_decay(pf.spec, options_for(pf));
    CHECK_FALSE(s.degenerate);
    CHECK(s.monotone);
    CHECK(s.slope >= 0.4);
    require_passed(s.checks);
  }
}

TEST_CASE("sigma limit") {
  SUBCASE("rejects a scalar source") {
    ProblemFile pf = base_instance().build();
    CHECK_THROWS_AS(study_sigma_limit(pf.spec, options_for(pf)), ValidationError);
  }
  SUBCASE("inactive gradient source tends to the local Poisson solution") {
    Instance in = inactive_instance();
    in.f_sharp.clear();
    in.f_vec = "linear_source(1)";
    ProblemFile pf = in.build();
    SigmaStudyResult r = study_sigma_limit(pf.spec, options_for(pf), {0.6, 0.7, 0.8, 0.9, 0.95, 0.99}, 5e-2, false);
    CHECK(r.l2.parameters.size() == 7);
    CHECK(r.l2.monotone);
    CHECK(r.l2.errors[5] < 5e-2);
    CHECK(linf_norm(r.local.lambda_eps) == 0.0);
  }
  SUBCASE("gradient source elastoplastic instance") {
    ProblemFile pf = parse_problem(FRACVI_SOURCE_DIR "/problems/gradient_source_1d.ini");
    SigmaStudyResult r = study_sigma_limit(pf.spec, options_for(pf), pf.sigma_ladder, pf.sigma_tol, false);
    require_passed(r.l2.checks);
    REQUIRE(pf.reference.has_value());
    ScalarField exact = exact_local(*pf.reference, pf.spec.grid);
    CHECK(l2_norm(r.reports.back().u - exact) <= 5e-2 * l2_norm(exact));
  }
}

TEST_CASE("approximation of the identity") {
  Grid g = make_grid(1, 1024, 8.0);
  IdentityStudyResult r = study_identity_approx(g);
  require_passed(r.riesz.checks);
  require_passed(r.gradient.checks);
  IdentityStudyResult z = study_identity_approx(g, {0.4, 0.2, 0.1, 0.05}, {0.9, 0.95, 0.99}, 0.0);
  for (double e : z.riesz.errors) CHECK(e == 0.0);
  for (double e : z.gradient.errors) CHECK(e == 0.0);
}

TEST_CASE("discrete inequality, charges and uniqueness at the solution") {
  ProblemFile pf = base_instance().build();
  SolveReport rep = solve_penalized(pf.spec, pf.schedule);
  CHECK(check_discrete_vi(pf.spec, rep.u, 1).passed);
  require_passed(check_holder_charges(rep.lambda_eps, 1));
  CHECK(check_uniqueness(pf.spec, rep, options_for(pf)).passed);
  // a feasible but non-optimal field violates the inequality
  ScalarField shrunk = 0.5 * rep.u;
  CHECK_FALSE(check_discrete_vi(pf.spec, shrunk, 1).passed);
}

TEST_CASE("cross solver agreement with nonconstant g") {
  Instance in = base_instance();
  in.sigma = 0.7;
  in.f_sharp = "constant(4)";
  in.g = "constant(0.8) + gaussian(0.5, 0.3, 0.6)";
  ProblemFile pf = in.build();
  SolveReport a = solve_penalized(pf.spec, pf.schedule);
  SolveReport b = solve_primal_dual(pf.spec, pf.primal_dual);
  CHECK(check_cross_solver(a, b, 0.7).passed);
}

TEST_CASE("worker limit follows the environment") {
  setenv("FRACVI_THREADS", "3", 1);
  CHECK(worker_limit() == 3);
  setenv("FRACVI_THREADS", "100000", 1);
  CHECK(worker_limit() == 256);
  unsetenv("FRACVI_THREADS");
  CHECK(worker_limit() >= 1);
  std::vector<std::function<int()>> jobs;
  for (int i = 0; i < 20; ++i) jobs.push_back([i] { return i * i; });
  auto out = run_parallel(jobs);
  for (int i = 0; i < 20; ++i) CHECK(out[i] == i * i);
}
