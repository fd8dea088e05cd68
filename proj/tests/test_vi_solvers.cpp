#include <cmath>

#include "doctest.h"
#include "fracvi/errors.hpp"
#include "fracvi/local_ref.hpp"
#include "fracvi/penalized.hpp"
#include "fracvi/primal_dual.hpp"
#include "fracvi/random_fields.hpp"
#include "fracvi/verify.hpp"
#include "helpers.hpp"
#include "oracle.hpp"

using namespace fracvi;
using testing_helpers::Instance;

namespace {

double max_abs_diff(const ScalarField& a, const ScalarField& b) { return linf_norm(a - b); }

Instance tiny_instance(double sigma) {
  Instance in;
  in.n = 32;
  in.half_length = 2.0;
  in.sigma = sigma;
  in.f_sharp = "constant(2)";
  in.g = "constant(1)";
  in.eps_initial = 0.1;
  in.eps_factor = 0.1;
  in.levels = 10;
  in.extra_solver = "pd_tol = 1e-12\npd_max_iters = 200000\n";
  return in;
}

}  // namespace

TEST_CASE("penalty_k values") {
  CHECK(penalty_k(-3.0, 0.1) == 0.0);
  CHECK(penalty_k(0.5, 0.1) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(penalty_k(100.0, 0.1) == doctest::Approx(100.0).epsilon(1e-15));
}

TEST_CASE("penalty_k is continuous, nondecreasing and capped") {
  double eps = 0.2;
  double prev = -1.0;
  for (int i = -100; i <= 2000; ++i) {
    double t = i * 0.005;
    double k = penalty_k(t, eps);
    CHECK(k >= prev);
    CHECK(k <= 1.0 / (eps * eps));
    prev = k;
  }
  CHECK(penalty_k(1.0 / eps, eps) == doctest::Approx(1.0 / (eps * eps)));
  // the primitive differentiates to k_eps
  for (double t : {-0.5, 0.7, 3.0, 9.0}) {
    double d = (penalty_primitive(t + 1e-6, eps) - penalty_primitive(t - 1e-6, eps)) / 2e-6;
    CHECK(d == doctest::Approx(penalty_k(t, eps)).epsilon(1e-6));
  }
}

TEST_CASE("operator reduces to the masked Laplacian") {
  Instance in;
  ProblemFile pf = in.build();
  const auto& spec = pf.spec;
  ScalarField u = masked(ScalarField::from_function(spec.grid, [](double x, double) { return std::exp(-36.0 * x * x); }),
                         spec.mask);
  ScalarField lu = apply_operator(u, spec, ScalarField(spec.grid));
  ScalarField ref = masked(frac_laplacian(u, 1.0), spec.mask);
  CHECK(l2_norm(lu - ref) <= 1e-12 * l2_norm(ref));
  CHECK(off_support_max(lu, spec.mask) == 0.0);
}

TEST_CASE("operator is linear and symmetric") {
  Instance in;
  in.dim = 2;
  in.n = 32;
  in.half_length = 2.0;
  in.sigma = 0.7;
  in.coefficients = "diagonal(1.5, 0.8)";
  ProblemFile pf = in.build();
  const auto& spec = pf.spec;
  RandomFields rf(5);
  ScalarField u = rf.smooth(spec.mask), v = rf.smooth(spec.mask);
  ScalarField kappa = rf.bounded(spec.grid);
  for (auto& k : kappa.data()) k = std::abs(k) * 3.0;
  ScalarField lsum = apply_operator(u + 2.0 * v, spec, kappa);
  ScalarField sum = apply_operator(u, spec, kappa) + 2.0 * apply_operator(v, spec, kappa);
  CHECK(l2_norm(lsum - sum) <= 1e-12 * l2_norm(sum));
  double a = inner(apply_operator(u, spec, kappa), v);
  double b = inner(u, apply_operator(v, spec, kappa));
  CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
}

TEST_CASE("solve_linear recovers a known field and maps zero to zero") {
  Instance in;
  in.sigma = 0.6;
  ProblemFile pf = in.build();
  const auto& spec = pf.spec;
  RandomFields rf(7);
  ScalarField u = rf.smooth(spec.mask);
  ScalarField kappa(spec.grid, 0.5);
  ScalarField rhs = apply_operator(u, spec, kappa);
  LinearSolveOptions opt;
  ScalarField back = solve_linear(spec, kappa, rhs, opt);
  CHECK(l2_norm(apply_operator(back, spec, kappa) - rhs) <= 1e-9 * l2_norm(rhs));
  CHECK(l2_norm(back - u) <= 1e-8 * l2_norm(u));
  ScalarField zero = solve_linear(spec, kappa, ScalarField(spec.grid), opt);
  CHECK(linf_norm(zero) == 0.0);
}

TEST_CASE("solve_linear reports nonconvergence") {
  Instance in;
  ProblemFile pf = in.build();
  ScalarField rhs = assemble_rhs(pf.spec);
  LinearSolveOptions opt;
  opt.max_iters = 1;
  CHECK_THROWS_AS(solve_linear(pf.spec, ScalarField(pf.spec.grid), rhs, opt), NonConvergence);
}

TEST_CASE("Poisson problem on the interval") {
  for (int n : {1024, 2048}) {
    Instance in;
    in.n = n;
    in.f_sharp = "constant(1)";
    ProblemFile pf = in.build();
    const auto& spec = pf.spec;
    ScalarField u = solve_linear(spec, ScalarField(spec.grid), assemble_rhs(spec));
    ScalarField exact = ScalarField::from_function(spec.grid, [](double x, double) {
      return std::abs(x) < 1.0 ? (1.0 - x * x) / 2.0 : 0.0;
    });
    double err = max_abs_diff(u, masked(exact, spec.mask));
    // first order in h from the jump of Du at the boundary
    CHECK(err <= (n == 1024 ? 1.1e-3 : 1e-3));
  }
}

TEST_CASE("inactive constraint gives the unconstrained solution") {
  Instance in;
  in.sigma = 0.75;
  in.f_sharp = "constant(1)";
  in.g = "constant(100)";
  ProblemFile pf = in.build();
  const auto& spec = pf.spec;
  SolveReport r = solve_penalized(spec, pf.schedule);
  ScalarField free = solve_linear(spec, ScalarField(spec.grid), assemble_rhs(spec));
  CHECK(relative_h_sigma_distance(r.u, free, 0.75) < pf.schedule.picard_tol);
  CHECK(linf_norm(r.lambda_eps) == 0.0);
  CHECK(linf_norm(r.gamma) < 1e-8);

  SolveReport d = solve_primal_dual(spec, pf.primal_dual);
  CHECK(relative_h_sigma_distance(d.u, free, 0.75) < 1e-8);
  CHECK(linf_norm(d.lambda_eps) == 0.0);
}

TEST_CASE("elastoplastic instance matches the closed form") {
  Instance in;
  in.n = 1024;
  in.eps_factor = std::pow(10.0, -1.0 / 3.0);
  ProblemFile pf = in.build();
  CHECK(pf.schedule.eps_final() == doctest::Approx(1e-4).epsilon(1e-9));
  SolveReport r = solve_penalized(pf.spec, pf.schedule);
  LocalExactSolution sol{LocalKind::elastoplastic_1d, 2.0, 1.0, 1.0};
  ScalarField exact = exact_local(sol, pf.spec.grid);
  CHECK(max_abs_diff(r.u, exact) <= 2e-2);
  for (std::size_t l = 1; l < r.levels.size(); ++l)
    CHECK(r.levels[l].violation_sup <= r.levels[l - 1].violation_sup);
  for (double v : r.lambda_eps.values()) CHECK(v >= 0.0);
  for (const auto& c : r.checks)
    if (c.name != "complementarity") CHECK_MESSAGE(c.passed, c.name);
}

TEST_CASE("multiplier extraction and potential") {
  Instance in;
  in.sigma = 0.8;
  ProblemFile pf = in.build();
  SolveReport r = solve_penalized(pf.spec, pf.schedule);
  ScalarField lam = extract_multiplier(r.u, pf.spec, r.eps_final);
  CHECK(lam.data() == r.lambda_eps.data());
  GammaResult g = compute_gamma(pf.spec, r.u);
  CHECK(g.residual < 1e-9);
  // the weak limit of kappa D u is D gamma: later levels pair closer
  auto gaps = potential_pairing_gaps(r, pf.spec);
  REQUIRE(gaps.size() == r.levels.size());
  CHECK(gaps.back() < gaps.front());
  CHECK(gaps.back() < 1e-3 * (1.0 + r.lambda_norms.l1));
}

TEST_CASE("primal-dual agrees with penalized on the elastoplastic instance") {
  Instance in;
  in.n = 1024;
  ProblemFile pf = in.build();
  SolveReport a = solve_penalized(pf.spec, pf.schedule);
  SolveReport b = solve_primal_dual(pf.spec, pf.primal_dual);
  CHECK(relative_h_sigma_distance(a.u, b.u, 1.0) < 5e-3);
  for (double v : b.lambda_eps.values()) CHECK(v >= 0.0);
}

TEST_CASE("primal-dual requires symmetric coefficients") {
  Instance in;
  in.dim = 2;
  in.n = 32;
  in.half_length = 2.0;
  in.sigma = 0.8;
  in.coefficients = "rotation(0.3, 1.4, 1.5)";
  ProblemFile pf = in.build();
  CHECK_FALSE(pf.spec.coeffs.symmetric());
  CHECK_THROWS_AS(solve_primal_dual(pf.spec, pf.primal_dual), NotSymmetric);
}

TEST_CASE("brute-force oracle on a tiny grid") {
  for (double sigma : {1.0, 0.7}) {
    ProblemFile pf = tiny_instance(sigma).build();
    const auto& spec = pf.spec;
    std::vector<std::uint8_t> inside(spec.mask.indicator().begin(), spec.mask.indicator().end());
    oracle::Result ref = oracle::solve(spec.grid, inside, sigma, spec.data.f_sharp().data(), spec.obstacle.g().data());
    CHECK(ref.kkt < 1e-10);
    ScalarField u_ref(spec.grid, ref.u);
    SolveReport a = solve_penalized(spec, pf.schedule);
    SolveReport b = solve_primal_dual(spec, pf.primal_dual);
    CHECK(max_abs_diff(a.u, u_ref) < 1e-6);
    CHECK(max_abs_diff(b.u, u_ref) < 1e-6);
  }
}
