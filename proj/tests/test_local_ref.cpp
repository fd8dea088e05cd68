#include <cmath>

#include "doctest.h"
#include "fracvi/errors.hpp"
#include "fracvi/local_ref.hpp"
#include "fracvi/verify.hpp"

using namespace fracvi;

namespace {

PenaltySchedule schedule_to(double eps_final, int levels = 10) {
  PenaltySchedule s;
  s.eps_initial = 0.1;
  s.levels = levels;
  s.factor = std::pow(eps_final / s.eps_initial, 1.0 / (levels - 1));
  return s;
}

}  // namespace

TEST_CASE("elastoplastic closed form") {
  LocalExactSolution sol{LocalKind::elastoplastic_1d, 2.0, 1.0, 1.0};
  CHECK(sol.active());
  CHECK(sol.contact_radius() == doctest::Approx(0.5));
  // plastic for |x| > 1/2 with slope g0, parabolic cap inside
  CHECK(sol.value(0.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(sol.value(0.75) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(sol.value(0.5 - 1e-12) == doctest::Approx(sol.value(0.5 + 1e-12)).epsilon(1e-10));
  CHECK(sol.slope(0.25) == doctest::Approx(0.5));
  CHECK(sol.slope(0.9) == doctest::Approx(1.0));
  CHECK(sol.multiplier(0.25) == 0.0);
  CHECK(sol.multiplier(0.75) == doctest::Approx(0.5));
  CHECK(sol.value(1.2) == 0.0);
}

TEST_CASE("elastoplastic without contact is the Poisson profile") {
  LocalExactSolution sol{LocalKind::elastoplastic_1d, 0.8, 1.0, 1.0};
  CHECK_FALSE(sol.active());
  for (double x : {0.0, 0.3, -0.7})
    CHECK(sol.value(x) == doctest::Approx(0.8 * (1.0 - x * x) / 2.0).epsilon(1e-15));
  CHECK(sol.multiplier(0.9) == 0.0);
}

TEST_CASE("radial torsion closed form") {
  LocalExactSolution sol{LocalKind::radial_torsion_2d, 4.0, 1.0, 1.0};
  CHECK(sol.contact_radius() == doctest::Approx(0.5));
  CHECK(sol.value(0.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(sol.value(0.8) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(sol.slope(0.25) == doctest::Approx(0.5));
  CHECK(sol.multiplier(0.75) == doctest::Approx(0.5));
}

TEST_CASE("closed form rejects invalid parameters") {
  LocalExactSolution bad{LocalKind::elastoplastic_1d, -1.0, 1.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  LocalExactSolution zero_g{LocalKind::radial_torsion_2d, 1.0, 0.0, 1.0};
  CHECK_THROWS_AS(zero_g.validate(), ValidationError);
  LocalExactSolution ok{LocalKind::radial_torsion_2d, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(exact_local(ok, make_grid(1, 64, 2.0)), ValidationError);
}

TEST_CASE("sampled closed form respects the slope bound") {
  for (int dim : {1, 2}) {
    InstanceSetup s;
    s.dim = dim;
    s.n = dim == 1 ? 1024 : 128;
    s.half_length = dim == 1 ? 4.0 : 2.0;
    s.solution = {dim == 1 ? LocalKind::elastoplastic_1d : LocalKind::radial_torsion_2d, dim == 1 ? 2.0 : 4.0, 1.0,
                  1.0};
    ProblemSpec spec = make_local_instance(s);
    ScalarField u = exact_local(s.solution, spec.grid);
    CHECK(slope_excess(u, spec.mask, 1.0) <= 2.0 * spec.grid.spacing() * s.solution.f0);
  }
}

TEST_CASE("sampled closed form satisfies the discrete inequality") {
  InstanceSetup s;
  s.solution = {LocalKind::elastoplastic_1d, 2.0, 1.0, 1.0};
  ProblemSpec spec = make_local_instance(s);
  ScalarField u = exact_local(s.solution, spec.grid);
  // the sampled kink is not discretely optimal, so the inequality holds up
  // to the discretization error only
  EstimateCheck c = check_discrete_vi(spec, u, 3);
  CHECK(c.lhs < 1e-2);
}

TEST_CASE("solve_local recovers the elastoplastic closed form") {
  InstanceSetup s;
  s.solution = {LocalKind::elastoplastic_1d, 2.0, 1.0, 1.0};
  ProblemSpec spec = make_local_instance(s);
  SolveReport r = solve_local(spec, schedule_to(1e-4));
  CHECK(linf_norm(r.u - exact_local(s.solution, spec.grid)) <= 2e-2);
}

TEST_CASE("local multiplier lives on the plastic region") {
  InstanceSetup s;
  s.solution = {LocalKind::elastoplastic_1d, 2.0, 1.0, 1.0};
  ProblemSpec spec = make_local_instance(s);
  SolveReport r = solve_local(spec, schedule_to(1e-7));
  auto active = exact_active_set(s.solution, spec.grid);
  double off = 0.0, total = 0.0;
  for (std::size_t i = 0; i < spec.grid.size(); ++i) {
    total += r.lambda_eps[i];
    if (!active[i]) off += r.lambda_eps[i];
  }
  CHECK(total > 0.0);
  CHECK(off < 1e-3 * total);
  ScalarField lam = exact_local_multiplier(s.solution, spec.grid);
  CHECK(std::abs(l1_norm(r.lambda_eps) - l1_norm(lam)) < 2e-2 * l1_norm(lam));
}

TEST_CASE("solve_local without contact is the Poisson solution") {
  InstanceSetup s;
  s.solution = {LocalKind::elastoplastic_1d, 0.5, 1.0, 1.0};
  ProblemSpec spec = make_local_instance(s);
  SolveReport r = solve_local(spec, schedule_to(1e-4));
  ScalarField free = solve_linear(spec, ScalarField(spec.grid), assemble_rhs(spec));
  CHECK(relative_h_sigma_distance(r.u, free, 1.0) < 1e-8);
  CHECK(linf_norm(r.lambda_eps) == 0.0);
}

TEST_CASE("solve_local requires sigma = 1") {
  InstanceSetup s;
  s.sigma = 0.9;
  ProblemSpec spec = make_local_instance(s);
  CHECK_THROWS_AS(solve_local(spec, PenaltySchedule{}), ValidationError);
}

TEST_CASE("gradient source coincides with the scalar source at sigma = 1") {
  InstanceSetup a;
  a.n = 512;
  a.solution = {LocalKind::elastoplastic_1d, 2.0, 1.0, 1.0};
  InstanceSetup b = a;
  b.gradient_source = true;
  PenaltySchedule sched = schedule_to(1e-6);
  SolveReport ra = solve_local(make_local_instance(a), sched);
  SolveReport rb = solve_local(make_local_instance(b), sched);
  // the vector source jumps at the boundary, which the spectral divergence
  // smears over a few nodes; compare pointwise
  CHECK(linf_norm(ra.u - rb.u) < 1e-2);
}
