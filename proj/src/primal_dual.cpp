#include "fracvi/primal_dual.hpp"

#include <chrono>
#include <cmath>

#include "fracvi/errors.hpp"
#include "fracvi/penalized.hpp"

namespace fracvi {

namespace {

VectorField project(const VectorField& q, const ScalarField& g) {
  VectorField p = q;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double mag = q.magnitude(i);
    if (mag > g[i]) {
      double s = g[i] / mag;
      for (int j = 0; j < q.dim(); ++j) p.component(j)[i] *= s;
    }
  }
  return p;
}

}  // namespace

SolveReport solve_primal_dual(const ProblemSpec& spec, const PrimalDualConfig& config) {
  spec.validate();
  if (!spec.coeffs.symmetric()) throw NotSymmetric("primal-dual solver requires symmetric coefficients");
  auto start = std::chrono::steady_clock::now();
  const double sigma = spec.sigma;
  const ScalarField& g = spec.obstacle.g();
  double r = config.penalty > 0.0 ? config.penalty : spec.coeffs.a_upper();

  SolveReport report;
  report.solver = "primal_dual";
  DiscreteOperator plain(spec.mask, spec.coeffs, sigma);
  ScalarField u = plain.solve(plain.rhs(spec.data.f_sharp(), spec.data.f_vec()), ScalarField(spec.grid),
                              config.krylov_tol, config.krylov_max_iters);
  VectorField Du = frac_gradient(u, sigma);
  VectorField p = project(Du, g);
  VectorField mu(spec.grid);

  double primal = 0.0, dual = 0.0;
  bool converged = false;
  int it = 0;
  for (it = 1; it <= config.max_iters; ++it) {
    DiscreteOperator op(spec.mask, spec.coeffs, sigma);
    op.set_shift(r);
    VectorField source = spec.data.f_vec();
    for (int j = 0; j < spec.grid.dim(); ++j) {
      auto s = source.component(j);
      auto pj = p.component(j);
      auto mj = mu.component(j);
      for (std::size_t i = 0; i < s.size(); ++i) s[i] += r * pj[i] - mj[i];
    }
    KrylovResult info;
    u = op.solve(op.rhs(spec.data.f_sharp(), source), u, config.krylov_tol, config.krylov_max_iters, &info);
    report.total_krylov_iterations += info.iterations;
    Du = frac_gradient(u, sigma);
    VectorField shifted = Du;
    for (int j = 0; j < spec.grid.dim(); ++j) {
      auto s = shifted.component(j);
      auto mj = mu.component(j);
      for (std::size_t i = 0; i < s.size(); ++i) s[i] += mj[i] / r;
    }
    VectorField p_prev = p;
    p = project(shifted, g);
    VectorField gap = Du - p;
    VectorField dmu = gap;
    dmu *= r;
    mu += dmu;

    double scale = std::max(l2_norm(Du), 1e-300);
    primal = l2_norm(gap) / scale;
    dual = r * l2_norm(p - p_prev) / std::max(scale * spec.coeffs.a_upper(), 1e-300);
    if (primal < config.pd_tol && dual < config.pd_tol) {
      converged = true;
      break;
    }
    // residual balancing; mu is unscaled so changing r needs no rescaling
    if (primal > 10.0 * dual) r *= 2.0;
    else if (dual > 10.0 * primal) r *= 0.5;
  }
  if (!converged)
    throw NonConvergence("primal-dual iteration hit the iteration limit", std::max(primal, dual));

  report.u = u;
  report.total_iterations = it;
  report.converged = true;
  report.eps_final = 0.0;
  report.energy_residual = std::max(primal, dual);

  ScalarField lambda(spec.grid);
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    double mag = Du.magnitude(i);
    if (mag > g[i] * (1.0 - config.active_tol) && mag > 0.0) {
      double m = 0.0;
      for (int j = 0; j < spec.grid.dim(); ++j) m += mu.component(j)[i] * mu.component(j)[i];
      lambda[i] = std::sqrt(m) / mag;
    }
  }
  PenaltySchedule schedule;
  schedule.krylov_tol = config.krylov_tol;
  schedule.krylov_max_iters = config.krylov_max_iters;
  PenalizedOptions options;
  options.seed = config.seed;
  options.c_star = config.c_star;
  finalize_report(report, spec, schedule, options, lambda);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace fracvi
