#include "fracvi/penalized.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fracvi/constants.hpp"
#include "fracvi/errors.hpp"
#include "fracvi/random_fields.hpp"

namespace fracvi {

double penalty_k(double t, double eps) {
  if (t <= 0.0) return 0.0;
  return std::min(t / eps, 1.0 / (eps * eps));
}

double penalty_k_derivative(double t, double eps) { return t > 0.0 && t < 1.0 / eps ? 1.0 / eps : 0.0; }

double penalty_primitive(double t, double eps) {
  if (t <= 0.0) return 0.0;
  if (t <= 1.0 / eps) return t * t / (2.0 * eps);
  return 1.0 / (2.0 * eps * eps * eps) + (t - 1.0 / eps) / (eps * eps);
}

// ---------------------------------------------------------------------------

DiscreteOperator::DiscreteOperator(const DomainMask& mask, const Coefficients& coeffs, double sigma)
    : mask_(&mask), coeffs_(&coeffs), sigma_(sigma), table_(SymbolTable::get(mask.grid(), sigma)) {}

void DiscreteOperator::set_rank_one(VectorField direction, ScalarField weight) {
  direction_ = std::move(direction);
  weight_ = std::move(weight);
}

VectorField DiscreteOperator::flux(const VectorField& p) const {
  VectorField q = coeffs_->apply(p);
  const Grid& grid = mask_->grid();
  const int d = grid.dim();
  const bool has_kappa = kappa_.size() == grid.size();
  const bool has_rank_one = weight_.size() == grid.size();
  if (!has_kappa && !has_rank_one && shift_ == 0.0) return q;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double iso = shift_ + (has_kappa ? kappa_[i] : 0.0);
    double proj = 0.0;
    if (has_rank_one && weight_[i] != 0.0) {
      for (int j = 0; j < d; ++j) proj += direction_.component(j)[i] * p.component(j)[i];
      proj *= weight_[i];
    }
    for (int j = 0; j < d; ++j) {
      double extra = iso * p.component(j)[i];
      if (proj != 0.0) extra += proj * direction_.component(j)[i];
      q.component(j)[i] += extra;
    }
  }
  return q;
}

void DiscreteOperator::apply(const ScalarField& u, ScalarField& out) const {
  ScalarField in = masked(u, *mask_);
  out = frac_divergence(flux(frac_gradient(in, sigma_)), sigma_);
  out *= -1.0;
  apply_mask(out, *mask_);
}

ScalarField DiscreteOperator::apply(const ScalarField& u) const {
  ScalarField out;
  apply(u, out);
  return out;
}

void DiscreteOperator::precondition(const ScalarField& r, ScalarField& z) const {
  const Fourier& fft = table_->fourier();
  std::vector<Complex> spec(fft.spectrum_size());
  ScalarField in = masked(r, *mask_);
  fft.forward(in.values(), spec);
  auto inv = table_->laplacian_inverse();
  for (std::size_t s = 0; s < spec.size(); ++s) spec[s] *= inv[s];
  z = ScalarField(r.grid());
  fft.inverse(spec, z.values());
  apply_mask(z, *mask_);
}

ScalarField DiscreteOperator::rhs(const ScalarField& f_sharp, const VectorField& vec) const {
  ScalarField out = frac_divergence(vec, sigma_);
  out *= -1.0;
  out += f_sharp;
  apply_mask(out, *mask_);
  return out;
}

ScalarField DiscreteOperator::solve(const ScalarField& rhs, const ScalarField& guess, double tol, int max_iters,
                                    KrylovResult* info) const {
  LinearMap A = [this](const ScalarField& in, ScalarField& out) { apply(in, out); };
  LinearMap M = [this](const ScalarField& in, ScalarField& out) { precondition(in, out); };
  ScalarField x = masked(guess, *mask_);
  KrylovResult result = symmetric() ? conjugate_gradient(A, M, rhs, x, tol, max_iters)
                                    : gmres(A, M, rhs, x, tol, max_iters);
  if (info) *info = result;
  if (!result.converged)
    throw NonConvergence("Krylov solve did not reach tolerance, relative residual " +
                             format_number(result.relative_residual),
                         result.relative_residual);
  apply_mask(x, *mask_);
  return x;
}

// ---------------------------------------------------------------------------

ScalarField apply_operator(const ScalarField& u, const ProblemSpec& spec, const ScalarField& kappa) {
  DiscreteOperator op(spec.mask, spec.coeffs, spec.sigma);
  op.set_kappa(kappa);
  return op.apply(u);
}

ScalarField assemble_rhs(const ProblemSpec& spec) {
  DiscreteOperator op(spec.mask, spec.coeffs, spec.sigma);
  return op.rhs(spec.data.f_sharp(), spec.data.f_vec());
}

ScalarField solve_linear(const ProblemSpec& spec, const ScalarField& kappa, const ScalarField& rhs,
                         const LinearSolveOptions& options, KrylovResult* info) {
  for (double k : kappa.values())
    if (k < 0.0) throw ValidationError("penalty coefficient must be nonnegative");
  DiscreteOperator op(spec.mask, spec.coeffs, spec.sigma);
  op.set_kappa(kappa);
  return op.solve(rhs, ScalarField(spec.grid), options.tol, options.max_iters, info);
}

namespace {

ScalarField constraint_excess(const VectorField& p, const ScalarField& g) {
  ScalarField t(g.grid());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = p.magnitude_squared(i) - g[i] * g[i];
  return t;
}

ScalarField multiplier_from(const VectorField& p, const ScalarField& g, double eps, bool corrupt) {
  ScalarField t = constraint_excess(p, g);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = penalty_k(t[i], eps) + (corrupt ? 1.0 : 0.0);
  return t;
}

}  // namespace

ScalarField extract_multiplier(const ScalarField& u_eps, const ProblemSpec& spec, double eps) {
  return multiplier_from(frac_gradient(u_eps, spec.sigma), spec.obstacle.g(), eps, false);
}

GammaResult compute_gamma(const ProblemSpec& spec, const ScalarField& u, const LinearSolveOptions& options) {
  Coefficients identity = Coefficients::identity(spec.grid);
  DiscreteOperator laplace(spec.mask, identity, spec.sigma);
  // P[f_sharp - D.(f - A Du)]
  VectorField vec = spec.data.f_vec() - spec.coeffs.apply(frac_gradient(masked(u, spec.mask), spec.sigma));
  ScalarField rhs = laplace.rhs(spec.data.f_sharp(), vec);
  GammaResult result;
  KrylovResult info;
  result.gamma = laplace.solve(rhs, ScalarField(spec.grid), options.tol, options.max_iters, &info);
  result.residual = info.relative_residual;
  return result;
}

double penalized_energy(const ProblemSpec& spec, const ScalarField& u, double eps) {
  VectorField p = frac_gradient(u, spec.sigma);
  VectorField Ap = spec.coeffs.apply(p);
  const ScalarField& g = spec.obstacle.g();
  std::vector<double> density(spec.grid.size());
  const int d = spec.grid.dim();
  for (std::size_t i = 0; i < density.size(); ++i) {
    double quad = 0.0, lin = 0.0;
    for (int j = 0; j < d; ++j) {
      quad += Ap.component(j)[i] * p.component(j)[i];
      lin += spec.data.f_vec().component(j)[i] * p.component(j)[i];
    }
    double t = p.magnitude_squared(i) - g[i] * g[i];
    double pen = eps > 0.0 ? 0.5 * penalty_primitive(t, eps) : 0.0;
    density[i] = 0.5 * quad + pen - lin - spec.data.f_sharp()[i] * u[i];
  }
  return pairwise_sum(density) * spec.grid.cell_volume();
}

double solution_bound(const ProblemSpec& spec, double c_star) {
  auto ex = sobolev_exponents(spec.grid.dim(), spec.sigma);
  return (c_star * lp_norm(spec.data.f_sharp(), ex.sharp) + spec.data.f_vec_l2()) / spec.coeffs.a_star();
}

namespace {

struct PenaltyState {
  VectorField p;
  ScalarField kappa;
  ScalarField slope;  // k'
};

PenaltyState penalty_state(const ProblemSpec& spec, const ScalarField& u, double eps, bool corrupt) {
  PenaltyState s;
  s.p = frac_gradient(u, spec.sigma);
  ScalarField t = constraint_excess(s.p, spec.obstacle.g());
  s.kappa = ScalarField(spec.grid);
  s.slope = ScalarField(spec.grid);
  for (std::size_t i = 0; i < t.size(); ++i) {
    s.kappa[i] = penalty_k(t[i], eps) + (corrupt ? 1.0 : 0.0);
    s.slope[i] = penalty_k_derivative(t[i], eps);
  }
  return s;
}

// ||P[-D.((A + k(u)) Du)] - F|| / ||F||
double equation_residual(const ProblemSpec& spec, const ScalarField& u, double eps, bool corrupt,
                         const ScalarField& F) {
  PenaltyState s = penalty_state(spec, u, eps, corrupt);
  DiscreteOperator op(spec.mask, spec.coeffs, spec.sigma);
  op.set_kappa(s.kappa);
  ScalarField r = op.apply(u);
  r -= F;
  double fn = l2_norm(F);
  return fn > 0.0 ? l2_norm(r) / fn : l2_norm(r);
}

double relative_change(const ScalarField& next, const ScalarField& prev, double sigma) {
  double diff = h_sigma_norm(next - prev, sigma);
  double ref = h_sigma_norm(next, sigma);
  return ref > 0.0 ? diff / ref : diff;
}

LevelRecord level_diagnostics(const ProblemSpec& spec, const ScalarField& u, double eps, bool corrupt,
                              const std::vector<VectorField>& panel_grads, const std::vector<ScalarField>& panel) {
  LevelRecord rec;
  rec.eps = eps;
  VectorField p = frac_gradient(u, spec.sigma);
  const ScalarField& g = spec.obstacle.g();
  ScalarField lambda = multiplier_from(p, g, eps, corrupt);
  const double vol = spec.grid.cell_volume();
  const double threshold = std::sqrt(eps);
  std::size_t bad = 0;
  std::vector<double> comp(u.size()), comp_abs(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double mag = p.magnitude(i);
    rec.violation_sup = std::max(rec.violation_sup, mag - g[i]);
    if (mag * mag - g[i] * g[i] > threshold) ++bad;
    comp[i] = lambda[i] * (g[i] - mag);
    comp_abs[i] = std::abs(comp[i]);
  }
  rec.violation_sup = std::max(rec.violation_sup, 0.0);
  rec.bad_set_measure = static_cast<double>(bad) * vol;
  rec.complementarity = pairwise_sum(comp) * vol;
  rec.complementarity_abs = pairwise_sum(comp_abs) * vol;
  rec.multiplier_l1 = l1_norm(lambda);
  rec.h_sigma = l2_norm(p);
  rec.energy = penalized_energy(spec, u, eps);
  VectorField Lambda = lambda * p;
  for (std::size_t k = 0; k < panel.size(); ++k) {
    rec.pairings.push_back(inner(Lambda, panel_grads[k]));
    rec.multiplier_pairings.push_back(inner(lambda, panel[k]));
  }
  return rec;
}

}  // namespace

void finalize_report(SolveReport& report, const ProblemSpec& spec, const PenaltySchedule& schedule,
                     const PenalizedOptions& options, const ScalarField& multiplier) {
  const double sigma = spec.sigma;
  report.sigma = sigma;
  report.seed = options.seed;
  report.grad_u = frac_gradient(report.u, sigma);
  report.lambda_eps = multiplier;
  report.Lambda = report.lambda_eps * report.grad_u;
  LinearSolveOptions lin{schedule.krylov_tol, schedule.krylov_max_iters};
  GammaResult gamma = compute_gamma(spec, report.u, lin);
  report.gamma = gamma.gamma;
  report.gamma_residual = gamma.residual;
  report.u_norms = norms(report.u, sigma);
  report.lambda_norms = norms(report.lambda_eps, sigma);
  report.gamma_norms = norms(report.gamma, sigma);
  report.Lambda_l1 = l1_norm(report.Lambda);

  const ScalarField& g = spec.obstacle.g();
  const double vol = spec.grid.cell_volume();
  std::vector<double> comp(report.u.size()), comp_abs(report.u.size());
  report.constraint_violation_sup = 0.0;
  for (std::size_t i = 0; i < report.u.size(); ++i) {
    double mag = report.grad_u.magnitude(i);
    report.constraint_violation_sup = std::max(report.constraint_violation_sup, mag - g[i]);
    comp[i] = report.lambda_eps[i] * (g[i] - mag);
    comp_abs[i] = std::abs(comp[i]);
  }
  report.complementarity_residual = pairwise_sum(comp) * vol;
  report.complementarity_abs = pairwise_sum(comp_abs) * vol;
  report.energy = penalized_energy(spec, report.u, report.eps_final);

  auto ex = sobolev_exponents(spec.grid.dim(), sigma);
  report.c_star = options.c_star > 0.0 ? options.c_star : measure_c_star(spec.mask, sigma, options.seed);
  report.c_sigma = solution_bound(spec, report.c_star);
  report.f_sharp_norm = lp_norm(spec.data.f_sharp(), ex.sharp);
  report.f_vec_l1 = spec.data.f_vec_l1();
  report.f_vec_l2 = spec.data.f_vec_l2();
  report.g_star = spec.obstacle.g_star();
  report.g_upper = spec.obstacle.g_upper();
  report.a_star = spec.coeffs.a_star();
  report.a_upper = spec.coeffs.a_upper();

  bool nonnegative = true;
  for (double v : report.lambda_eps.values())
    if (!(v >= 0.0)) nonnegative = false;
  report.checks.push_back(EstimateCheck::condition("multiplier_nonnegative", nonnegative));

  const double c1 = report.a_star * report.c_sigma * report.c_sigma / 2.0;
  double max_h = report.u_norms.h_sigma, max_l1 = report.lambda_norms.l1;
  for (const auto& lv : report.levels) {
    max_h = std::max(max_h, lv.h_sigma);
    max_l1 = std::max(max_l1, lv.multiplier_l1);
  }
  report.checks.push_back(EstimateCheck::make("solution_bound_all_levels", max_h, report.c_sigma));
  report.checks.push_back(
      EstimateCheck::make("multiplier_l1_bound_all_levels", max_l1, c1 / (report.g_star * report.g_star)));
  report.checks.push_back(EstimateCheck::make("complementarity", report.complementarity_abs,
                                              1e-5 * report.lambda_norms.l1 * report.g_upper));
}

SolveReport solve_penalized(const ProblemSpec& spec, const PenaltySchedule& schedule,
                            const PenalizedOptions& options) {
  spec.validate();
  schedule.validate();
  auto start = std::chrono::steady_clock::now();
  const double sigma = spec.sigma;
  const bool corrupt = options.corrupt_penalty;
  const bool newton = schedule.linearization == Linearization::newton;
  const bool symmetric = spec.coeffs.symmetric();
  SolveReport report;
  report.solver = sigma == 1.0 ? "penalized_local" : "penalized";

  DiscreteOperator base(spec.mask, spec.coeffs, sigma);
  const ScalarField F = base.rhs(spec.data.f_sharp(), spec.data.f_vec());
  const double f_norm = l2_norm(F);
  KrylovResult info;
  ScalarField u = options.initial_guess ? masked(*options.initial_guess, spec.mask)
                                        : base.solve(F, ScalarField(spec.grid), schedule.krylov_tol,
                                                     schedule.krylov_max_iters, &info);
  report.total_krylov_iterations += info.iterations;

  std::vector<ScalarField> panel = test_panel(spec.mask);
  std::vector<VectorField> panel_grads;
  for (const auto& v : panel) panel_grads.push_back(frac_gradient(v, sigma));

  for (int level = 0; level < schedule.levels; ++level) {
    const double eps = schedule.epsilon(level);
    double damping = schedule.effective_damping();
    int krylov_total = 0;
    bool converged = false;
    int it = 0;
    auto merit = [&](const ScalarField& v) {
      return symmetric && !corrupt ? penalized_energy(spec, v, eps) : equation_residual(spec, v, eps, corrupt, F);
    };
    double current = merit(u);
    for (it = 1; it <= schedule.picard_max_iters; ++it) {
      PenaltyState s = penalty_state(spec, u, eps, corrupt);
      DiscreteOperator op(spec.mask, spec.coeffs, sigma);
      op.set_kappa(s.kappa);
      // Correction form: B d = F - L_eps u. The residual only involves kappa,
      // never the 1/eps slope, so it stays accurate as eps shrinks.
      ScalarField residual = F - op.apply(u);
      if (newton) {
        ScalarField weight(spec.grid);
        for (std::size_t i = 0; i < weight.size(); ++i) weight[i] = 2.0 * s.slope[i];
        op.set_rank_one(s.p, weight);
      }
      // Inexact Newton: the correction only has to bring the residual down to
      // krylov_tol relative to F, never tighter than that in absolute terms.
      const double r_norm = l2_norm(residual);
      const double tol = r_norm > 0.0 ? std::clamp(schedule.krylov_tol * f_norm / r_norm, schedule.krylov_tol, 0.1)
                                      : schedule.krylov_tol;
      ScalarField direction;
      try {
        direction = op.solve(residual, ScalarField(spec.grid), tol, schedule.krylov_max_iters, &info);
      } catch (const NonConvergence& e) {
        throw NonConvergence(std::string(e.what()) + " at penalty level " + std::to_string(level), e.residual(),
                             level);
      }
      krylov_total += info.iterations;
      ScalarField proposal = u + direction;

      // Backtrack on the merit function (energy for symmetric A, equation
      // residual otherwise).
      double step = damping;
      ScalarField trial;
      double trial_merit = 0.0;
      bool accepted = false;
      for (int halving = 0; halving < 40; ++halving) {
        trial = u;
        trial.axpy(step, direction);
        trial_merit = merit(trial);
        if (trial_merit <= current + 1e-13 * std::abs(current) + 1e-300) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      double full_change = relative_change(proposal, u, sigma);
      if (!accepted && symmetric && !corrupt) {
        // Near the solution the energy decrease drops below its rounding
        // level; fall back to the equation residual for the full step.
        double r_old = equation_residual(spec, u, eps, corrupt, F);
        double r_new = equation_residual(spec, proposal, eps, corrupt, F);
        if (r_new < 0.5 * r_old) {
          trial = proposal;
          trial_merit = merit(trial);
          accepted = true;
        }
      }
      if (!accepted) {
        // No decrease is possible at working precision: accept only if the
        // proposed step is already negligible.
        if (full_change < std::sqrt(schedule.picard_tol)) {
          converged = true;
          break;
        }
        throw NonConvergence("penalized iteration stalled at level " + std::to_string(level), full_change, level);
      }
      if (!newton && step < damping) damping = step;
      double change = relative_change(trial, u, sigma);
      u = std::move(trial);
      current = trial_merit;
      if (change < schedule.picard_tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      double res = equation_residual(spec, u, eps, corrupt, F);
      throw NonConvergence("penalized iteration hit the iteration limit at level " + std::to_string(level), res,
                           level);
    }
    LevelRecord rec = level_diagnostics(spec, u, eps, corrupt, panel_grads, panel);
    rec.outer_iterations = std::min(it, schedule.picard_max_iters);
    rec.krylov_iterations = krylov_total;
    rec.equation_residual = equation_residual(spec, u, eps, corrupt, F);
    report.total_iterations += rec.outer_iterations;
    report.total_krylov_iterations += krylov_total;
    report.levels.push_back(std::move(rec));
  }

  report.u = u;
  report.eps_final = schedule.eps_final();
  report.energy_residual = report.levels.back().equation_residual;
  report.converged = true;
  ScalarField lambda = multiplier_from(frac_gradient(u, sigma), spec.obstacle.g(), report.eps_final, corrupt);
  finalize_report(report, spec, schedule, options, lambda);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace fracvi
