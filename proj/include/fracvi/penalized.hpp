#pragma once

#include <cstdint>
#include <optional>

#include "fracvi/krylov.hpp"
#include "fracvi/problem.hpp"
#include "fracvi/report.hpp"

namespace fracvi {

/// k_eps(t): 0 for t <= 0, t/eps up to t = 1/eps, then the cap 1/eps^2.
double penalty_k(double t, double eps);
/// Derivative of k_eps away from its two kinks (1/eps inside, 0 outside).
double penalty_k_derivative(double t, double eps);
/// Phi_eps(t) = int_0^t k_eps, so that d/dp (Phi_eps(|p|^2 - g^2) / 2) = k_eps p.
double penalty_primitive(double t, double eps);

/// -D^sigma . (B D^sigma u) restricted to Omega, with the pointwise matrix
/// B = A + kappa I + w d d^T. Every application masks its input and output.
class DiscreteOperator {
 public:
  DiscreteOperator(const DomainMask& mask, const Coefficients& coeffs, double sigma);

  void set_kappa(ScalarField kappa) { kappa_ = std::move(kappa); }
  void set_shift(double shift) { shift_ = shift; }
  void set_rank_one(VectorField direction, ScalarField weight);

  const DomainMask& mask() const { return *mask_; }
  double sigma() const { return sigma_; }
  bool symmetric() const { return coeffs_->symmetric(); }

  /// B p at every node.
  VectorField flux(const VectorField& p) const;
  void apply(const ScalarField& u, ScalarField& out) const;
  ScalarField apply(const ScalarField& u) const;
  /// Omega-masked P (-Delta)^-sigma P.
  void precondition(const ScalarField& r, ScalarField& z) const;
  /// P[f_sharp - D^sigma . vec] for a scalar source and a vector source.
  ScalarField rhs(const ScalarField& f_sharp, const VectorField& vec) const;

  /// CG for symmetric B, GMRES otherwise; throws NonConvergence.
  ScalarField solve(const ScalarField& rhs, const ScalarField& guess, double tol, int max_iters,
                    KrylovResult* info = nullptr) const;

 private:
  const DomainMask* mask_;
  const Coefficients* coeffs_;
  double sigma_;
  std::shared_ptr<const SymbolTable> table_;
  ScalarField kappa_;
  double shift_ = 0.0;
  VectorField direction_;
  ScalarField weight_;
};

/// Omega-masked -D^sigma . ((A + kappa I) D^sigma u).
ScalarField apply_operator(const ScalarField& u, const ProblemSpec& spec, const ScalarField& kappa);
/// Right side P[f_sharp - D^sigma . f] of the discrete equation.
ScalarField assemble_rhs(const ProblemSpec& spec);

struct LinearSolveOptions {
  double tol = 1e-10;
  int max_iters = 2000;
};

ScalarField solve_linear(const ProblemSpec& spec, const ScalarField& kappa, const ScalarField& rhs,
                         const LinearSolveOptions& options = {}, KrylovResult* info = nullptr);

/// lambda_eps = k_eps(|D^sigma u|^2 - g^2) at every node.
ScalarField extract_multiplier(const ScalarField& u_eps, const ProblemSpec& spec, double eps);

struct GammaResult {
  ScalarField gamma;
  double residual = 0.0;
};

/// gamma in Omega with int D gamma . D v = <f', v> - int A D u . D v.
GammaResult compute_gamma(const ProblemSpec& spec, const ScalarField& u, const LinearSolveOptions& options = {});

struct PenalizedOptions {
  std::uint64_t seed = 1;
  /// Overrides the unconstrained initial guess.
  std::optional<ScalarField> initial_guess;
  /// Negative-control hook: adds 1 to k_eps everywhere, so the multiplier no
  /// longer vanishes off the active set.
  bool corrupt_penalty = false;
  /// Skip C_* measurement and the a-priori checks (used inside studies that
  /// assemble their own). c_star <= 0 measures it.
  double c_star = 0.0;
};

/// Discrete energy 1/2 int A Du.Du + 1/2 int Phi_eps(|Du|^2 - g^2) - <f', u>;
/// eps <= 0 drops the penalty term.
double penalized_energy(const ProblemSpec& spec, const ScalarField& u, double eps);

SolveReport solve_penalized(const ProblemSpec& spec, const PenaltySchedule& schedule,
                            const PenalizedOptions& options = {});

/// C_sigma = (C_* ||f_sharp||_{2#} + ||f||_2) / a_*.
double solution_bound(const ProblemSpec& spec, double c_star);

/// Fills the norms, the multiplier, Lambda, gamma, the bound constants and
/// the a-priori checks of a report whose u and levels are set.
void finalize_report(SolveReport& report, const ProblemSpec& spec, const PenaltySchedule& schedule,
                     const PenalizedOptions& options, const ScalarField& multiplier);

}  // namespace fracvi
