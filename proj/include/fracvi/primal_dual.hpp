#pragma once

#include <cstdint>

#include "fracvi/problem.hpp"
#include "fracvi/report.hpp"

namespace fracvi {

struct PrimalDualConfig {
  /// Initial augmentation parameter; <= 0 picks a_upper.
  double penalty = 0.0;
  double pd_tol = 1e-10;
  int max_iters = 50000;
  /// Multiplier recovered only where |D^sigma u| > g (1 - active_tol).
  double active_tol = 1e-3;
  double krylov_tol = 1e-11;
  int krylov_max_iters = 2000;
  std::uint64_t seed = 1;
  /// Reuse a measured Sobolev constant; <= 0 measures it.
  double c_star = 0.0;
};

/// Augmented-Lagrangian (ADMM) splitting of
///   min 1/2 int A Du.Du - <f', u>  subject to p = Du, |p| <= g,
/// with the u-step a shifted linear solve, the p-step the pointwise projection
/// onto the ball of radius g, and mu the dual variable of p = Du. Requires
/// symmetric A. Converged when both the primal residual ||Du - p|| and the
/// dual residual r ||p - p_prev|| fall below pd_tol relative to ||Du||.
SolveReport solve_primal_dual(const ProblemSpec& spec, const PrimalDualConfig& config = {});

}  // namespace fracvi
