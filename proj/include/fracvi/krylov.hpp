#pragma once

#include <functional>

#include "fracvi/grid.hpp"

namespace fracvi {

/// out = Op(in). Implementations must not alias in and out.
using LinearMap = std::function<void(const ScalarField& in, ScalarField& out)>;

struct KrylovResult {
  int iterations = 0;
  /// True residual ||b - A x|| / ||b|| at exit.
  double relative_residual = 0.0;
  bool converged = false;
};

/// Preconditioned conjugate gradients for symmetric positive A and M. x holds
/// the initial guess on entry. Convergence is judged on the true residual.
KrylovResult conjugate_gradient(const LinearMap& A, const LinearMap& M, const ScalarField& b, ScalarField& x,
                                double tol, int max_iters);

/// Right-preconditioned restarted GMRES(restart); the minimized residual is
/// the true residual of the original system.
KrylovResult gmres(const LinearMap& A, const LinearMap& M, const ScalarField& b, ScalarField& x, double tol,
                   int max_iters, int restart = 60);

}  // namespace fracvi
