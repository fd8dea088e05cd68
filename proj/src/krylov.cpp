#include "fracvi/krylov.hpp"

#include <cmath>
#include <vector>

namespace fracvi {

namespace {

double residual_norm(const LinearMap& A, const ScalarField& b, const ScalarField& x, ScalarField& r) {
  A(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return l2_norm(r);
}

}  // namespace

KrylovResult conjugate_gradient(const LinearMap& A, const LinearMap& M, const ScalarField& b, ScalarField& x,
                                double tol, int max_iters) {
  KrylovResult result;
  const double bnorm = l2_norm(b);
  if (bnorm == 0.0) {
    x = ScalarField(b.grid());
    result.converged = true;
    return result;
  }
  ScalarField r(b.grid()), z(b.grid()), p(b.grid()), q(b.grid());
  double rnorm = residual_norm(A, b, x, r);
  // Restart from the true residual whenever the recurrence claims convergence
  // but the true residual disagrees.
  while (result.iterations < max_iters) {
    if (rnorm <= tol * bnorm) {
      result.converged = true;
      break;
    }
    M(r, z);
    p = z;
    double rz = inner(r, z);
    bool claimed = false;
    while (result.iterations < max_iters) {
      A(p, q);
      double pq = inner(p, q);
      if (!(pq > 0.0)) break;
      double alpha = rz / pq;
      x.axpy(alpha, p);
      r.axpy(-alpha, q);
      ++result.iterations;
      if (l2_norm(r) <= tol * bnorm) {
        claimed = true;
        break;
      }
      M(r, z);
      double rz_new = inner(r, z);
      double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
    }
    double previous = rnorm;
    rnorm = residual_norm(A, b, x, r);
    if (!claimed && rnorm >= previous) break;
  }
  result.relative_residual = rnorm / bnorm;
  result.converged = rnorm <= tol * bnorm;
  return result;
}

KrylovResult gmres(const LinearMap& A, const LinearMap& M, const ScalarField& b, ScalarField& x, double tol,
                   int max_iters, int restart) {
  KrylovResult result;
  const double bnorm = l2_norm(b);
  if (bnorm == 0.0) {
    x = ScalarField(b.grid());
    result.converged = true;
    return result;
  }
  const Grid& grid = b.grid();
  ScalarField r(grid), w(grid), z(grid);
  double rnorm = residual_norm(A, b, x, r);
  while (rnorm > tol * bnorm && result.iterations < max_iters) {
    std::vector<ScalarField> V;
    std::vector<std::vector<double>> H;  // H[j] is column j, length j + 2
    std::vector<double> cs, sn, g{rnorm};
    V.push_back(r);
    V.back() *= 1.0 / rnorm;
    int k = 0;
    for (; k < restart && result.iterations < max_iters; ++k) {
      M(V[k], z);
      A(z, w);
      std::vector<double> h(k + 2, 0.0);
      // modified Gram-Schmidt, twice for stability
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= k; ++i) {
          double c = inner(w, V[i]);
          h[i] += c;
          w.axpy(-c, V[i]);
        }
      h[k + 1] = l2_norm(w);
      for (int i = 0; i < k; ++i) {
        double t = cs[i] * h[i] + sn[i] * h[i + 1];
        h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
        h[i] = t;
      }
      double denom = std::hypot(h[k], h[k + 1]);
      double c = denom > 0.0 ? h[k] / denom : 1.0;
      double s = denom > 0.0 ? h[k + 1] / denom : 0.0;
      cs.push_back(c);
      sn.push_back(s);
      double hk1 = h[k + 1];
      h[k] = denom;
      h[k + 1] = 0.0;
      g.push_back(-s * g[k]);
      g[k] = c * g[k];
      H.push_back(std::move(h));
      ++result.iterations;
      bool done = std::abs(g[k + 1]) <= 0.5 * tol * bnorm || hk1 == 0.0;
      if (!done) {
        V.push_back(w);
        V.back() *= 1.0 / hk1;
      } else {
        ++k;
        break;
      }
    }
    // back substitution
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H[j][i] * y[j];
      y[i] = s / H[i][i];
    }
    ScalarField update(grid);
    for (int i = 0; i < k; ++i) update.axpy(y[i], V[i]);
    M(update, z);
    x += z;
    double previous = rnorm;
    rnorm = residual_norm(A, b, x, r);
    if (rnorm >= previous) break;
  }
  result.relative_residual = rnorm / bnorm;
  result.converged = rnorm <= tol * bnorm;
  return result;
}

}  // namespace fracvi
