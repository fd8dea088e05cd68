#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fracvi/fourier.hpp"
#include "fracvi/grid.hpp"

namespace fracvi {

/// Fractional order 0 < sigma <= 1; sigma = 1 is the classical gradient.
class FracOrder {
 public:
  FracOrder() = default;
  explicit FracOrder(double sigma);
  double value() const { return sigma_; }
  bool is_local() const { return sigma_ == 1.0; }
  operator double() const { return sigma_; }

 private:
  double sigma_ = 1.0;
};

/// Fourier multipliers of D^sigma and (-Delta)^sigma on one grid.
///
/// The gradient multiplier i 2 pi xi_j (2 pi |xi|)^(sigma-1) is purely
/// imaginary; only its real factor is stored. On the Nyquist line of axis j the
/// j-th factor is zeroed, since a single real mode there has no odd partner.
class SymbolTable {
 public:
  static std::shared_ptr<const SymbolTable> get(const Grid& grid, double sigma);

  SymbolTable(const Grid& grid, double sigma);

  const Grid& grid() const { return grid_; }
  double sigma() const { return sigma_; }
  const Fourier& fourier() const { return *fourier_; }
  /// m_j with multiplier = i m_j.
  std::span<const double> gradient(int j) const { return gradient_[j]; }
  /// (2 pi |xi|)^(2 sigma).
  std::span<const double> laplacian() const { return laplacian_; }
  /// Inverse of laplacian() with the zero mode mapped to the smallest nonzero
  /// symbol value, usable as a preconditioner.
  std::span<const double> laplacian_inverse() const { return laplacian_inverse_; }

 private:
  Grid grid_;
  double sigma_;
  const Fourier* fourier_;
  std::vector<double> gradient_[2];
  std::vector<double> laplacian_;
  std::vector<double> laplacian_inverse_;
};

VectorField frac_gradient(const ScalarField& u, double sigma);
ScalarField frac_divergence(const VectorField& F, double sigma);
ScalarField frac_laplacian(const ScalarField& u, double sigma);
/// Inverts frac_laplacian on zero-mean fields; the mean of u is discarded.
ScalarField frac_laplacian_inverse(const ScalarField& u, double sigma);
/// Spectral classical gradient, identical to frac_gradient(u, 1).
VectorField classical_gradient(const ScalarField& u);

/// gamma_{N,alpha} = Gamma((N-alpha)/2) / (pi^(N/2) 2^alpha Gamma(alpha/2)).
double riesz_constant(int dim, double alpha);

enum class RieszBackend { spectral, quadrature };

struct RieszResult {
  ScalarField field;
  /// Box mean of the input, removed by the spectral backend; 0 for quadrature.
  double dropped_mean = 0.0;
};

/// I_alpha * h for 0 < alpha < 1.
///
/// spectral: multiplier (2 pi |xi|)^(-alpha), zero mode set to 0.
/// quadrature: direct sum of gamma |x-y|^(alpha-N) h(y) h^N over all nodes
/// with h extended by zero outside the box (no periodization). The singular
/// self weight is -2 zeta(1-alpha) gamma h^alpha in 1D (the Navot correction
/// of the punctured rectangle rule) and the exact integral over the disk of
/// area h^2 in 2D. The sum itself is evaluated as a zero-padded linear
/// convolution.
RieszResult riesz_potential(const ScalarField& h, double alpha, RieszBackend backend = RieszBackend::spectral);

/// Weight multiplying h(x) itself in the quadrature sum at x.
double riesz_self_weight(const Grid& grid, double alpha);

/// Nodes whose coordinates all satisfy |x_i| <= half_width.
std::vector<std::uint8_t> centered_window(const Grid& grid, double half_width);

/// Relative l2 discrepancy between D^sigma u and I_{1-sigma} applied to the
/// spectral classical gradient of u. With a window, both sides are restricted
/// to it. sigma = 1 returns 0.
double check_identity_int1(const ScalarField& u, double sigma, RieszBackend backend = RieszBackend::spectral,
                           std::span<const std::uint8_t> window = {});

struct NormSuite {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double h_sigma = 0.0;
};

NormSuite norms(const ScalarField& field, double sigma);
/// ||D^sigma u||_2 alone.
double h_sigma_norm(const ScalarField& field, double sigma);

}  // namespace fracvi
