#include <cmath>

#include "doctest.h"
#include "fracvi/errors.hpp"
#include "fracvi/grid.hpp"
#include "fracvi/random_fields.hpp"
#include "fracvi/riesz.hpp"

using namespace fracvi;

namespace {

double rel_l2(const ScalarField& a, const ScalarField& b) { return l2_norm(a - b) / l2_norm(b); }

ScalarField gaussian(const Grid& g) {
  return ScalarField::from_function(g, [](double x, double y) { return std::exp(-(x * x + y * y)); });
}

// Narrow enough to vanish to rounding at the edge of the unit domain, so its
// spectrum is negligible on the Nyquist line.
ScalarField narrow_bump(const DomainMask& mask) {
  ScalarField u = ScalarField::from_function(mask.grid(), [](double x, double y) {
    return std::exp(-36.0 * (x * x + y * y));
  });
  return masked(u, mask);
}

}  // namespace

TEST_CASE("frac_gradient of zero") {
  Grid g = make_grid(2, 16, 1.0);
  VectorField F = frac_gradient(ScalarField(g), 0.4);
  CHECK(linf_norm(F) == 0.0);
}

TEST_CASE("frac_gradient of a sine mode") {
  double L = 3.0;
  Grid g = make_grid(1, 128, L);
  double k = 2 * M_PI / (2 * L);
  ScalarField u = ScalarField::from_function(g, [&](double x, double) { return std::sin(k * x); });
  for (double sigma : {0.25, 0.5, 0.8, 1.0}) {
    ScalarField expected = ScalarField::from_function(g, [&](double x, double) {
      return std::pow(k, sigma) * std::cos(k * x);
    });
    ScalarField got(g, frac_gradient(u, sigma).component_data(0));
    CHECK(rel_l2(got, expected) < 1e-12);
  }
}

TEST_CASE("sigma = 1 is the spectral gradient") {
  Grid g = make_grid(2, 32, 2.0);
  ScalarField u = gaussian(g);
  VectorField a = frac_gradient(u, 1.0), b = classical_gradient(u);
  CHECK(a.component_data(0) == b.component_data(0));
  CHECK(a.component_data(1) == b.component_data(1));
}

TEST_CASE("divergence of the gradient is minus the fractional Laplacian") {
  for (int dim : {1, 2}) {
    Grid g = make_grid(dim, dim == 1 ? 256 : 128, 2.0);
    DomainMask mask = dim == 1 ? DomainMask::interval(g, 1.0) : DomainMask::disk(g, 1.0);
    ScalarField u = narrow_bump(mask);
    for (double sigma : {0.3, 0.7, 1.0}) {
      ScalarField lhs = -1.0 * frac_divergence(frac_gradient(u, sigma), sigma);
      ScalarField rhs = frac_laplacian(u, sigma);
      CHECK(rel_l2(lhs, rhs) < 1e-12);
    }
  }
}

TEST_CASE("adjointness of gradient and divergence") {
  Grid g = make_grid(2, 64, 2.0);
  DomainMask mask = DomainMask::disk(g, 1.0);
  RandomFields rf(23);
  ScalarField u = rf.smooth(mask);
  VectorField F = rf.smooth_vector(g);
  for (double sigma : {0.4, 0.9}) {
    double lhs = inner(frac_divergence(F, sigma), u);
    double rhs = -inner(F, frac_gradient(u, sigma));
    CHECK(std::abs(lhs - rhs) <= 1e-11 * std::abs(rhs));
  }
}

TEST_CASE("frac_gradient is homogeneous") {
  Grid g = make_grid(1, 64, 2.0);
  ScalarField u = gaussian(g);
  VectorField a = frac_gradient(2.5 * u, 0.6);
  VectorField b = frac_gradient(u, 0.6);
  b *= 2.5;
  CHECK(l2_norm(a - b) <= 1e-14 * l2_norm(b));
}

TEST_CASE("fractional Laplacian symbol on a mode") {
  double L = 2.0;
  Grid g = make_grid(1, 64, L);
  double k = 2 * M_PI * 5 / (2 * L);
  ScalarField u = ScalarField::from_function(g, [&](double x, double) { return std::cos(k * x); });
  CHECK(rel_l2(frac_laplacian(u, 1.0), k * k * u) < 1e-12);
  CHECK(rel_l2(frac_laplacian(u, 0.35), std::pow(k, 0.7) * u) < 1e-12);
}

TEST_CASE("inverse Laplacian on zero-mean fields") {
  Grid g = make_grid(2, 32, 1.0);
  RandomFields rf(29);
  ScalarField u = rf.bounded(g);
  double mean = integrate(u) / (4.0);
  for (auto& v : u.data()) v -= mean;
  for (double sigma : {0.5, 1.0}) {
    ScalarField back = frac_laplacian(frac_laplacian_inverse(u, sigma), sigma);
    CHECK(rel_l2(back, u) < 1e-11);
  }
}

TEST_CASE("Riesz potential scales a mode") {
  double L = 2.0;
  Grid g = make_grid(1, 64, L);
  double k = 2 * M_PI * 3 / (2 * L);
  ScalarField u = ScalarField::from_function(g, [&](double x, double) { return std::sin(k * x); });
  for (double alpha : {0.2, 0.6}) {
    RieszResult r = riesz_potential(u, alpha);
    CHECK(rel_l2(r.field, std::pow(k, -alpha) * u) < 1e-12);
    CHECK(std::abs(r.dropped_mean) < 1e-14);
  }
}

TEST_CASE("Riesz potential rejects alpha outside (0, 1)") {
  Grid g = make_grid(1, 32, 1.0);
  ScalarField u(g, 1.0);
  CHECK_THROWS_AS(riesz_potential(u, 0.0), ValidationError);
  CHECK_THROWS_AS(riesz_potential(u, 1.0), ValidationError);
  CHECK_THROWS_AS(riesz_potential(u, 1.5, RieszBackend::quadrature), ValidationError);
}

TEST_CASE("Riesz constant") {
  double a = 0.5;
  double expected = std::tgamma(0.25) / (std::sqrt(M_PI) * std::sqrt(2.0) * std::tgamma(0.25));
  CHECK(riesz_constant(1, a) == doctest::Approx(expected).epsilon(1e-14));
  double e2 = std::tgamma(0.75) / (M_PI * std::sqrt(2.0) * std::tgamma(0.25));
  CHECK(riesz_constant(2, a) == doctest::Approx(e2).epsilon(1e-14));
}

TEST_CASE("semigroup identity in the spectral backend") {
  Grid g = make_grid(1, 256, 4.0);
  ScalarField u = gaussian(g);
  CHECK(check_identity_int1(u, 0.6) < 1e-12);
  CHECK(check_identity_int1(u, 1.0) == 0.0);
  Grid g2 = make_grid(2, 32, 3.0);
  CHECK(check_identity_int1(gaussian(g2), 0.5) < 1e-12);
}

TEST_CASE("semigroup identity against the quadrature backend") {
  Grid g = make_grid(1, 1024, 8.0);
  ScalarField u = gaussian(g);
  auto window = centered_window(g, 2.0);
  CHECK(check_identity_int1(u, 0.7, RieszBackend::quadrature, window) < 5e-3);
  CHECK(check_identity_int1(u, 0.5, RieszBackend::quadrature, window) < 5e-3);
}

TEST_CASE("Riesz backends agree on a Gaussian") {
  // the periodic image sum decays slowly in L, so the box is wider here
  Grid g = make_grid(1, 1024, 16.0);
  ScalarField h = gaussian(g);
  auto window = centered_window(g, 2.0);
  for (double alpha : {0.3, 0.5, 0.7}) {
    RieszResult s = riesz_potential(h, alpha, RieszBackend::spectral);
    RieszResult q = riesz_potential(h, alpha, RieszBackend::quadrature);
    // the spectral backend drops the zero mode, which shifts the potential by
    // a constant; compare after removing the window means
    double ms = 0.0, mq = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (window[i]) {
        ms += s.field[i];
        mq += q.field[i];
        ++count;
      }
    ms /= count;
    mq /= count;
    double diff = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (window[i]) {
        double a = s.field[i] - ms, b = q.field[i] - mq;
        diff += (a - b) * (a - b);
        ref += b * b;
      }
    CHECK(std::sqrt(diff / ref) < 2e-3);
  }
}

TEST_CASE("quadrature self weight uses the zeta correction") {
  Grid g = make_grid(1, 64, 1.0);
  double alpha = 0.5;
  double zeta = -1.4603545088095868;  // zeta(1/2)
  double expected = -2.0 * zeta * riesz_constant(1, alpha) * std::pow(g.spacing(), alpha);
  CHECK(riesz_self_weight(g, alpha) == doctest::Approx(expected).epsilon(1e-12));
}
