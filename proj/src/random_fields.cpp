#include "fracvi/random_fields.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "fracvi/errors.hpp"

namespace fracvi {

double inscribed_radius(const DomainMask& mask) {
  const Grid& grid = mask.grid();
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (mask.contains(i)) continue;
    auto x = grid.node_position(i);
    r = std::min(r, std::hypot(x[0], x[1]));
  }
  return r;
}

ScalarField smooth_cutoff(const DomainMask& mask) {
  const double rho = 0.98 * inscribed_radius(mask);
  if (!(rho > 0.0)) throw ValidationError("domain does not contain a ball around the origin");
  ScalarField out = ScalarField::from_function(mask.grid(), [rho](double x, double y) {
    double s2 = (x * x + y * y) / (rho * rho);
    return s2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s2)) : 0.0;
  });
  apply_mask(out, mask);
  return out;
}

double RandomFields::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

ScalarField RandomFields::smooth(const DomainMask& mask, int modes) {
  const Grid& grid = mask.grid();
  const double rho = inscribed_radius(mask);
  ScalarField wave(grid);
  for (int m = 0; m < modes; ++m) {
    double amp = uniform(-1.0, 1.0) / (1.0 + m);
    double kx = uniform(-1.0, 1.0) * (m + 1) * std::numbers::pi / rho;
    double ky = grid.dim() == 2 ? uniform(-1.0, 1.0) * (m + 1) * std::numbers::pi / rho : 0.0;
    double phase = uniform(0.0, 2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto x = grid.node_position(i);
      wave[i] += amp * std::cos(kx * x[0] + ky * x[1] + phase);
    }
  }
  ScalarField cut = smooth_cutoff(mask);
  for (std::size_t i = 0; i < grid.size(); ++i) wave[i] *= cut[i];
  double peak = linf_norm(wave);
  if (peak > 0.0) wave *= 1.0 / peak;
  return wave;
}

VectorField RandomFields::smooth_vector(const Grid& grid, int modes) {
  VectorField out(grid);
  const double L = grid.half_length();
  for (int j = 0; j < grid.dim(); ++j) {
    auto c = out.component(j);
    for (int m = 0; m < modes; ++m) {
      double amp = uniform(-1.0, 1.0) / (1.0 + m);
      int k0 = static_cast<int>(uniform(-3.0, 3.0) * (m + 1));
      int k1 = grid.dim() == 2 ? static_cast<int>(uniform(-3.0, 3.0) * (m + 1)) : 0;
      double phase = uniform(0.0, 2.0 * std::numbers::pi);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        auto x = grid.node_position(i);
        c[i] += amp * std::cos(std::numbers::pi * (k0 * x[0] + k1 * x[1]) / L + phase);
      }
    }
  }
  return out;
}

ScalarField RandomFields::bounded(const Grid& grid) {
  ScalarField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = uniform(-1.0, 1.0);
  return out;
}

VectorField RandomFields::unit_vectors(const Grid& grid) {
  VectorField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.dim() == 1) {
      out.component(0)[i] = uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
    } else {
      double t = uniform(0.0, 2.0 * std::numbers::pi);
      out.component(0)[i] = std::cos(t);
      out.component(1)[i] = std::sin(t);
    }
  }
  return out;
}

std::vector<ScalarField> test_panel(const DomainMask& mask) {
  const Grid& grid = mask.grid();
  const double rho = inscribed_radius(mask);
  ScalarField cut = smooth_cutoff(mask);
  std::vector<ScalarField> panel;
  for (int k = 0; k < 10; ++k) {
    ScalarField phi = ScalarField::from_function(grid, [&](double x, double y) {
      double a = std::numbers::pi * x / rho, b = std::numbers::pi * y / rho;
      switch (k) {
        case 0: return 1.0;
        case 1: return x / rho;
        case 2: return std::cos(a);
        case 3: return std::sin(a + 0.5 * b);
        case 4: return std::cos(2.0 * a) + 0.5 * y / rho;
        case 5: return (x * x + y * y) / (rho * rho);
        case 6: return std::sin(3.0 * a) * std::cos(b);
        case 7: return std::exp(-4.0 * (x - 0.3 * rho) * (x - 0.3 * rho) / (rho * rho));
        case 8: return std::cos(0.5 * a) * std::cos(1.5 * b);
        default: return x * y / (rho * rho) + std::sin(2.0 * b + 1.0);
      }
    });
    for (std::size_t i = 0; i < grid.size(); ++i) phi[i] *= cut[i];
    panel.push_back(std::move(phi));
  }
  return panel;
}

}  // namespace fracvi
