#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fracvi/grid.hpp"

namespace fracvi {

/// Distance from the origin to the nearest node outside Omega.
double inscribed_radius(const DomainMask& mask);

/// C-infinity bump exp(1 - 1/(1 - (r/rho)^2)) with rho slightly inside the
/// inscribed radius, so products with it are smooth and supported in Omega.
ScalarField smooth_cutoff(const DomainMask& mask);

/// Seeded generator of smooth test fields. Two generators with the same seed
/// produce identical sequences.
class RandomFields {
 public:
  explicit RandomFields(std::uint64_t seed) : engine_(seed) {}

  /// Random trigonometric sum times smooth_cutoff(mask), unit l-infinity norm.
  ScalarField smooth(const DomainMask& mask, int modes = 6);
  /// Smooth random vector field on the whole box (no support restriction).
  VectorField smooth_vector(const Grid& grid, int modes = 4);
  /// Independent uniform values in [-1, 1] at every node.
  ScalarField bounded(const Grid& grid);
  /// Independent random unit vectors at every node (random signs in 1D).
  VectorField unit_vectors(const Grid& grid);
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

inline constexpr int kPanelVersion = 1;

/// Fixed panel of 10 smooth fields supported in Omega, used for weak pairings.
/// Changing the panel requires bumping kPanelVersion.
std::vector<ScalarField> test_panel(const DomainMask& mask);

}  // namespace fracvi
