#include "fracvi/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracvi/random_fields.hpp"
#include "fracvi/riesz.hpp"

namespace fracvi {

SobolevExponents sobolev_exponents(int dim, double sigma) {
  const double inf = std::numeric_limits<double>::infinity();
  if (dim == 1) {
    if (sigma < 0.5) return {2.0 / (1.0 + 2.0 * sigma), 2.0 / (1.0 - 2.0 * sigma)};
    if (sigma == 0.5) return {2.0, 2.0};
    return {1.0, inf};
  }
  if (sigma < 1.0) return {2.0 / (1.0 + sigma), 2.0 / (1.0 - sigma)};
  return {4.0 / 3.0, 4.0};
}

double measure_c_star(const DomainMask& mask, double sigma, std::uint64_t seed, int samples) {
  RandomFields rng(seed);
  const double star = sobolev_exponents(mask.grid().dim(), sigma).star;
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    ScalarField v = rng.smooth(mask, 1 + s % 8);
    double denom = h_sigma_norm(v, sigma);
    if (denom > 0.0) best = std::max(best, lp_norm(v, star) / denom);
  }
  return kConstantSafety * best;
}

double interpolation_ratio(const ScalarField& v, double sigma, double p) {
  VectorField dv = frac_gradient(v, sigma);
  double inf_norm = linf_norm(dv), two_norm = l2_norm(dv);
  if (inf_norm == 0.0 || two_norm == 0.0) return 0.0;
  return linf_norm(v) / (std::pow(inf_norm, 1.0 - 2.0 / p) * std::pow(two_norm, 2.0 / p));
}

double measure_c_p_raw(const DomainMask& mask, double sigma, double p, std::uint64_t seed, int samples) {
  RandomFields rng(seed);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) best = std::max(best, interpolation_ratio(rng.smooth(mask, 1 + s % 8), sigma, p));
  return best;
}

double l1_data_exponent(int dim, double sigma) { return 2.0 * std::ceil(dim / sigma) + 2.0; }

}  // namespace fracvi
