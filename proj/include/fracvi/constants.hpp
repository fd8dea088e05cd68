#pragma once

#include <cstdint>

#include "fracvi/grid.hpp"

namespace fracvi {

/// Lebesgue exponents pairing f_sharp with u: ||f||_{2#} ||u||_{2*}.
struct SobolevExponents {
  double sharp = 2.0;  // 2#
  double star = 2.0;   // 2* = conjugate of 2#, may be infinite
};

/// N = 1: sigma < 1/2 gives 2/(1 + 2 sigma); sigma = 1/2 uses q = 2; sigma > 1/2
/// gives 1 (2* = infinity). N = 2: sigma < 1 gives 2/(1 + sigma); sigma = 1
/// uses q = 4/3 (2* = 4).
SobolevExponents sobolev_exponents(int dim, double sigma);

inline constexpr double kConstantSafety = 2.0;
inline constexpr int kSobolevSamples = 100;

/// Largest ||v||_{2*} / ||D^sigma v||_2 over random smooth v supported in Omega,
/// times kConstantSafety.
double measure_c_star(const DomainMask& mask, double sigma, std::uint64_t seed, int samples = kSobolevSamples);

/// Largest ||v||_inf / (||D^sigma v||_inf^(1-2/p) ||D^sigma v||_2^(2/p)) over
/// random smooth v; the raw maximum, without safety factor.
double measure_c_p_raw(const DomainMask& mask, double sigma, double p, std::uint64_t seed, int samples);

/// Interpolation ratio of one field, the quantity maximized by measure_c_p_raw.
double interpolation_ratio(const ScalarField& v, double sigma, double p);

/// Exponent p = 2 ceil(N / sigma) + 2 used for the L^1-data estimate.
double l1_data_exponent(int dim, double sigma);

}  // namespace fracvi
