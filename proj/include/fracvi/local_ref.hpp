#pragma once

#include <cstdint>

#include "fracvi/penalized.hpp"
#include "fracvi/problem.hpp"
#include "fracvi/report.hpp"

namespace fracvi {

enum class LocalKind { elastoplastic_1d, radial_torsion_2d };

/// Classical gradient-constrained problem with A = Id, constant source f0 and
/// constant bound g0 on the interval (-a, a) or the disk of radius a.
struct LocalExactSolution {
  LocalKind kind = LocalKind::elastoplastic_1d;
  double f0 = 1.0;
  double g0 = 1.0;
  double a = 1.0;

  void validate() const;
  /// The constraint binds somewhere.
  bool active() const;
  /// Radius where |Du| reaches g0: g0/f0 in 1D, 2 g0/f0 in 2D.
  double contact_radius() const;
  double value(double r) const;
  /// |Du| at radius r.
  double slope(double r) const;
  /// Limit multiplier: f0 r / g0 - 1 (1D) or f0 r / (2 g0) - 1 (2D) on the
  /// plastic region, 0 elsewhere.
  double multiplier(double r) const;
};

/// Samples the closed form at every node; zero outside the domain.
ScalarField exact_local(const LocalExactSolution& sol, const Grid& grid);
ScalarField exact_local_multiplier(const LocalExactSolution& sol, const Grid& grid);
/// True where the node lies in the plastic region |x| > contact radius of Omega.
std::vector<std::uint8_t> exact_active_set(const LocalExactSolution& sol, const Grid& grid);

struct InstanceSetup {
  int dim = 1;
  int n = 1024;
  double half_length = 4.0;
  LocalExactSolution solution;
  double sigma = 1.0;
  /// f_sharp = 0 and f = -f0 x / N on Omega instead of f_sharp = f0; the two
  /// coincide at sigma = 1.
  bool gradient_source = false;
};

ProblemSpec make_local_instance(const InstanceSetup& setup);

/// solve_penalized with the classical spectral gradient; spec.sigma must be 1.
SolveReport solve_local(const ProblemSpec& spec, const PenaltySchedule& schedule,
                        const PenalizedOptions& options = {});

/// Largest one-sided finite-difference slope of u along each axis minus g0,
/// over Omega; nonpositive when the slope bound holds.
double slope_excess(const ScalarField& u, const DomainMask& mask, double g0);

}  // namespace fracvi
