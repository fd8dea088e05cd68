#include "fracvi/local_ref.hpp"

#include <cmath>

#include "fracvi/errors.hpp"

namespace fracvi {

void LocalExactSolution::validate() const {
  if (!(f0 > 0.0) || !(g0 > 0.0) || !(a > 0.0)) throw ValidationError("closed form needs f0, g0, a > 0");
}

double LocalExactSolution::contact_radius() const {
  return kind == LocalKind::elastoplastic_1d ? g0 / f0 : 2.0 * g0 / f0;
}

bool LocalExactSolution::active() const { return contact_radius() < a; }

double LocalExactSolution::value(double r) const {
  r = std::abs(r);
  if (r >= a) return 0.0;
  const double c = kind == LocalKind::elastoplastic_1d ? 2.0 : 4.0;
  const double rs = contact_radius();
  if (rs >= a) return f0 * (a * a - r * r) / c;
  if (r >= rs) return g0 * (a - r);
  return g0 * (a - rs) + f0 * (rs * rs - r * r) / c;
}

double LocalExactSolution::slope(double r) const {
  r = std::abs(r);
  if (r >= a) return 0.0;
  const double c = kind == LocalKind::elastoplastic_1d ? 1.0 : 2.0;
  return std::min(f0 * r / c, active() ? g0 : f0 * r / c);
}

double LocalExactSolution::multiplier(double r) const {
  r = std::abs(r);
  if (r >= a || r <= contact_radius()) return 0.0;
  return kind == LocalKind::elastoplastic_1d ? f0 * r / g0 - 1.0 : f0 * r / (2.0 * g0) - 1.0;
}

namespace {

void require_kind(const LocalExactSolution& sol, const Grid& grid) {
  sol.validate();
  int want = sol.kind == LocalKind::elastoplastic_1d ? 1 : 2;
  if (grid.dim() != want) throw ValidationError("closed form dimension does not match grid");
}

}  // namespace

ScalarField exact_local(const LocalExactSolution& sol, const Grid& grid) {
  require_kind(sol, grid);
  return ScalarField::from_function(grid, [&](double x, double y) { return sol.value(std::hypot(x, y)); });
}

ScalarField exact_local_multiplier(const LocalExactSolution& sol, const Grid& grid) {
  require_kind(sol, grid);
  return ScalarField::from_function(grid, [&](double x, double y) { return sol.multiplier(std::hypot(x, y)); });
}

std::vector<std::uint8_t> exact_active_set(const LocalExactSolution& sol, const Grid& grid) {
  require_kind(sol, grid);
  std::vector<std::uint8_t> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto x = grid.node_position(i);
    double r = std::hypot(x[0], x[1]);
    out[i] = r > sol.contact_radius() && r < sol.a ? 1 : 0;
  }
  return out;
}

ProblemSpec make_local_instance(const InstanceSetup& s) {
  s.solution.validate();
  Grid grid(s.dim, s.n, s.half_length);
  DomainMask mask = s.dim == 1 ? DomainMask::interval(grid, s.solution.a) : DomainMask::disk(grid, s.solution.a);
  ScalarField f_sharp(grid, s.gradient_source ? 0.0 : s.solution.f0);
  VectorField f_vec(grid);
  if (s.gradient_source) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!mask.contains(i)) continue;
      auto x = grid.node_position(i);
      for (int j = 0; j < s.dim; ++j) f_vec.component(j)[i] = -s.solution.f0 * x[j] / s.dim;
    }
  }
  ProblemSpec spec{grid,
                   mask,
                   Coefficients::identity(grid),
                   SourceData(f_sharp, f_vec, mask),
                   Obstacle(ScalarField(grid, s.solution.g0), ObstacleRegime::bounded_below, mask),
                   FracOrder(s.sigma)};
  return spec;
}

SolveReport solve_local(const ProblemSpec& spec, const PenaltySchedule& schedule, const PenalizedOptions& options) {
  if (!spec.sigma.is_local()) throw ValidationError("solve_local requires sigma = 1");
  return solve_penalized(spec, schedule, options);
}

double slope_excess(const ScalarField& u, const DomainMask& mask, double g0) {
  const Grid& grid = u.grid();
  const int n = grid.n();
  const double h = grid.spacing();
  double worst = -g0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!mask.contains(i)) continue;
    auto k = grid.node_indices(i);
    for (int axis = 0; axis < grid.dim(); ++axis) {
      auto kk = k;
      kk[axis] += 1;
      if (kk[axis] >= n) continue;
      std::size_t j = grid.dim() == 1 ? static_cast<std::size_t>(kk[0])
                                      : static_cast<std::size_t>(kk[0]) * n + static_cast<std::size_t>(kk[1]);
      worst = std::max(worst, std::abs(u[j] - u[i]) / h - g0);
    }
  }
  return worst;
}

}  // namespace fracvi
