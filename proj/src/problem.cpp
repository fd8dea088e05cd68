#include "fracvi/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracvi/errors.hpp"

namespace fracvi {

namespace {

// Symmetric-part minimum eigenvalue and operator norm of a 2x2 (or 1x1) block.
void block_audit(const double* m, int d, double& min_eig, double& op_norm) {
  if (d == 1) {
    min_eig = m[0];
    op_norm = std::abs(m[0]);
    return;
  }
  double a = m[0], b = m[1], c = m[2], e = m[3];
  double off = 0.5 * (b + c);
  double mean = 0.5 * (a + e);
  double rad = std::hypot(0.5 * (a - e), off);
  min_eig = mean - rad;
  // largest eigenvalue of M^T M
  double p = a * a + c * c, q = a * b + c * e, r = b * b + e * e;
  double top = 0.5 * (p + r) + std::hypot(0.5 * (p - r), q);
  op_norm = std::sqrt(top);
}

constexpr double kAuditSlack = 1e-12;

}  // namespace

Coefficients::Coefficients(const Grid& grid, std::vector<double> entries, double a_star, double a_upper)
    : grid_(grid), entries_(std::move(entries)), a_star_(a_star), a_upper_(a_upper) {
  const std::size_t d = grid.dim();
  if (entries_.size() != grid.size() * d * d) throw ValidationError("coefficient field has wrong size");
  if (!(a_star > 0.0) || !(a_upper >= a_star)) throw ValidationError("coefficient bounds need 0 < a_star <= a_upper");
  audit();
}

void Coefficients::audit() {
  const int d = grid_.dim();
  min_eig_ = std::numeric_limits<double>::infinity();
  max_norm_ = 0.0;
  symmetric_ = true;
  identity_ = true;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const double* m = &entries_[i * d * d];
    for (int k = 0; k < d * d; ++k)
      if (!std::isfinite(m[k])) throw ValidationError("coefficient field is not finite");
    double e, nrm;
    block_audit(m, d, e, nrm);
    min_eig_ = std::min(min_eig_, e);
    max_norm_ = std::max(max_norm_, nrm);
    if (d == 2 && m[1] != m[2]) symmetric_ = false;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        if (m[r * d + c] != (r == c ? 1.0 : 0.0)) identity_ = false;
  }
  if (min_eig_ < a_star_ * (1.0 - kAuditSlack))
    throw CoercivityViolation("coercivity audit failed: smallest eigenvalue of the symmetric part " +
                              std::to_string(min_eig_) + " is below a_star = " + std::to_string(a_star_));
  if (max_norm_ > a_upper_ * (1.0 + kAuditSlack))
    throw ValidationError("boundedness audit failed: operator norm " + std::to_string(max_norm_) +
                          " exceeds a_upper = " + std::to_string(a_upper_));
}

Coefficients Coefficients::identity(const Grid& grid) { return diagonal(grid, 1.0, 1.0); }

Coefficients Coefficients::diagonal(const Grid& grid, double d1, double d2) {
  const int d = grid.dim();
  std::vector<double> e(grid.size() * d * d, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    e[i * d * d] = d1;
    if (d == 2) e[i * 4 + 3] = d2;
  }
  double lo = d == 2 ? std::min(d1, d2) : d1;
  double hi = d == 2 ? std::max(d1, d2) : d1;
  if (!(lo > 0.0)) throw CoercivityViolation("diagonal coefficients must be positive");
  return Coefficients(grid, std::move(e), lo, hi);
}

Coefficients Coefficients::rotation(const Grid& grid, double angle, double a_star, double a_upper) {
  if (grid.dim() != 2) throw ValidationError("rotation coefficients require a 2D grid");
  std::vector<double> e(grid.size() * 4);
  const double c = a_upper * std::cos(angle), s = a_upper * std::sin(angle);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    e[i * 4 + 0] = c;
    e[i * 4 + 1] = -s;
    e[i * 4 + 2] = s;
    e[i * 4 + 3] = c;
  }
  return Coefficients(grid, std::move(e), a_star, a_upper);
}

VectorField Coefficients::apply(const VectorField& p, bool transpose) const {
  if (identity_) return p;
  const int d = grid_.dim();
  VectorField out(grid_);
  if (d == 1) {
    auto in = p.component(0);
    auto o = out.component(0);
    for (std::size_t i = 0; i < grid_.size(); ++i) o[i] = entries_[i] * in[i];
    return out;
  }
  auto p0 = p.component(0), p1 = p.component(1);
  auto o0 = out.component(0), o1 = out.component(1);
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const double* m = &entries_[i * 4];
    double b = transpose ? m[2] : m[1];
    double c = transpose ? m[1] : m[2];
    o0[i] = m[0] * p0[i] + b * p1[i];
    o1[i] = c * p0[i] + m[3] * p1[i];
  }
  return out;
}

Coefficients Coefficients::symmetric_part() const {
  const int d = grid_.dim();
  std::vector<double> e = entries_;
  if (d == 2)
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      double off = 0.5 * (e[i * 4 + 1] + e[i * 4 + 2]);
      e[i * 4 + 1] = e[i * 4 + 2] = off;
    }
  return Coefficients(grid_, std::move(e), a_star_, a_upper_);
}

// ---------------------------------------------------------------------------

Obstacle::Obstacle(ScalarField g, ObstacleRegime regime, const DomainMask& mask) : g_(std::move(g)), regime_(regime) {
  if (!(g_.grid() == mask.grid())) throw ValidationError("obstacle and domain live on different grids");
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double v : g_.values()) {
    if (!std::isfinite(v)) throw ValidationError("obstacle g is not finite");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  g_upper_ = hi;
  if (regime == ObstacleRegime::bounded_below) {
    if (!(lo > 0.0))
      throw ValidationError("obstacle violates the bounded-below regime 0 < g_* <= g <= g^*: min g = " +
                            std::to_string(lo));
    g_star_ = lo;
    ball_radius_ = std::numeric_limits<double>::infinity();
    return;
  }
  if (lo < 0.0) throw ValidationError("obstacle must be nonnegative, min g = " + std::to_string(lo));
  const Grid& grid = mask.grid();
  ball_radius_ = mask.radius() + 2.0 * grid.spacing();
  double ball_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto x = grid.node_position(i);
    if (std::hypot(x[0], x[1]) <= ball_radius_) ball_min = std::min(ball_min, g_[i]);
  }
  if (!(ball_min > 0.0))
    throw ValidationError("obstacle vanishes on the ball containing the domain; no positive local lower bound");
  g_star_ = ball_min;
}

SourceData::SourceData(ScalarField f_sharp, VectorField f_vec, const DomainMask& mask)
    : f_sharp_(masked(std::move(f_sharp), mask)), f_vec_(std::move(f_vec)) {
  if (!(f_vec_.grid() == mask.grid())) throw ValidationError("vector source lives on a different grid");
  for (double v : f_sharp_.values())
    if (!std::isfinite(v)) throw ValidationError("scalar source is not finite");
  if (!f_vec_.all_finite()) throw ValidationError("vector source is not finite");
  f_sharp_l1_ = l1_norm(f_sharp_);
  f_sharp_l2_ = l2_norm(f_sharp_);
  f_vec_l1_ = l1_norm(f_vec_);
  f_vec_l2_ = l2_norm(f_vec_);
}

void ProblemSpec::validate() const {
  if (!(mask.grid() == grid) || !(coeffs.grid() == grid) || !(data.f_sharp().grid() == grid) ||
      !(obstacle.g().grid() == grid))
    throw ValidationError("problem components live on different grids");
}

double ProblemSpec::load(const ScalarField& v) const {
  return inner(data.f_sharp(), v) + inner(data.f_vec(), frac_gradient(v, sigma));
}

// ---------------------------------------------------------------------------

void PenaltySchedule::validate() const {
  if (!(eps_initial > 0.0 && eps_initial < 1.0)) throw ValidationError("eps_initial must lie in (0, 1)");
  if (!(factor > 0.0 && factor < 1.0)) throw ValidationError("eps factor must lie in (0, 1)");
  if (levels < 1) throw ValidationError("schedule needs at least one level");
  if (!(picard_tol > 0.0) || !(krylov_tol > 0.0)) throw ValidationError("tolerances must be positive");
  if (picard_max_iters < 1 || krylov_max_iters < 1) throw ValidationError("iteration limits must be positive");
  if (damping > 1.0) throw ValidationError("damping must lie in (0, 1]");
}

double PenaltySchedule::epsilon(int level) const { return eps_initial * std::pow(factor, level); }

double PenaltySchedule::effective_damping() const {
  if (damping > 0.0) return damping;
  return linearization == Linearization::newton ? 1.0 : 0.7;
}

std::string to_string(Linearization l) { return l == Linearization::newton ? "newton" : "picard"; }
std::string to_string(ObstacleRegime r) {
  return r == ObstacleRegime::bounded_below ? "bounded_below" : "local_positive";
}

}  // namespace fracvi
