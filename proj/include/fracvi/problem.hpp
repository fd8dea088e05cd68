#pragma once

#include <string>
#include <vector>

#include "fracvi/grid.hpp"
#include "fracvi/riesz.hpp"

namespace fracvi {

/// Matrix field A(x), dim x dim per node, row-major.
class Coefficients {
 public:
  Coefficients() = default;
  /// Audits coercivity (smallest eigenvalue of the symmetric part >= a_star)
  /// and boundedness (operator norm <= a_upper) at every node; throws
  /// CoercivityViolation or ValidationError.
  Coefficients(const Grid& grid, std::vector<double> entries, double a_star, double a_upper);

  static Coefficients identity(const Grid& grid);
  static Coefficients diagonal(const Grid& grid, double d1, double d2);
  /// a_upper * R(angle): nonsymmetric for angle != 0, coercive with constant
  /// a_upper cos(angle).
  static Coefficients rotation(const Grid& grid, double angle, double a_star, double a_upper);

  const Grid& grid() const { return grid_; }
  double a_star() const { return a_star_; }
  double a_upper() const { return a_upper_; }
  bool symmetric() const { return symmetric_; }
  bool is_identity() const { return identity_; }
  /// Measured over all nodes during the audit.
  double min_symmetric_eigenvalue() const { return min_eig_; }
  double max_operator_norm() const { return max_norm_; }

  std::span<const double> entries() const { return entries_; }
  double entry(std::size_t node, int r, int c) const {
    int d = grid_.dim();
    return entries_[node * d * d + r * d + c];
  }
  /// A(x) p(x) at every node; transpose applies A^T.
  VectorField apply(const VectorField& p, bool transpose = false) const;
  /// Same fields, A replaced by its symmetric part.
  Coefficients symmetric_part() const;

 private:
  void audit();

  Grid grid_;
  std::vector<double> entries_;
  double a_star_ = 1.0;
  double a_upper_ = 1.0;
  double min_eig_ = 0.0;
  double max_norm_ = 0.0;
  bool symmetric_ = true;
  bool identity_ = false;
};

enum class ObstacleRegime {
  /// 0 < g_star <= g <= g_upper on the whole box.
  bounded_below,
  /// g >= 0 with a positive lower bound on the ball containing Omega.
  local_positive,
};

class Obstacle {
 public:
  Obstacle() = default;
  Obstacle(ScalarField g, ObstacleRegime regime, const DomainMask& mask);

  const ScalarField& g() const { return g_; }
  /// Lower bound used by the estimates: the global minimum, or the minimum
  /// over the ball of radius (half-diameter of Omega + 2h) in the local regime.
  double g_star() const { return g_star_; }
  double g_upper() const { return g_upper_; }
  ObstacleRegime regime() const { return regime_; }
  double ball_radius() const { return ball_radius_; }

 private:
  ScalarField g_;
  ObstacleRegime regime_ = ObstacleRegime::bounded_below;
  double g_star_ = 0.0;
  double g_upper_ = 0.0;
  double ball_radius_ = 0.0;
};

class SourceData {
 public:
  SourceData() = default;
  /// f_sharp is masked to Omega; f_vec lives on the whole box.
  SourceData(ScalarField f_sharp, VectorField f_vec, const DomainMask& mask);

  const ScalarField& f_sharp() const { return f_sharp_; }
  const VectorField& f_vec() const { return f_vec_; }
  double f_sharp_l1() const { return f_sharp_l1_; }
  double f_sharp_l2() const { return f_sharp_l2_; }
  double f_vec_l1() const { return f_vec_l1_; }
  double f_vec_l2() const { return f_vec_l2_; }
  bool has_f_sharp() const { return f_sharp_l1_ > 0.0; }

 private:
  ScalarField f_sharp_;
  VectorField f_vec_;
  double f_sharp_l1_ = 0.0;
  double f_sharp_l2_ = 0.0;
  double f_vec_l1_ = 0.0;
  double f_vec_l2_ = 0.0;
};

struct ProblemSpec {
  Grid grid;
  DomainMask mask;
  Coefficients coeffs;
  SourceData data;
  Obstacle obstacle;
  FracOrder sigma;

  /// Throws ValidationError if the components do not share the grid.
  void validate() const;
  /// <f', v> = int f_sharp v + int f . D^sigma v.
  double load(const ScalarField& v) const;
};

enum class Linearization {
  /// Lagged coefficient A + k I only.
  picard,
  /// Adds the derivative term 2 k' p p^T of the penalty (Newton on the
  /// penalized equation); reduces to picard wherever k' = 0.
  newton,
};

struct PenaltySchedule {
  double eps_initial = 0.1;
  double factor = 0.5;
  int levels = 10;
  double picard_tol = 1e-8;
  int picard_max_iters = 200;
  /// Initial damping of each outer step; <= 0 selects 1.0 for newton and 0.7
  /// for picard.
  double damping = 0.0;
  double krylov_tol = 1e-10;
  int krylov_max_iters = 2000;
  Linearization linearization = Linearization::newton;

  void validate() const;
  double epsilon(int level) const;
  double effective_damping() const;
  double eps_final() const { return epsilon(levels - 1); }
};

std::string to_string(Linearization l);
std::string to_string(ObstacleRegime r);

}  // namespace fracvi
