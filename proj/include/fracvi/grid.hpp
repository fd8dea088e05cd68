#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace fracvi {

/// Uniform periodic box [-L, L)^dim with n nodes per axis.
///
/// Node (i0, i1) sits at (-L + i0 h, -L + i1 h) and is stored at flat index
/// i0 * n + i1 (row-major, axis 0 slowest). In 1D only i0 exists.
class Grid {
 public:
  Grid() = default;
  Grid(int dim, int n, double half_length);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double half_length() const { return half_length_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return size_; }
  /// h^dim, the rectangle-rule weight of a node.
  double cell_volume() const { return cell_volume_; }

  double coordinate(int index) const { return -half_length_ + index * spacing_; }
  std::array<double, 2> node_position(std::size_t flat) const;
  std::array<int, 2> node_indices(std::size_t flat) const;

  /// Signed frequency index in (-n/2, n/2] for array index k in [0, n).
  int signed_frequency(int k) const { return k <= n_ / 2 ? k : k - n_; }
  /// Maps a signed frequency back to its array index.
  int frequency_index(int signed_k) const { return signed_k >= 0 ? signed_k : signed_k + n_; }
  /// Wavenumber xi_k = k / (2L).
  double wavenumber(int k) const { return signed_frequency(k) / (2.0 * half_length_); }

  bool operator==(const Grid& other) const {
    return dim_ == other.dim_ && n_ == other.n_ && half_length_ == other.half_length_;
  }

 private:
  int dim_ = 1;
  int n_ = 0;
  double half_length_ = 0.0;
  double spacing_ = 0.0;
  double cell_volume_ = 0.0;
  std::size_t size_ = 0;
};

Grid make_grid(int dim, int n, double half_length);

/// Nodes of the open set Omega inside the box.
class DomainMask {
 public:
  static constexpr double kDefaultMinMargin = 0.25;

  DomainMask() = default;
  DomainMask(Grid grid, std::vector<std::uint8_t> indicator, double min_margin = kDefaultMinMargin);

  static DomainMask interval(const Grid& grid, double half_width, double min_margin = kDefaultMinMargin);
  static DomainMask disk(const Grid& grid, double radius, double min_margin = kDefaultMinMargin);
  static DomainMask from_predicate(const Grid& grid, const std::function<bool(double, double)>& inside,
                                   double min_margin = kDefaultMinMargin);

  const Grid& grid() const { return grid_; }
  bool contains(std::size_t flat) const { return indicator_[flat] != 0; }
  std::span<const std::uint8_t> indicator() const { return indicator_; }
  /// Distance from Omega to the box boundary, in units of L.
  double margin() const { return margin_; }
  std::size_t count() const { return count_; }
  double measure() const { return static_cast<double>(count_) * grid_.cell_volume(); }
  /// Largest |x| over nodes of Omega (half-diameter about the origin).
  double radius() const { return radius_; }

 private:
  Grid grid_;
  std::vector<std::uint8_t> indicator_;
  double margin_ = 0.0;
  double radius_ = 0.0;
  std::size_t count_ = 0;
};

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& grid, double value = 0.0) : grid_(grid), values_(grid.size(), value) {}
  ScalarField(const Grid& grid, std::vector<double> values);

  static ScalarField from_function(const Grid& grid, const std::function<double(double, double)>& f);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& data() { return values_; }
  const std::vector<double>& data() const { return values_; }

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double factor);
  /// this += a * x
  ScalarField& axpy(double a, const ScalarField& x);

 private:
  Grid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double factor, ScalarField a);

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const Grid& grid);
  VectorField(const Grid& grid, std::vector<std::vector<double>> components);

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  std::span<double> component(int j) { return components_[j]; }
  std::span<const double> component(int j) const { return components_[j]; }
  std::vector<double>& component_data(int j) { return components_[j]; }
  const std::vector<double>& component_data(int j) const { return components_[j]; }
  double magnitude_squared(std::size_t node) const;
  double magnitude(std::size_t node) const;
  ScalarField magnitude() const;
  bool all_finite() const;

  VectorField& operator+=(const VectorField& other);
  VectorField& operator-=(const VectorField& other);
  VectorField& operator*=(double factor);

 private:
  Grid grid_;
  std::vector<std::vector<double>> components_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
/// Pointwise product s(x) * F(x).
VectorField operator*(const ScalarField& s, VectorField F);

/// Zero every node outside Omega.
void apply_mask(ScalarField& field, const DomainMask& mask);
ScalarField masked(ScalarField field, const DomainMask& mask);
/// Largest |value| at nodes outside Omega; 0 for fields supported in Omega.
double off_support_max(const ScalarField& field, const DomainMask& mask);
ScalarField indicator_field(const DomainMask& mask);

// Quadrature. All sums use pairwise reduction over the flat node order, so
// results are independent of any parallel schedule.
double pairwise_sum(std::span<const double> values);
/// Rectangle rule: sum(values) * h^dim.
double integrate(const ScalarField& field);
/// Grid inner product sum(u v) h^dim.
double inner(const ScalarField& u, const ScalarField& v);
double inner(const VectorField& u, const VectorField& v);
double l1_norm(const ScalarField& field);
double l2_norm(const ScalarField& field);
double linf_norm(const ScalarField& field);
double lp_norm(const ScalarField& field, double p);
double l1_norm(const VectorField& field);
double l2_norm(const VectorField& field);
double linf_norm(const VectorField& field);

}  // namespace fracvi
