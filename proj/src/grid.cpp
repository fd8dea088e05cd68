#include "fracvi/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fracvi/errors.hpp"

namespace fracvi {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw ValidationError("fields live on different grids");
}

}  // namespace

Grid::Grid(int dim, int n, double half_length) : dim_(dim), n_(n), half_length_(half_length) {
  if (dim != 1 && dim != 2) throw ValidationError("grid dimension must be 1 or 2, got " + std::to_string(dim));
  if (!is_power_of_two(n)) throw ValidationError("points per axis must be a power of two, got " + std::to_string(n));
  if (n < 16) throw ValidationError("points per axis must be at least 16, got " + std::to_string(n));
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw ValidationError("half length must be positive and finite");
  // n is a power of two, so 2L/n is exact and h*n == 2L holds bitwise.
  spacing_ = 2.0 * half_length / n;
  size_ = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
  cell_volume_ = dim == 1 ? spacing_ : spacing_ * spacing_;
}

std::array<double, 2> Grid::node_position(std::size_t flat) const {
  auto idx = node_indices(flat);
  return {coordinate(idx[0]), dim_ == 2 ? coordinate(idx[1]) : 0.0};
}

std::array<int, 2> Grid::node_indices(std::size_t flat) const {
  if (dim_ == 1) return {static_cast<int>(flat), 0};
  return {static_cast<int>(flat / n_), static_cast<int>(flat % n_)};
}

Grid make_grid(int dim, int n, double half_length) { return Grid(dim, n, half_length); }

// ---------------------------------------------------------------------------

DomainMask::DomainMask(Grid grid, std::vector<std::uint8_t> indicator, double min_margin)
    : grid_(grid), indicator_(std::move(indicator)) {
  if (indicator_.size() != grid_.size()) throw ValidationError("domain indicator size does not match grid");
  const double L = grid_.half_length();
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < indicator_.size(); ++i) {
    if (!indicator_[i]) continue;
    ++count_;
    auto x = grid_.node_position(i);
    double extent = std::max(std::abs(x[0]), std::abs(x[1]));
    closest = std::min(closest, L - extent);
    radius_ = std::max(radius_, std::hypot(x[0], x[1]));
  }
  if (count_ == 0) throw ValidationError("domain is empty on this grid");
  margin_ = closest / L;
  if (margin_ < min_margin)
    throw ValidationError("domain margin " + std::to_string(margin_) + " L is below the required " +
                          std::to_string(min_margin) + " L");
}

DomainMask DomainMask::from_predicate(const Grid& grid, const std::function<bool(double, double)>& inside,
                                      double min_margin) {
  std::vector<std::uint8_t> ind(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto x = grid.node_position(i);
    ind[i] = inside(x[0], x[1]) ? 1 : 0;
  }
  return DomainMask(grid, std::move(ind), min_margin);
}

DomainMask DomainMask::interval(const Grid& grid, double half_width, double min_margin) {
  if (grid.dim() != 1) throw ValidationError("interval domain requires a 1D grid");
  return from_predicate(grid, [half_width](double x, double) { return std::abs(x) < half_width; }, min_margin);
}

DomainMask DomainMask::disk(const Grid& grid, double radius, double min_margin) {
  if (grid.dim() != 2) throw ValidationError("disk domain requires a 2D grid");
  return from_predicate(grid, [radius](double x, double y) { return x * x + y * y < radius * radius; },
                        min_margin);
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw ValidationError("field size does not match grid");
}

ScalarField ScalarField::from_function(const Grid& grid, const std::function<double(double, double)>& f) {
  ScalarField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto x = grid.node_position(i);
    out[i] = f(x[0], x[1]);
  }
  return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double factor) {
  for (double& v : values_) v *= factor;
  return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& x) {
  require_same_grid(grid_, x.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double factor, ScalarField a) { return a *= factor; }

// ---------------------------------------------------------------------------

VectorField::VectorField(const Grid& grid)
    : grid_(grid), components_(grid.dim(), std::vector<double>(grid.size(), 0.0)) {}

VectorField::VectorField(const Grid& grid, std::vector<std::vector<double>> components)
    : grid_(grid), components_(std::move(components)) {
  if (static_cast<int>(components_.size()) != grid_.dim())
    throw ValidationError("vector field needs one component per axis");
  for (const auto& c : components_)
    if (c.size() != grid_.size()) throw ValidationError("vector field component size does not match grid");
}

double VectorField::magnitude_squared(std::size_t node) const {
  double s = 0.0;
  for (const auto& c : components_) s += c[node] * c[node];
  return s;
}

double VectorField::magnitude(std::size_t node) const { return std::sqrt(magnitude_squared(node)); }

ScalarField VectorField::magnitude() const {
  ScalarField out(grid_);
  for (std::size_t i = 0; i < grid_.size(); ++i) out[i] = magnitude(i);
  return out;
}

bool VectorField::all_finite() const {
  for (const auto& c : components_)
    for (double v : c)
      if (!std::isfinite(v)) return false;
  return true;
}

VectorField& VectorField::operator+=(const VectorField& other) {
  require_same_grid(grid_, other.grid_);
  for (int j = 0; j < dim(); ++j)
    for (std::size_t i = 0; i < grid_.size(); ++i) components_[j][i] += other.components_[j][i];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
  require_same_grid(grid_, other.grid_);
  for (int j = 0; j < dim(); ++j)
    for (std::size_t i = 0; i < grid_.size(); ++i) components_[j][i] -= other.components_[j][i];
  return *this;
}

VectorField& VectorField::operator*=(double factor) {
  for (auto& c : components_)
    for (double& v : c) v *= factor;
  return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }

VectorField operator*(const ScalarField& s, VectorField F) {
  require_same_grid(s.grid(), F.grid());
  for (int j = 0; j < F.dim(); ++j) {
    auto c = F.component(j);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= s[i];
  }
  return F;
}

// ---------------------------------------------------------------------------

void apply_mask(ScalarField& field, const DomainMask& mask) {
  require_same_grid(field.grid(), mask.grid());
  for (std::size_t i = 0; i < field.size(); ++i)
    if (!mask.contains(i)) field[i] = 0.0;
}

ScalarField masked(ScalarField field, const DomainMask& mask) {
  apply_mask(field, mask);
  return field;
}

double off_support_max(const ScalarField& field, const DomainMask& mask) {
  double m = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i)
    if (!mask.contains(i)) m = std::max(m, std::abs(field[i]));
  return m;
}

ScalarField indicator_field(const DomainMask& mask) {
  ScalarField out(mask.grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mask.contains(i) ? 1.0 : 0.0;
  return out;
}

// ---------------------------------------------------------------------------

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 64;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double integrate(const ScalarField& field) { return pairwise_sum(field.values()) * field.grid().cell_volume(); }

double inner(const ScalarField& u, const ScalarField& v) {
  require_same_grid(u.grid(), v.grid());
  std::vector<double> prod(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) prod[i] = u[i] * v[i];
  return pairwise_sum(prod) * u.grid().cell_volume();
}

double inner(const VectorField& u, const VectorField& v) {
  require_same_grid(u.grid(), v.grid());
  std::vector<double> prod(u.grid().size(), 0.0);
  for (int j = 0; j < u.dim(); ++j) {
    auto a = u.component(j);
    auto b = v.component(j);
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] += a[i] * b[i];
  }
  return pairwise_sum(prod) * u.grid().cell_volume();
}

double l1_norm(const ScalarField& field) {
  std::vector<double> a(field.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(field[i]);
  return pairwise_sum(a) * field.grid().cell_volume();
}

double l2_norm(const ScalarField& field) { return std::sqrt(inner(field, field)); }

double linf_norm(const ScalarField& field) {
  double m = 0.0;
  for (double v : field.values()) m = std::max(m, std::abs(v));
  return m;
}

double lp_norm(const ScalarField& field, double p) {
  if (std::isinf(p)) return linf_norm(field);
  if (p == 1.0) return l1_norm(field);
  if (p == 2.0) return l2_norm(field);
  std::vector<double> a(field.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::pow(std::abs(field[i]), p);
  return std::pow(pairwise_sum(a) * field.grid().cell_volume(), 1.0 / p);
}

double l1_norm(const VectorField& field) { return l1_norm(field.magnitude()); }
double l2_norm(const VectorField& field) { return std::sqrt(inner(field, field)); }
double linf_norm(const VectorField& field) { return linf_norm(field.magnitude()); }

}  // namespace fracvi
