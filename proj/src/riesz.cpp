#include "fracvi/riesz.hpp"

#include <boost/math/special_functions/zeta.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "fracvi/errors.hpp"

namespace fracvi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<Complex> transform(const SymbolTable& table, std::span<const double> values) {
  std::vector<Complex> spec(table.fourier().spectrum_size());
  table.fourier().forward(values, spec);
  return spec;
}

// out = i m * in
void times_i_multiplier(std::span<const Complex> in, std::span<const double> m, std::span<Complex> out) {
  for (std::size_t s = 0; s < in.size(); ++s) out[s] = Complex(-in[s].imag() * m[s], in[s].real() * m[s]);
}

double symbol_magnitude(const std::array<double, 2>& xi) { return kTwoPi * std::hypot(xi[0], xi[1]); }

}  // namespace

FracOrder::FracOrder(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw ValidationError("fractional order must satisfy 0 < sigma <= 1");
}

std::shared_ptr<const SymbolTable> SymbolTable::get(const Grid& grid, double sigma) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, double, double>, std::shared_ptr<const SymbolTable>> cache;
  FracOrder checked(sigma);
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_tuple(grid.dim(), grid.n(), grid.half_length(), sigma);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_shared<SymbolTable>(grid, sigma)).first;
  return it->second;
}

SymbolTable::SymbolTable(const Grid& grid, double sigma)
    : grid_(grid), sigma_(FracOrder(sigma).value()), fourier_(&Fourier::for_grid(grid)) {
  const std::size_t ns = fourier_->spectrum_size();
  for (int j = 0; j < grid.dim(); ++j) gradient_[j].assign(ns, 0.0);
  laplacian_.assign(ns, 0.0);
  laplacian_inverse_.assign(ns, 0.0);
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < ns; ++s) {
    auto xi = fourier_->wavenumber(s);
    double r = symbol_magnitude(xi);
    if (r == 0.0) continue;
    double radial = sigma == 1.0 ? 1.0 : std::pow(r, sigma - 1.0);
    for (int j = 0; j < grid.dim(); ++j)
      gradient_[j][s] = fourier_->is_nyquist(s, j) ? 0.0 : kTwoPi * xi[j] * radial;
    laplacian_[s] = sigma == 1.0 ? r * r : std::pow(r, 2.0 * sigma);
    laplacian_inverse_[s] = 1.0 / laplacian_[s];
    smallest = std::min(smallest, laplacian_[s]);
  }
  laplacian_inverse_[0] = 1.0 / smallest;
}

VectorField frac_gradient(const ScalarField& u, double sigma) {
  auto table = SymbolTable::get(u.grid(), sigma);
  auto spec = transform(*table, u.values());
  std::vector<Complex> tmp(spec.size());
  VectorField out(u.grid());
  for (int j = 0; j < u.grid().dim(); ++j) {
    times_i_multiplier(spec, table->gradient(j), tmp);
    table->fourier().inverse(tmp, out.component(j));
  }
  return out;
}

VectorField classical_gradient(const ScalarField& u) { return frac_gradient(u, 1.0); }

ScalarField frac_divergence(const VectorField& F, double sigma) {
  auto table = SymbolTable::get(F.grid(), sigma);
  const std::size_t ns = table->fourier().spectrum_size();
  std::vector<Complex> acc(ns, Complex(0.0)), spec(ns), tmp(ns);
  for (int j = 0; j < F.dim(); ++j) {
    table->fourier().forward(F.component(j), spec);
    times_i_multiplier(spec, table->gradient(j), tmp);
    for (std::size_t s = 0; s < ns; ++s) acc[s] += tmp[s];
  }
  ScalarField out(F.grid());
  table->fourier().inverse(acc, out.values());
  return out;
}

namespace {

ScalarField apply_even_symbol(const ScalarField& u, const SymbolTable& table, std::span<const double> symbol,
                              bool drop_mean) {
  auto spec = transform(table, u.values());
  for (std::size_t s = 0; s < spec.size(); ++s) spec[s] *= symbol[s];
  if (drop_mean) spec[0] = 0.0;
  ScalarField out(u.grid());
  table.fourier().inverse(spec, out.values());
  return out;
}

}  // namespace

ScalarField frac_laplacian(const ScalarField& u, double sigma) {
  auto table = SymbolTable::get(u.grid(), sigma);
  return apply_even_symbol(u, *table, table->laplacian(), false);
}

ScalarField frac_laplacian_inverse(const ScalarField& u, double sigma) {
  auto table = SymbolTable::get(u.grid(), sigma);
  return apply_even_symbol(u, *table, table->laplacian_inverse(), true);
}

double riesz_constant(int dim, double alpha) {
  const double N = dim;
  double log_value = std::lgamma((N - alpha) / 2.0) - std::lgamma(alpha / 2.0) - (N / 2.0) * std::log(std::numbers::pi) -
                     alpha * std::log(2.0);
  return std::exp(log_value);
}

double riesz_self_weight(const Grid& grid, double alpha) {
  const double gamma = riesz_constant(grid.dim(), alpha);
  const double h = grid.spacing();
  if (grid.dim() == 1) return -2.0 * boost::math::zeta(1.0 - alpha) * gamma * std::pow(h, alpha);
  const double rho = h / std::sqrt(std::numbers::pi);
  return gamma * kTwoPi * std::pow(rho, alpha) / alpha;
}

namespace {

ScalarField riesz_quadrature(const ScalarField& h, double alpha) {
  const Grid& grid = h.grid();
  const int n = grid.n();
  const int m = 2 * n;
  const Grid padded(grid.dim(), m, 2.0 * grid.half_length());
  const Fourier& fft = Fourier::for_grid(padded);
  const double gamma = riesz_constant(grid.dim(), alpha);
  const double step = grid.spacing();
  const double weight = grid.cell_volume();
  const double exponent = alpha - grid.dim();

  auto offset = [&](int k) { return k < n ? k : k - m; };  // signed offset of padded index
  std::vector<double> kernel(padded.size(), 0.0), data(padded.size(), 0.0);
  for (std::size_t p = 0; p < padded.size(); ++p) {
    auto k = padded.node_indices(p);
    int d0 = offset(k[0]);
    int d1 = grid.dim() == 2 ? offset(k[1]) : 0;
    if (d0 == n || d1 == n || k[0] == n || k[1] == n) continue;
    if (d0 == 0 && d1 == 0) continue;
    double r = step * std::hypot(static_cast<double>(d0), static_cast<double>(d1));
    kernel[p] = gamma * std::pow(r, exponent) * weight;
  }
  kernel[0] = riesz_self_weight(grid, alpha);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto k = grid.node_indices(i);
    std::size_t p = grid.dim() == 1 ? static_cast<std::size_t>(k[0])
                                    : static_cast<std::size_t>(k[0]) * m + static_cast<std::size_t>(k[1]);
    data[p] = h[i];
  }
  std::vector<Complex> ks(fft.spectrum_size()), ds(fft.spectrum_size());
  fft.forward(kernel, ks);
  fft.forward(data, ds);
  for (std::size_t s = 0; s < ds.size(); ++s) ds[s] *= ks[s];
  fft.inverse(ds, data);
  ScalarField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto k = grid.node_indices(i);
    std::size_t p = grid.dim() == 1 ? static_cast<std::size_t>(k[0])
                                    : static_cast<std::size_t>(k[0]) * m + static_cast<std::size_t>(k[1]);
    out[i] = data[p];
  }
  return out;
}

}  // namespace

RieszResult riesz_potential(const ScalarField& h, double alpha, RieszBackend backend) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("Riesz potential order must satisfy 0 < alpha < 1");
  if (backend == RieszBackend::quadrature) return {riesz_quadrature(h, alpha), 0.0};
  const Fourier& fft = Fourier::for_grid(h.grid());
  std::vector<Complex> spec(fft.spectrum_size());
  fft.forward(h.values(), spec);
  RieszResult result;
  result.dropped_mean = spec[0].real() / static_cast<double>(h.grid().size());
  spec[0] = 0.0;
  for (std::size_t s = 1; s < spec.size(); ++s) spec[s] *= std::pow(symbol_magnitude(fft.wavenumber(s)), -alpha);
  result.field = ScalarField(h.grid());
  fft.inverse(spec, result.field.values());
  return result;
}

std::vector<std::uint8_t> centered_window(const Grid& grid, double half_width) {
  std::vector<std::uint8_t> window(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto x = grid.node_position(i);
    window[i] = std::abs(x[0]) <= half_width && std::abs(x[1]) <= half_width ? 1 : 0;
  }
  return window;
}

double check_identity_int1(const ScalarField& u, double sigma, RieszBackend backend,
                           std::span<const std::uint8_t> window) {
  FracOrder checked(sigma);
  if (sigma == 1.0) return 0.0;
  VectorField lhs = frac_gradient(u, sigma);
  VectorField grad = classical_gradient(u);
  double diff = 0.0, ref = 0.0;
  for (int j = 0; j < u.grid().dim(); ++j) {
    ScalarField component(u.grid(), grad.component_data(j));
    ScalarField rhs = riesz_potential(component, 1.0 - sigma, backend).field;
    auto l = lhs.component(j);
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (!window.empty() && !window[i]) continue;
      diff += (l[i] - rhs[i]) * (l[i] - rhs[i]);
      ref += l[i] * l[i];
    }
  }
  return ref > 0.0 ? std::sqrt(diff / ref) : std::sqrt(diff);
}

double h_sigma_norm(const ScalarField& field, double sigma) { return l2_norm(frac_gradient(field, sigma)); }

NormSuite norms(const ScalarField& field, double sigma) {
  return {l1_norm(field), l2_norm(field), linf_norm(field), h_sigma_norm(field, sigma)};
}

}  // namespace fracvi
