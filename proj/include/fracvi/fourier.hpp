#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include "fracvi/grid.hpp"

namespace fracvi {

using Complex = std::complex<double>;

/// Real-to-half-complex transform on a grid.
///
/// The half spectrum keeps the last axis up to n/2 inclusive: n/2+1 entries in
/// 1D, n * (n/2+1) in 2D, row-major. Plans are created once per grid shape and
/// shared; execution uses caller memory, so concurrent use on distinct buffers
/// is safe.
class Fourier {
 public:
  static const Fourier& for_grid(const Grid& grid);

  std::size_t spectrum_size() const { return spectrum_size_; }
  const Grid& grid() const { return grid_; }

  /// Unnormalized forward transform.
  void forward(std::span<const double> in, std::span<Complex> out) const;
  /// Inverse transform including the 1/n^dim factor. `in` is overwritten.
  void inverse(std::span<Complex> in, std::span<double> out) const;

  /// Array indices (k0, k1) of half-spectrum entry s. In 1D k1 = 0.
  std::array<int, 2> frequency_indices(std::size_t s) const;
  /// Wavenumber vector xi of spectrum entry s.
  std::array<double, 2> wavenumber(std::size_t s) const;
  /// True when the entry lies on the Nyquist line k = n/2 along axis j.
  bool is_nyquist(std::size_t s, int axis) const;

  ~Fourier();
  Fourier(const Fourier&) = delete;
  Fourier& operator=(const Fourier&) = delete;

 private:
  explicit Fourier(const Grid& grid);

  Grid grid_;
  std::size_t spectrum_size_ = 0;
  std::size_t half_ = 0;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace fracvi
