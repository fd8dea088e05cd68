#include "fracvi/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "fracvi/errors.hpp"

namespace fracvi {

namespace {

// FFTW planning is not thread safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct AlignedBuffers {
  double* real = nullptr;
  fftw_complex* spectrum = nullptr;
  std::size_t real_size = 0;
  std::size_t spectrum_size = 0;

  void reserve(std::size_t nreal, std::size_t nspec) {
    if (nreal > real_size) {
      fftw_free(real);
      real = fftw_alloc_real(nreal);
      real_size = nreal;
    }
    if (nspec > spectrum_size) {
      fftw_free(spectrum);
      spectrum = fftw_alloc_complex(nspec);
      spectrum_size = nspec;
    }
  }
  ~AlignedBuffers() {
    fftw_free(real);
    fftw_free(spectrum);
  }
};

AlignedBuffers& scratch() {
  thread_local AlignedBuffers buffers;
  return buffers;
}

}  // namespace

const Fourier& Fourier::for_grid(const Grid& grid) {
  static std::map<std::tuple<int, int, double>, std::unique_ptr<Fourier>> registry;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto key = std::make_tuple(grid.dim(), grid.n(), grid.half_length());
  auto it = registry.find(key);
  if (it == registry.end()) it = registry.emplace(key, std::unique_ptr<Fourier>(new Fourier(grid))).first;
  return *it->second;
}

Fourier::Fourier(const Grid& grid) : grid_(grid) {
  const int n = grid.n();
  half_ = static_cast<std::size_t>(n / 2 + 1);
  spectrum_size_ = grid.dim() == 1 ? half_ : static_cast<std::size_t>(n) * half_;
  double* in = fftw_alloc_real(grid.size());
  fftw_complex* out = fftw_alloc_complex(spectrum_size_);
  // FFTW_ESTIMATE keeps plans deterministic from run to run.
  if (grid.dim() == 1) {
    forward_plan_ = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_c2r_1d(n, out, in, FFTW_ESTIMATE);
  } else {
    forward_plan_ = fftw_plan_dft_r2c_2d(n, n, in, out, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_c2r_2d(n, n, out, in, FFTW_ESTIMATE);
  }
  fftw_free(in);
  fftw_free(out);
  if (!forward_plan_ || !inverse_plan_) throw Error("FFT planning failed");
}

Fourier::~Fourier() {
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void Fourier::forward(std::span<const double> in, std::span<Complex> out) const {
  auto& buf = scratch();
  buf.reserve(grid_.size(), spectrum_size_);
  std::copy(in.begin(), in.end(), buf.real);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), buf.real, buf.spectrum);
  std::copy_n(reinterpret_cast<const Complex*>(buf.spectrum), spectrum_size_, out.begin());
}

void Fourier::inverse(std::span<Complex> in, std::span<double> out) const {
  auto& buf = scratch();
  buf.reserve(grid_.size(), spectrum_size_);
  std::copy(in.begin(), in.end(), reinterpret_cast<Complex*>(buf.spectrum));
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), buf.spectrum, buf.real);
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) out[i] = buf.real[i] * scale;
}

std::array<int, 2> Fourier::frequency_indices(std::size_t s) const {
  if (grid_.dim() == 1) return {static_cast<int>(s), 0};
  return {static_cast<int>(s / half_), static_cast<int>(s % half_)};
}

std::array<double, 2> Fourier::wavenumber(std::size_t s) const {
  auto k = frequency_indices(s);
  if (grid_.dim() == 1) return {grid_.wavenumber(k[0]), 0.0};
  return {grid_.wavenumber(k[0]), grid_.wavenumber(k[1])};
}

bool Fourier::is_nyquist(std::size_t s, int axis) const {
  auto k = frequency_indices(s);
  return k[axis] == grid_.n() / 2;
}

}  // namespace fracvi
