#include "kgres/spectral/fft2d.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>
#include <omp.h>

namespace kgres::spectral {

namespace {

// The FFTW planner is not thread safe; sweeps build solvers concurrently.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void init_threads_once() {
  static const bool ok = fftw_init_threads() != 0;
  if (!ok) throw std::runtime_error("fftw_init_threads failed");
}

}  // namespace

struct Fft2d::Impl {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

Fft2d::Fft2d(std::size_t n, int threads) : n_(n), impl_(std::make_unique<Impl>()) {
  if (n < 4 || (n & (n - 1)) != 0) throw std::invalid_argument("FFT size must be a power of two >= 4");
  std::lock_guard lock(planner_mutex());
  impl_->real = fftw_alloc_real(real_size());
  impl_->spec = fftw_alloc_complex(spectrum_size());
  if (impl_->real == nullptr || impl_->spec == nullptr) throw std::bad_alloc();
  init_threads_once();
  fftw_plan_with_nthreads(threads == 1 ? 1 : (threads <= 0 ? omp_get_max_threads() : threads));
  const int ni = static_cast<int>(n);
  impl_->fwd = fftw_plan_dft_r2c_2d(ni, ni, impl_->real, impl_->spec, FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_c2r_2d(ni, ni, impl_->spec, impl_->real, FFTW_ESTIMATE);
  fftw_plan_with_nthreads(1);
  if (impl_->fwd == nullptr || impl_->inv == nullptr) throw std::runtime_error("FFTW planning failed");
}

Fft2d::~Fft2d() {
  std::lock_guard lock(planner_mutex());
  if (impl_->fwd) fftw_destroy_plan(impl_->fwd);
  if (impl_->inv) fftw_destroy_plan(impl_->inv);
  fftw_free(impl_->real);
  fftw_free(impl_->spec);
}

void Fft2d::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  if (in.size() != real_size() || out.size() != spectrum_size()) throw std::invalid_argument("forward: size mismatch");
  std::memcpy(impl_->real, in.data(), real_size() * sizeof(double));
  fftw_execute(impl_->fwd);
  std::memcpy(static_cast<void*>(out.data()), impl_->spec, spectrum_size() * sizeof(fftw_complex));
}

void Fft2d::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  if (in.size() != spectrum_size() || out.size() != real_size()) throw std::invalid_argument("inverse: size mismatch");
  std::memcpy(static_cast<void*>(impl_->spec), in.data(), spectrum_size() * sizeof(fftw_complex));
  fftw_execute(impl_->inv);
  const double scale = 1.0 / static_cast<double>(real_size());
  std::transform(impl_->real, impl_->real + real_size(), out.begin(), [scale](double v) { return v * scale; });
}

}  // namespace kgres::spectral
