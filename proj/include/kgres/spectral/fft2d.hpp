#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace kgres::spectral {

/// Real 2D transform of an N x N row-major array to its N x (N/2+1) half spectrum.
/// Plans use FFTW_ESTIMATE so repeated runs are bitwise reproducible.
class Fft2d {
 public:
  /// threads == 1 uses the plain planner; otherwise the OpenMP-threaded one (0 = all).
  explicit Fft2d(std::size_t n, int threads = 1);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] std::size_t spectrum_size() const { return n_ * (n_ / 2 + 1); }
  [[nodiscard]] std::size_t real_size() const { return n_ * n_; }

  /// Unnormalized forward transform.
  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  /// Inverse transform including the 1/N^2 factor. The input is left untouched.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace kgres::spectral
