#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

// Pointwise and reduction kernels of the split-step solver. The serial versions are the
// reference; the parallel versions split rows across OpenMP threads and must agree
// bitwise because every reduction is accumulated per row and combined in row order.

namespace kgres::spectral::kernels {

using cplx = std::complex<double>;

struct NormSums {
  double sum2 = 0.0;    // sum f^2
  double sum4 = 0.0;    // sum f^4
  double max_abs = 0.0;
};

struct EnergySplit {
  double total = 0.0;
  double selected = 0.0;
};

#define KGRES_KERNEL_DECLS                                                                                  \
  /* (uh, ph) <- rotation by omega*dt given c = cos(omega dt), s = sin(omega dt). */                       \
  void rotate(cplx* uh, cplx* ph, const double* omega, const double* c, const double* s, std::size_t rows,  \
              std::size_t cols);                                                                            \
  /* out = i xi in, zeroed where mask == 0 (mask may be null). */                                           \
  void derivative(const cplx* in, const double* xi, const std::uint8_t* mask, cplx* out, std::size_t rows,  \
                  std::size_t cols);                                                                        \
  void apply_mask(const cplx* in, const std::uint8_t* mask, cplx* out, std::size_t rows, std::size_t cols); \
  /* out += coeff * a * b */                                                                                \
  void accumulate_product(double* out, double coeff, const double* a, const double* b, std::size_t rows,    \
                          std::size_t cols);                                                                \
  /* ph += dt * qhat, restricted to mask when given. */                                                     \
  void kick(cplx* ph, const cplx* qhat, const std::uint8_t* mask, double dt, std::size_t rows,              \
            std::size_t cols);                                                                              \
  NormSums norms(const double* f, std::size_t rows, std::size_t cols);                                      \
  /* Total of density and the part where radius > r0. */                                                    \
  EnergySplit exterior(const double* density, const double* radius, double r0, std::size_t rows,            \
                       std::size_t cols);                                                                   \
  /* Hermitian-weighted |ph|^2 + omega^2 |uh|^2, total and the part where flag != 0. */                    \
  EnergySplit spectral_energy(const cplx* uh, const cplx* ph, const double* omega, const double* weight,    \
                              const std::uint8_t* flag, std::size_t rows, std::size_t cols);

namespace serial {
KGRES_KERNEL_DECLS
}  // namespace serial

namespace parallel {
KGRES_KERNEL_DECLS
}  // namespace parallel

#undef KGRES_KERNEL_DECLS

}  // namespace kgres::spectral::kernels
