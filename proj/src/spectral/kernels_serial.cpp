#include <algorithm>
#include <cmath>
#include <vector>

#include "kgres/spectral/kernels.hpp"

namespace kgres::spectral::kernels::serial {

void rotate(cplx* uh, cplx* ph, const double* omega, const double* c, const double* s, std::size_t rows,
            std::size_t cols) {
  const std::size_t n = rows * cols;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx u = uh[i];
    const cplx p = ph[i];
    uh[i] = u * c[i] + p * (s[i] / omega[i]);
    ph[i] = -u * (omega[i] * s[i]) + p * c[i];
  }
}

void derivative(const cplx* in, const double* xi, const std::uint8_t* mask, cplx* out, std::size_t rows,
                std::size_t cols) {
  const std::size_t n = rows * cols;
  for (std::size_t i = 0; i < n; ++i) {
    const bool keep = mask == nullptr || mask[i] != 0;
    out[i] = keep ? cplx(-xi[i] * in[i].imag(), xi[i] * in[i].real()) : cplx(0.0, 0.0);
  }
}

void apply_mask(const cplx* in, const std::uint8_t* mask, cplx* out, std::size_t rows, std::size_t cols) {
  const std::size_t n = rows * cols;
  for (std::size_t i = 0; i < n; ++i) out[i] = mask[i] != 0 ? in[i] : cplx(0.0, 0.0);
}

void accumulate_product(double* out, double coeff, const double* a, const double* b, std::size_t rows,
                        std::size_t cols) {
  const std::size_t n = rows * cols;
  for (std::size_t i = 0; i < n; ++i) out[i] += coeff * a[i] * b[i];
}

void kick(cplx* ph, const cplx* qhat, const std::uint8_t* mask, double dt, std::size_t rows, std::size_t cols) {
  const std::size_t n = rows * cols;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask == nullptr || mask[i] != 0) ph[i] += dt * qhat[i];
  }
}

NormSums norms(const double* f, std::size_t rows, std::size_t cols) {
  std::vector<NormSums> per_row(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    NormSums acc;
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = f[r * cols + c];
      const double v2 = v * v;
      acc.sum2 += v2;
      acc.sum4 += v2 * v2;
      acc.max_abs = std::max(acc.max_abs, std::abs(v));
    }
    per_row[r] = acc;
  }
  NormSums total;
  for (const auto& r : per_row) {
    total.sum2 += r.sum2;
    total.sum4 += r.sum4;
    total.max_abs = std::max(total.max_abs, r.max_abs);
  }
  return total;
}

EnergySplit exterior(const double* density, const double* radius, double r0, std::size_t rows, std::size_t cols) {
  std::vector<EnergySplit> per_row(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    EnergySplit acc;
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t i = r * cols + c;
      acc.total += density[i];
      if (radius[i] > r0) acc.selected += density[i];
    }
    per_row[r] = acc;
  }
  EnergySplit total;
  for (const auto& r : per_row) {
    total.total += r.total;
    total.selected += r.selected;
  }
  return total;
}

EnergySplit spectral_energy(const cplx* uh, const cplx* ph, const double* omega, const double* weight,
                            const std::uint8_t* flag, std::size_t rows, std::size_t cols) {
  std::vector<EnergySplit> per_row(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    EnergySplit acc;
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t i = r * cols + c;
      const double e = weight[i] * (std::norm(ph[i]) + omega[i] * omega[i] * std::norm(uh[i]));
      acc.total += e;
      if (flag[i] != 0) acc.selected += e;
    }
    per_row[r] = acc;
  }
  EnergySplit total;
  for (const auto& r : per_row) {
    total.total += r.total;
    total.selected += r.selected;
  }
  return total;
}

}  // namespace kgres::spectral::kernels::serial
