#include "kgres/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kgres {

namespace {

// Below this radius the removable singularities are evaluated by Taylor series.
constexpr double kSeriesRadius = 1e-4;

// sinh(r)/r
double sinhc(double r) {
  if (r < kSeriesRadius) {
    const double r2 = r * r;
    return 1.0 + r2 / 6.0 * (1.0 + r2 / 20.0 * (1.0 + r2 / 42.0));
  }
  return std::sinh(r) / r;
}

// r/sinh(r)
double inv_sinhc(double r) {
  if (r < kSeriesRadius) {
    const double r2 = r * r;
    return 1.0 - r2 / 6.0 + 7.0 * r2 * r2 / 360.0 - 31.0 * r2 * r2 * r2 / 15120.0;
  }
  return r / std::sinh(r);
}

// (1/r^2 - 1/sinh^2 r)
double metric_correction(double r) {
  if (r < kSeriesRadius) {
    const double r2 = r * r;
    return 1.0 / 3.0 - r2 / 15.0 + 2.0 * r2 * r2 / 189.0 - r2 * r2 * r2 / 675.0;
  }
  const double s = std::sinh(r);
  return 1.0 / (r * r) - 1.0 / (s * s);
}

// (cosh r - r/sinh r)/r^2
double eta_correction(double r) {
  if (r < kSeriesRadius) {
    const double r2 = r * r;
    return 2.0 / 3.0 + r2 / 45.0 + 13.0 * r2 * r2 / 3780.0;
  }
  return (std::cosh(r) - r / std::sinh(r)) / (r * r);
}

// (r/tanh r - 1)/r^2
double gamma_correction(double r) {
  if (r < kSeriesRadius) {
    const double r2 = r * r;
    return 1.0 / 3.0 - r2 / 45.0 + 2.0 * r2 * r2 / 945.0;
  }
  return (r / std::tanh(r) - 1.0) / (r * r);
}

// (tanh r / r - 1)/r^2
double gamma_tilde_correction(double r) {
  if (r < kSeriesRadius) {
    const double r2 = r * r;
    return -1.0 / 3.0 + 2.0 * r2 / 15.0 - 17.0 * r2 * r2 / 315.0;
  }
  return (std::tanh(r) / r - 1.0) / (r * r);
}

// atanh(q)/q
double atanhc(double q) {
  if (q < kSeriesRadius) {
    const double q2 = q * q;
    return 1.0 + q2 / 3.0 + q2 * q2 / 5.0 + q2 * q2 * q2 / 7.0;
  }
  return std::atanh(q) / q;
}

// Matrix [[z2^2, -z1 z2], [-z1 z2, z1^2]] = |z|^2 (z-perp)(z-perp)^T.
Mat2 perp_outer(Vec2 z) {
  return {{{z[1] * z[1], -z[0] * z[1]}, {-z[0] * z[1], z[0] * z[0]}}};
}

Mat2 identity_plus(double s, const Mat2& m) {
  return {{{1.0 + s * m[0][0], s * m[0][1]}, {s * m[1][0], 1.0 + s * m[1][1]}}};
}

}  // namespace

double HyperboloidPoint::residual() const {
  const double s = std::hypot(w1, w2);
  return std::abs((w0 - s) * (w0 + s) - 1.0);
}

HyperboloidPoint HyperboloidPoint::checked(double w0, double w1, double w2, double tol) {
  HyperboloidPoint p{w0, w1, w2};
  if (!(w0 >= 1.0) || !std::isfinite(w1) || !std::isfinite(w2)) {
    throw std::invalid_argument("hyperboloid point requires w0 >= 1 and finite components");
  }
  if (p.residual() > tol * std::max(1.0, w0 * w0)) {
    throw std::invalid_argument("point is off the hyperboloid: residual " + std::to_string(p.residual()));
  }
  return p;
}

HyperbolicCoords to_hyperbolic(double t, Vec2 x, double K) {
  const double big_t = t + 2.0 * K;
  const double r = std::hypot(x[0], x[1]);
  if (!(r < big_t)) {
    throw std::invalid_argument("point (t, x) lies outside the light cone |x| < t + 2K");
  }
  HyperbolicCoords out;
  out.tau = std::sqrt((big_t - r) * (big_t + r));
  const double scale = atanhc(r / big_t) / big_t;
  out.z = {x[0] * scale, x[1] * scale};
  return out;
}

CartesianPoint from_hyperbolic(double tau, Vec2 z, double K) {
  const double rho = std::hypot(z[0], z[1]);
  const double s = tau * sinhc(rho);
  return {tau * std::cosh(rho) - 2.0 * K, {s * z[0], s * z[1]}};
}

HyperboloidPoint omega(Vec2 z) {
  const double rho = std::hypot(z[0], z[1]);
  const double s = sinhc(rho);
  return {std::cosh(rho), -s * z[0], -s * z[1]};
}

HyperboloidPoint omega_polar(double rho, double theta) {
  const double sh = std::sinh(rho);
  return {std::cosh(rho), -sh * std::cos(theta), -sh * std::sin(theta)};
}

MetricData metric(Vec2 z) {
  const double rho = std::hypot(z[0], z[1]);
  MetricData out;
  out.g = identity_plus(-metric_correction(rho), perp_outer(z));
  const double s = sinhc(rho);
  out.G = s * s;
  return out;
}

double metric_split_form(Vec2 z, Vec2 zeta) {
  const double rho = std::hypot(z[0], z[1]);
  if (rho == 0.0) {
    return zeta[0] * zeta[0] + zeta[1] * zeta[1];
  }
  const double radial = (z[0] * zeta[0] + z[1] * zeta[1]) / rho;
  const double wedge = z[0] * zeta[1] - z[1] * zeta[0];
  const double sh = std::sinh(rho);
  return radial * radial + wedge * wedge / (sh * sh);
}

EtaMatrix eta(Vec2 z) {
  const double rho = std::hypot(z[0], z[1]);
  const double s = sinhc(rho);
  const double base = inv_sinhc(rho);
  const double corr = eta_correction(rho);
  EtaMatrix e{};
  e[0] = {-s * z[0], -s * z[1]};
  e[1] = {base + corr * z[0] * z[0], corr * z[0] * z[1]};
  e[2] = {corr * z[0] * z[1], base + corr * z[1] * z[1]};
  return e;
}

GammaCoefficients gamma_coeffs(Vec2 z) {
  const double rho = std::hypot(z[0], z[1]);
  const Mat2 p = perp_outer(z);
  return {identity_plus(gamma_correction(rho), p), identity_plus(gamma_tilde_correction(rho), p)};
}

double japanese_bracket(Vec2 z) { return std::sqrt(1.0 + z[0] * z[0] + z[1] * z[1]); }

double weight_chi(Vec2 z, double kappa) { return std::exp(-kappa * japanese_bracket(z)); }

WeightChi::WeightChi(double kappa) : kappa_(kappa) {
  if (!(kappa > 0.0)) {
    throw std::invalid_argument("weight exponent kappa must be positive");
  }
  if (below_recommended()) {
    std::clog << "warning: kappa = " << kappa << " is below the recommended minimum " << recommended_kappa << '\n';
  }
}

double WeightChi::operator()(Vec2 z) const { return weight_chi(z, kappa_); }

Vec2 WeightChi::gradient(Vec2 z) const {
  const double br = japanese_bracket(z);
  const double f = -kappa_ * weight_chi(z, kappa_) / br;
  return {f * z[0], f * z[1]};
}

double energy_E0(std::span<const double> v, std::span<const double> v_tau, const ZGrid& grid, double m, double tau) {
  const std::size_t n = grid.n;
  if (n < 3 || v.size() != grid.size() || v_tau.size() != grid.size()) {
    throw std::invalid_argument("energy_E0: field size does not match the grid");
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || !std::isfinite(v_tau[i])) {
      throw std::invalid_argument("energy_E0: non-finite field value at index " + std::to_string(i));
    }
  }
  const double h = grid.step();
  auto at = [&](std::size_t i, std::size_t j) { return v[i * n + j]; };
  auto diff = [&](std::size_t i, std::size_t j, bool along_first) {
    const std::size_t idx = along_first ? i : j;
    auto sample = [&](std::size_t k) { return along_first ? at(k, j) : at(i, k); };
    if (idx == 0) return (-3.0 * sample(0) + 4.0 * sample(1) - sample(2)) / (2.0 * h);
    if (idx == n - 1) return (3.0 * sample(n - 1) - 4.0 * sample(n - 2) + sample(n - 3)) / (2.0 * h);
    return (sample(idx + 1) - sample(idx - 1)) / (2.0 * h);
  };

  std::vector<double> row_sums(n, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double wj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      const Vec2 z = grid.point(i, j);
      const MetricData md = metric(z);
      const Vec2 grad{diff(i, j, true), diff(i, j, false)};
      double form = 0.0;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          form += md.g[a][b] * grad[a] * grad[b];
        }
      }
      const double vt = v_tau[i * n + j];
      const double vv = at(i, j);
      const double density = vt * vt + form / (tau * tau) + m * m * vv * vv;
      acc += wi * wj * density * std::sqrt(md.G);
    }
    row_sums[i] = acc;
  }
  double total = 0.0;
  for (double s : row_sums) total += s;
  return 0.5 * total * h * h;
}

void write_geometry_csv(std::ostream& out, const ZGrid& grid) {
  out << "z1,z2,omega0,omega1,omega2,G\n";
  char buf[256];
  for (std::size_t i = 0; i < grid.n; ++i) {
    for (std::size_t j = 0; j < grid.n; ++j) {
      const Vec2 z = grid.point(i, j);
      const HyperboloidPoint w = omega(z);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", z[0], z[1], w.w0, w.w1, w.w2,
                    metric(z).G);
      out << buf;
    }
  }
}

}  // namespace kgres
