#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace kgres {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

/// Point of the unit hyperboloid w0^2 - w1^2 - w2^2 = 1, w0 >= 1.
struct HyperboloidPoint {
  double w0 = 1.0;
  double w1 = 0.0;
  double w2 = 0.0;

  [[nodiscard]] double operator[](int a) const { return a == 0 ? w0 : (a == 1 ? w1 : w2); }

  /// |w0^2 - w1^2 - w2^2 - 1|, evaluated in factored form.
  [[nodiscard]] double residual() const;

  /// Validates w0 >= 1 and residual <= tol * max(1, w0^2). Throws std::invalid_argument.
  static HyperboloidPoint checked(double w0, double w1, double w2, double tol = 1e-12);
};

struct HyperbolicCoords {
  double tau = 1.0;
  Vec2 z{0.0, 0.0};
};

struct CartesianPoint {
  double t = 0.0;
  Vec2 x{0.0, 0.0};
};

/// t + 2K = tau cosh|z|, x = tau (z/|z|) sinh|z|. Throws when |x| >= t + 2K.
HyperbolicCoords to_hyperbolic(double t, Vec2 x, double K);
CartesianPoint from_hyperbolic(double tau, Vec2 z, double K);

/// omega(z) = (cosh rho, -sinh rho cos theta, -sinh rho sin theta) with z = rho (cos theta, sin theta).
HyperboloidPoint omega(Vec2 z);

/// omega evaluated from polar coordinates; used by dense sweeps.
HyperboloidPoint omega_polar(double rho, double theta);

struct MetricData {
  Mat2 g{};          // g^{jk}
  double G = 1.0;    // (sinh|z|/|z|)^2 = det(g)^{-1}
};

MetricData metric(Vec2 z);

/// Quadratic form zeta^T g zeta in the split form |zhat.zeta|^2 + |z ^ zeta|^2 / sinh^2|z|.
double metric_split_form(Vec2 z, Vec2 zeta);

/// Coefficients of d_a = omega_a(z) d_tau + (1/tau) sum_j eta_{aj}(z) d_{z_j}; rows a = 0..2.
using EtaMatrix = std::array<std::array<double, 2>, 3>;
EtaMatrix eta(Vec2 z);

/// Gamma_j = sum_k c_{jk} d_{z_k} and d_{z_k} = sum_l ctilde_{kl} Gamma_l.
struct GammaCoefficients {
  Mat2 c{};
  Mat2 c_tilde{};
};
GammaCoefficients gamma_coeffs(Vec2 z);

/// chi(z) = exp(-kappa <z>) with <z> = sqrt(1 + |z|^2).
class WeightChi {
 public:
  static constexpr double recommended_kappa = 6.0;

  /// kappa below the recommended value is accepted with a warning on std::clog.
  explicit WeightChi(double kappa = recommended_kappa);

  [[nodiscard]] double kappa() const { return kappa_; }
  [[nodiscard]] bool below_recommended() const { return kappa_ < recommended_kappa; }
  [[nodiscard]] double operator()(Vec2 z) const;
  [[nodiscard]] Vec2 gradient(Vec2 z) const;

 private:
  double kappa_;
};

double japanese_bracket(Vec2 z);
double weight_chi(Vec2 z, double kappa);

/// Uniform tensor grid on [lo, hi]^2 in z, n points per axis, row-major (z1 index slow).
struct ZGrid {
  double lo = -1.0;
  double hi = 1.0;
  std::size_t n = 2;

  [[nodiscard]] double step() const { return (hi - lo) / static_cast<double>(n - 1); }
  [[nodiscard]] Vec2 point(std::size_t i, std::size_t j) const {
    return {lo + step() * static_cast<double>(i), lo + step() * static_cast<double>(j)};
  }
  [[nodiscard]] std::size_t size() const { return n * n; }
};

/// E_0(tau; v, m) by tensor trapezoid on the grid with second-order differences for d_z v.
/// Throws std::invalid_argument on non-finite input or size mismatch.
double energy_E0(std::span<const double> v, std::span<const double> v_tau, const ZGrid& grid, double m, double tau);

/// Diagnostic dump: z1,z2,w0,w1,w2,G per grid point.
void write_geometry_csv(std::ostream& out, const ZGrid& grid);

}  // namespace kgres
