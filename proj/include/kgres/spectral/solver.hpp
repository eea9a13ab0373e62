#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgres/quadratic_form.hpp"
#include "kgres/spectral/fft2d.hpp"
#include "kgres/spectral/fits.hpp"

namespace kgres::spectral {

using cplx = std::complex<double>;

/// Raised when the resolution guard trips: too much energy sits in the top modes.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Profile { Bump, Gaussian };

/// Radial profile with support radius K, normalized to 1 at the origin.
/// Bump: Kaiser-Bessel window (shape 16) times exp(a - a/(1 - s^2)), s = |x|/K, a = 0.05.
/// Gaussian: exp(-32 s^2) truncated at s = 1.
double profile_value(Profile p, double r, double K);

struct InitialData {
  Profile profile = Profile::Bump;
  double K = 2.0;
  double eps = 0.05;
  // u_j(0) = eps f_j profile, d_t u_j(0) = eps g_j profile.
  double f1 = 1.0;
  double f2 = 1.0;
  double g1 = 0.0;
  double g2 = 0.0;
};

struct SolverOptions {
  double L = 64.0;
  std::size_t N = 512;
  double m1 = 1.0;
  double m2 = 2.0;
  double horizon = 56.0;   // latest time the run will reach
  double margin = 4.0;     // support_check margin
  bool dealias = true;     // 2/3 rule on products
  bool parallel = true;    // OpenMP kernels and threaded FFT
  int threads = 0;         // 0 = OpenMP default
  double guard_tol = 1e-8; // allowed energy fraction in the top 10% of modes
};

/// Periodic-box state stored spectrally: half spectra of u_j and p_j = d_t u_j.
class FieldState {
 public:
  /// Builds grids and tables. Throws std::invalid_argument if N is not a power of two or
  /// the horizon reaches past L - K - margin (the box would wrap).
  FieldState(const SolverOptions& options, double K);

  [[nodiscard]] const SolverOptions& options() const { return opt_; }
  [[nodiscard]] double t() const { return t_; }
  void set_time(double t) { t_ = t; }
  [[nodiscard]] std::size_t N() const { return opt_.N; }
  [[nodiscard]] std::size_t cols() const { return opt_.N / 2 + 1; }
  [[nodiscard]] double h() const { return 2.0 * opt_.L / static_cast<double>(opt_.N); }
  [[nodiscard]] double x(std::size_t i) const { return -opt_.L + h() * static_cast<double>(i); }
  [[nodiscard]] double K() const { return K_; }
  [[nodiscard]] double mass(int j) const { return j == 1 ? opt_.m1 : opt_.m2; }

  /// Spectra (N x (N/2+1), row-major).
  std::vector<cplx>& u_hat(int j) { return uh_[j - 1]; }
  std::vector<cplx>& p_hat(int j) { return ph_[j - 1]; }
  [[nodiscard]] const std::vector<cplx>& u_hat(int j) const { return uh_[j - 1]; }
  [[nodiscard]] const std::vector<cplx>& p_hat(int j) const { return ph_[j - 1]; }

  /// Physical-space fields (N x N, row-major, first index along x1).
  [[nodiscard]] std::vector<double> u(int j) const;
  [[nodiscard]] std::vector<double> p(int j) const;
  /// d_{x_a} u_j computed spectrally, a = 1 or 2.
  [[nodiscard]] std::vector<double> du(int j, int a) const;
  void set_fields(const std::vector<double>& u1, const std::vector<double>& u2, const std::vector<double>& p1,
                  const std::vector<double>& p2);

  // Tables.
  [[nodiscard]] const std::vector<double>& omega(int j) const { return omega_[j - 1]; }
  [[nodiscard]] const std::vector<double>& xi(int a) const { return xi_[a - 1]; }
  [[nodiscard]] const std::vector<std::uint8_t>& dealias_mask() const { return mask_; }
  [[nodiscard]] const std::vector<std::uint8_t>& tail_flag() const { return tail_; }
  [[nodiscard]] const std::vector<double>& hermitian_weight() const { return weight_; }
  [[nodiscard]] const std::vector<double>& radius() const { return radius_; }

  Fft2d& fft() const { return *fft_; }

 private:
  SolverOptions opt_;
  double K_;
  double t_ = 0.0;
  std::vector<cplx> uh_[2];
  std::vector<cplx> ph_[2];
  std::vector<double> omega_[2];
  std::vector<double> xi_[2];
  std::vector<std::uint8_t> mask_;
  std::vector<std::uint8_t> tail_;
  std::vector<double> weight_;
  std::vector<double> radius_;
  std::unique_ptr<Fft2d> fft_;
};

/// Samples the initial data on the grid.
FieldState init(const SolverOptions& options, const InitialData& data);

/// Exact free Klein-Gordon flow over dt (any sign) per Fourier mode.
void linear_step(FieldState& state, double dt);

/// p_j += dt Q_j(u, du). Derivative-free Q is integrated exactly; Q with time derivatives
/// uses the explicit midpoint rule. Throws GuardError when the resolution guard fails.
void nonlinear_kick(FieldState& state, double dt, const NonlinearSystem& system);

/// Half kick, full linear step, half kick.
void strang_step(FieldState& state, double dt, const NonlinearSystem& system);

/// Fraction of spectral energy in modes with max(|k1|, |k2|) > 0.9 N/2.
double resolution_tail_fraction(const FieldState& state);

/// Free discrete energy sum over both components of w (|p_hat|^2 + omega^2 |u_hat|^2).
double spectral_energy(const FieldState& state);

/// Fraction of the physical energy density outside |x| <= t + K + margin.
/// Throws std::invalid_argument if t > L - K - margin.
double support_check(const FieldState& state, double t, double K, double margin);

/// Named norms for p in {2, 4, inf}: "{L2,L4,Linf}_{u1,u2,dt_u1,dx1_u1,...,du1,du2,u,total_u1,total_u2,total}".
/// "du{j}" sums the three first-derivative norms, "u" sums u1 and u2, "total_u{j}" adds u_j and du_j,
/// "total" adds both components.
std::map<std::string, double> norms(const FieldState& state, const std::vector<std::string>& p_list = {"L2", "L4", "Linf"});

struct RunOptions {
  double dt = 0.02;
  double t_end = 56.0;
  double sample_every = 0.5;
  double margin = 4.0;
  std::vector<std::string> p_list{"L2", "L4", "Linf"};
};

struct RunResult {
  std::vector<double> t;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;  // one per name
  std::vector<double> exterior_fraction;
  double max_exterior_fraction = 0.0;
  double max_tail_fraction = 0.0;
  bool guard_tripped = false;
  std::string guard_message;
  std::size_t steps = 0;

  [[nodiscard]] const std::vector<double>& column(const std::string& name) const;
};

/// Strang stepping from the state to t_end, sampling norms and support fractions.
/// A guard failure stops the run and is reported in the result.
RunResult run(FieldState& state, const NonlinearSystem& system, const RunOptions& options);

/// CSV with header t,<names...>,exterior_fraction.
void write_norms_csv(std::ostream& out, const RunResult& result);

}  // namespace kgres::spectral
