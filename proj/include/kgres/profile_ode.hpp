#pragma once

#include <complex>
#include <iosfwd>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kgres/hyperbolic.hpp"
#include "kgres/quadratic_form.hpp"
#include "kgres/resonance.hpp"

namespace kgres {

using cplx = std::complex<double>;

/// One decoupled ray z with its amplitudes and cached coefficients.
struct ProfileSample {
  Vec2 z{0.0, 0.0};
  cplx beta1{0.0, 0.0};
  cplx beta2{0.0, 0.0};
  double chi1 = 0.0;  // chi(z)/m1
  double chi2 = 0.0;  // chi(z)/m2
  cplx phi1{0.0, 0.0};
  cplx phi2{0.0, 0.0};
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  bool has_lambdas = false;  // both Phi_j(omega(z)) nonzero
};

struct ProfileState {
  double tau = 1.0;
  std::vector<ProfileSample> samples;
};

/// r_j(tau, z) = C eps tau^(delta-2) exp(i (nu_j log tau + phase_j)) or zero.
struct ForcingSpec {
  enum class Mode { Zero, PowerLaw };
  Mode mode = Mode::Zero;
  double C = 1.0;
  double eps = 0.01;
  double delta = 0.5;
  double nu1 = 1.0;
  double nu2 = -0.5;
  double phase1 = 0.0;
  double phase2 = 0.0;

  /// Throws std::invalid_argument when delta is outside (0, 1) or C, eps are negative.
  void validate() const;
  [[nodiscard]] cplx evaluate(int j, double tau) const;
  /// Envelope C eps tau^(delta-2).
  [[nodiscard]] double envelope(double tau) const;
};

/// (lambda1, lambda2) with lambda1 lambda2 = exp(-4<z>). Throws when either Phi vanishes.
std::pair<double, double> lambdas(Vec2 z, double chi1, double chi2, cplx phi1, cplx phi2);

/// Builds samples with cached chi_j and Phi_j(omega(z)). Initial amplitudes are set per sample.
ProfileState make_profile_state(const NonlinearSystem& system, const std::vector<Vec2>& zs, double tau0,
                                double kappa = WeightChi::recommended_kappa);

/// Default rays: rho in {0, 0.5, 1, 2, 4}, theta in {0, pi/2, pi, 3pi/2}.
std::vector<Vec2> default_z_samples();

struct BetaRate {
  cplx d_beta1;
  cplx d_beta2;
};

/// d/dtau of (beta1, beta2) for each sample.
std::vector<BetaRate> rhs(const ProfileState& state, const ForcingSpec& forcing);

struct IntegrateOptions {
  double tau_end = 1e4;
  int steps_per_decade = 2000;
  int records_per_decade = 10;  // trajectory sampling, 0 keeps only endpoints
  double eps = 0.01;            // regularizer of B_eps
  double max_step_rate = 0.05;  // above this h * |d_s beta|/|beta| the run is flagged
};

struct TrajectoryRecord {
  double tau;
  std::size_t sample;
  cplx beta1;
  cplx beta2;
  double B;  // NaN when the weights are undefined
};

struct IntegrateResult {
  ProfileState final_state;
  std::vector<TrajectoryRecord> records;
  std::size_t steps = 0;
  double step_s = 0.0;
  double max_rate = 0.0;       // max over steps and samples of h |d_s beta| / max(|beta|, tiny)
  bool under_resolved = false; // max_rate exceeded the option threshold
  std::vector<double> max_relative_drift;  // per sample, of lambda1|b1|^2 + lambda2|b2|^2 (NaN without weights)
};

/// Fixed-step classical RK4 in s = log tau. Samples are integrated independently (in parallel).
IntegrateResult integrate(const ProfileState& state, const ForcingSpec& forcing, const IntegrateOptions& options);

/// lambda1|b1|^2 + lambda2|b2|^2.
double weighted_square(const ProfileSample& s);

/// B_eps = sqrt(lambda1|b1|^2 + lambda2|b2|^2 + eps^2). Throws when the weights are undefined.
double lyapunov(const ProfileSample& s, double eps);

/// Closed-form beta2 when Phi1 = 0 and r = 0.
cplx counterexample_closed_form(double tau, double tau0, cplx beta1_0, cplx beta2_0, cplx chi2_phi2);

/// |lambda1 chi1 Phi1 - lambda2 chi2 conj(Phi2)|.
double hermitian_check(double chi1, double chi2, cplx phi1, cplx phi2, double lambda1, double lambda2);
double hermitian_check(const ProfileSample& s);

/// Upper bound for |beta1| + |beta2| at tau from B_eps(tau0) and the forcing envelope.
double boundedness_bound(const ProfileSample& initial, double tau0, double tau, const ForcingSpec& forcing, double eps);

/// Columns tau,z1,z2,re_beta1,im_beta1,re_beta2,im_beta2,B_eps.
void write_trajectory_csv(std::ostream& out, const IntegrateResult& result, const ProfileState& initial);

/// Drift, log-growth coefficient of |beta2| and the boundedness sup.
nlohmann::json profile_summary(const IntegrateResult& result, const ProfileState& initial, const ForcingSpec& forcing,
                               double eps);

}  // namespace kgres
