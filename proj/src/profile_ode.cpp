#include "kgres/profile_ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace kgres {

namespace {

constexpr cplx kI{0.0, 1.0};

struct Amplitudes {
  cplx b1;
  cplx b2;
};

// d beta / d s with s = log tau, at a single sample.
Amplitudes rate_s(const ProfileSample& p, double tau, Amplitudes b, const ForcingSpec& f) {
  Amplitudes out;
  out.b1 = -kI * p.chi1 * p.phi1 * std::conj(b.b1) * b.b2;
  out.b2 = -kI * p.chi2 * p.phi2 * b.b1 * b.b1;
  if (f.mode != ForcingSpec::Mode::Zero) {
    out.b1 -= kI * tau * f.evaluate(1, tau);
    out.b2 -= kI * tau * f.evaluate(2, tau);
  }
  return out;
}

Amplitudes axpy(Amplitudes b, double h, Amplitudes k) { return {b.b1 + h * k.b1, b.b2 + h * k.b2}; }

double weighted(const ProfileSample& p, Amplitudes b) {
  return p.lambda1 * std::norm(b.b1) + p.lambda2 * std::norm(b.b2);
}

double csv_B(const ProfileSample& p, Amplitudes b, double eps) {
  if (!p.has_lambdas) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(weighted(p, b) + eps * eps);
}

}  // namespace

void ForcingSpec::validate() const {
  if (mode == Mode::Zero) return;
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("forcing delta must lie in (0, 1)");
  if (!(C >= 0.0) || !(eps >= 0.0)) throw std::invalid_argument("forcing C and eps must be nonnegative");
}

double ForcingSpec::envelope(double tau) const {
  if (mode == Mode::Zero) return 0.0;
  return C * eps * std::pow(tau, delta - 2.0);
}

cplx ForcingSpec::evaluate(int j, double tau) const {
  if (mode == Mode::Zero) return {0.0, 0.0};
  const double nu = j == 1 ? nu1 : nu2;
  const double ph = j == 1 ? phase1 : phase2;
  return envelope(tau) * std::polar(1.0, nu * std::log(tau) + ph);
}

std::pair<double, double> lambdas(Vec2 z, double chi1, double chi2, cplx phi1, cplx phi2) {
  const double a1 = std::abs(phi1);
  const double a2 = std::abs(phi2);
  if (a1 == 0.0 || a2 == 0.0) {
    throw std::invalid_argument("Lyapunov weights need nonvanishing Phi1 and Phi2 at the sample");
  }
  if (!(chi1 > 0.0) || !(chi2 > 0.0)) throw std::invalid_argument("chi1 and chi2 must be positive");
  const double br = japanese_bracket(z);
  const double l1 = std::exp(-2.0 * br) * std::sqrt((chi2 * a2) / (chi1 * a1));
  const double l2 = std::exp(-4.0 * br) / l1;
  return {l1, l2};
}

std::vector<Vec2> default_z_samples() {
  std::vector<Vec2> out;
  for (double rho : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    for (int q = 0; q < 4; ++q) {
      const double th = q * std::numbers::pi / 2.0;
      out.push_back({rho * std::cos(th), rho * std::sin(th)});
    }
  }
  return out;
}

ProfileState make_profile_state(const NonlinearSystem& system, const std::vector<Vec2>& zs, double tau0,
                                double kappa) {
  if (!(tau0 > 0.0)) throw std::invalid_argument("tau0 must be positive");
  const WeightChi chi(kappa);
  const PhiPolynomial p1 = phi(system, 1);
  const PhiPolynomial p2 = phi(system, 2);
  ProfileState state;
  state.tau = tau0;
  state.samples.reserve(zs.size());
  for (const Vec2& z : zs) {
    ProfileSample s;
    s.z = z;
    const double c = chi(z);
    s.chi1 = c / system.masses.m(1);
    s.chi2 = c / system.masses.m(2);
    const HyperboloidPoint w = omega(z);
    s.phi1 = p1.evaluate(w);
    s.phi2 = p2.evaluate(w);
    if (std::abs(s.phi1) > 0.0 && std::abs(s.phi2) > 0.0) {
      std::tie(s.lambda1, s.lambda2) = lambdas(z, s.chi1, s.chi2, s.phi1, s.phi2);
      s.has_lambdas = true;
    }
    state.samples.push_back(s);
  }
  return state;
}

std::vector<BetaRate> rhs(const ProfileState& state, const ForcingSpec& forcing) {
  std::vector<BetaRate> out;
  out.reserve(state.samples.size());
  for (const auto& p : state.samples) {
    const Amplitudes r = rate_s(p, state.tau, {p.beta1, p.beta2}, forcing);
    out.push_back({r.b1 / state.tau, r.b2 / state.tau});
  }
  return out;
}

IntegrateResult integrate(const ProfileState& state, const ForcingSpec& forcing, const IntegrateOptions& options) {
  forcing.validate();
  if (!(options.tau_end > state.tau)) throw std::invalid_argument("tau_end must exceed the current tau");
  if (options.steps_per_decade < 1) throw std::invalid_argument("steps_per_decade must be positive");
  if (options.records_per_decade < 0) throw std::invalid_argument("records_per_decade must be nonnegative");

  const double s0 = std::log(state.tau);
  const double s1 = std::log(options.tau_end);
  const double decades = (s1 - s0) / std::numbers::ln10;
  const auto steps = static_cast<std::size_t>(std::ceil(decades * options.steps_per_decade - 1e-9));
  const double h = (s1 - s0) / static_cast<double>(steps);
  std::size_t record_every = steps;
  if (options.records_per_decade > 0) {
    record_every = std::max<std::size_t>(1, static_cast<std::size_t>(options.steps_per_decade / options.records_per_decade));
  }

  IntegrateResult result;
  result.steps = steps;
  result.step_s = h;
  result.final_state = state;
  result.final_state.tau = options.tau_end;
  const std::size_t n = state.samples.size();
  result.max_relative_drift.assign(n, 0.0);
  std::vector<std::vector<TrajectoryRecord>> per_sample(n);
  std::vector<double> rate(n, 0.0);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const ProfileSample& p = state.samples[i];
    Amplitudes b{p.beta1, p.beta2};
    const double w0 = p.has_lambdas ? weighted(p, b) : 0.0;
    double drift = p.has_lambdas ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    auto& recs = per_sample[i];
    recs.push_back({state.tau, i, b.b1, b.b2, csv_B(p, b, options.eps)});
    for (std::size_t k = 0; k < steps; ++k) {
      const double s = s0 + h * static_cast<double>(k);
      const double ta = std::exp(s);
      const double tm = std::exp(s + 0.5 * h);
      const double tb = std::exp(s + h);
      const Amplitudes k1 = rate_s(p, ta, b, forcing);
      const Amplitudes k2 = rate_s(p, tm, axpy(b, 0.5 * h, k1), forcing);
      const Amplitudes k3 = rate_s(p, tm, axpy(b, 0.5 * h, k2), forcing);
      const Amplitudes k4 = rate_s(p, tb, axpy(b, h, k3), forcing);
      const double mag = std::max(std::hypot(std::abs(b.b1), std::abs(b.b2)), 1e-300);
      rate[i] = std::max(rate[i], h * std::hypot(std::abs(k1.b1), std::abs(k1.b2)) / mag);
      b.b1 += h / 6.0 * (k1.b1 + 2.0 * k2.b1 + 2.0 * k3.b1 + k4.b1);
      b.b2 += h / 6.0 * (k1.b2 + 2.0 * k2.b2 + 2.0 * k3.b2 + k4.b2);
      if (p.has_lambdas && w0 > 0.0) drift = std::max(drift, std::abs(weighted(p, b) - w0) / w0);
      const bool last = k + 1 == steps;
      if (last || (k + 1) % record_every == 0) {
        recs.push_back({last ? options.tau_end : tb, i, b.b1, b.b2, csv_B(p, b, options.eps)});
      }
    }
    result.final_state.samples[i].beta1 = b.b1;
    result.final_state.samples[i].beta2 = b.b2;
    result.max_relative_drift[i] = drift;
  }

  for (std::size_t i = 0; i < n; ++i) {
    result.max_rate = std::max(result.max_rate, rate[i]);
    result.records.insert(result.records.end(), per_sample[i].begin(), per_sample[i].end());
  }
  result.under_resolved = result.max_rate > options.max_step_rate;
  return result;
}

double weighted_square(const ProfileSample& s) {
  if (!s.has_lambdas) throw std::invalid_argument("Lyapunov weights are undefined at this sample");
  return weighted(s, {s.beta1, s.beta2});
}

double lyapunov(const ProfileSample& s, double eps) { return std::sqrt(weighted_square(s) + eps * eps); }

cplx counterexample_closed_form(double tau, double tau0, cplx beta1_0, cplx beta2_0, cplx chi2_phi2) {
  return beta2_0 - kI * chi2_phi2 * beta1_0 * beta1_0 * std::log(tau / tau0);
}

double hermitian_check(double chi1, double chi2, cplx phi1, cplx phi2, double lambda1, double lambda2) {
  return std::abs(lambda1 * chi1 * phi1 - lambda2 * chi2 * std::conj(phi2));
}

double hermitian_check(const ProfileSample& s) {
  return hermitian_check(s.chi1, s.chi2, s.phi1, s.phi2, s.lambda1, s.lambda2);
}

double boundedness_bound(const ProfileSample& initial, double tau0, double tau, const ForcingSpec& forcing,
                         double eps) {
  // d_tau B <= sqrt(lambda1 + lambda2) |r|, and (|b1| + |b2|)^2 <= 2 B^2 / min(lambda).
  const double B0 = lyapunov(initial, eps);
  double integral = 0.0;
  if (forcing.mode != ForcingSpec::Mode::Zero) {
    const double d = 1.0 - forcing.delta;
    integral = forcing.C * forcing.eps * (std::pow(tau0, -d) - std::pow(tau, -d)) / d;
  }
  const double B = B0 + std::sqrt(initial.lambda1 + initial.lambda2) * integral;
  return std::sqrt(2.0 / std::min(initial.lambda1, initial.lambda2)) * B;
}

void write_trajectory_csv(std::ostream& out, const IntegrateResult& result, const ProfileState& initial) {
  out << "tau,z1,z2,re_beta1,im_beta1,re_beta2,im_beta2,B_eps\n";
  char buf[512];
  for (const auto& r : result.records) {
    const Vec2 z = initial.samples[r.sample].z;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.tau, z[0], z[1],
                  r.beta1.real(), r.beta1.imag(), r.beta2.real(), r.beta2.imag(), r.B);
    out << buf;
  }
}

nlohmann::json profile_summary(const IntegrateResult& result, const ProfileState& initial, const ForcingSpec& forcing,
                               double eps) {
  nlohmann::json samples = nlohmann::json::array();
  const double tau0 = initial.tau;
  for (std::size_t i = 0; i < initial.samples.size(); ++i) {
    const auto& p = initial.samples[i];
    const auto& f = result.final_state.samples[i];
    nlohmann::json entry{{"z", {p.z[0], p.z[1]}},
                         {"phi1", {p.phi1.real(), p.phi1.imag()}},
                         {"phi2", {p.phi2.real(), p.phi2.imag()}},
                         {"chi1", p.chi1},
                         {"chi2", p.chi2}};
    if (p.has_lambdas) {
      entry["lambda1"] = p.lambda1;
      entry["lambda2"] = p.lambda2;
      entry["drift"] = result.max_relative_drift[i];
      double sup = 0.0;
      bool bounded = true;
      for (const auto& r : result.records) {
        if (r.sample != i) continue;
        const double amp = std::abs(r.beta1) + std::abs(r.beta2);
        sup = std::max(sup, std::exp(-2.0 * std::hypot(p.z[0], p.z[1])) * amp);
        bounded = bounded && amp <= boundedness_bound(p, tau0, r.tau, forcing, eps) * (1.0 + 1e-12);
      }
      entry["boundedness_sup"] = sup;
      entry["within_bound"] = bounded;
    } else {
      entry["lambda1"] = nullptr;
      entry["lambda2"] = nullptr;
      entry["drift"] = nullptr;
    }
    const double span = std::log(result.final_state.tau / tau0);
    entry["growth_coefficient"] = span > 0.0 ? std::abs(f.beta2 - p.beta2) / span : 0.0;
    samples.push_back(entry);
  }
  return {{"tau0", tau0},
          {"tau_end", result.final_state.tau},
          {"steps", result.steps},
          {"step_s", result.step_s},
          {"max_rate", result.max_rate},
          {"under_resolved", result.under_resolved},
          {"samples", samples}};
}

}  // namespace kgres
