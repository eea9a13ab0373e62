#include "kgres/spectral/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include <boost/math/special_functions/bessel.hpp>

#include "kgres/spectral/kernels.hpp"

namespace kgres::spectral {

namespace {

constexpr double kBumpShape = 16.0;
constexpr double kBumpTaper = 0.05;
constexpr double kGaussianRate = 32.0;

// Kernel table so the serial reference and the OpenMP path share one driver.
struct KernelSet {
  decltype(&kernels::serial::rotate) rotate;
  decltype(&kernels::serial::derivative) derivative;
  decltype(&kernels::serial::apply_mask) apply_mask;
  decltype(&kernels::serial::accumulate_product) accumulate_product;
  decltype(&kernels::serial::kick) kick;
  decltype(&kernels::serial::norms) norms;
  decltype(&kernels::serial::exterior) exterior;
  decltype(&kernels::serial::spectral_energy) spectral_energy;
};

const KernelSet& kernel_set(bool parallel) {
  static const KernelSet serial{kernels::serial::rotate,  kernels::serial::derivative,
                                kernels::serial::apply_mask, kernels::serial::accumulate_product,
                                kernels::serial::kick,    kernels::serial::norms,
                                kernels::serial::exterior, kernels::serial::spectral_energy};
  static const KernelSet par{kernels::parallel::rotate,  kernels::parallel::derivative,
                             kernels::parallel::apply_mask, kernels::parallel::accumulate_product,
                             kernels::parallel::kick,    kernels::parallel::norms,
                             kernels::parallel::exterior, kernels::parallel::spectral_energy};
  return parallel ? par : serial;
}

const KernelSet& ks(const FieldState& s) { return kernel_set(s.options().parallel); }

bool power_of_two(std::size_t n) { return n >= 4 && (n & (n - 1)) == 0; }

// Physical field of one factor of Q, built from the (optionally masked) spectra.
std::vector<double> factor_field(const FieldState& s, const Factor& f, const std::vector<cplx>& p_hat_k) {
  const std::size_t rows = s.N();
  const std::size_t cols = s.cols();
  const std::uint8_t* mask = s.options().dealias ? s.dealias_mask().data() : nullptr;
  std::vector<cplx> spec(rows * cols);
  const auto& k = ks(s);
  if (f.kind == Factor::Kind::V || f.a == 0) {
    const auto& src = f.kind == Factor::Kind::V ? s.u_hat(f.k) : p_hat_k;
    if (mask != nullptr) k.apply_mask(src.data(), mask, spec.data(), rows, cols);
    else spec = src;
  } else {
    k.derivative(s.u_hat(f.k).data(), s.xi(f.a).data(), mask, spec.data(), rows, cols);
  }
  std::vector<double> out(rows * rows);
  s.fft().inverse(spec, out);
  return out;
}

// Spectrum of Q_j(u, du) with the given p_hat used for the time-derivative factors.
std::vector<cplx> q_hat(const FieldState& s, const QuadraticForm& q, const std::vector<cplx>* p_hat[2]) {
  const std::size_t rows = s.N();
  const std::size_t cols = s.cols();
  std::map<Factor, std::vector<double>> cache;
  auto field = [&](const Factor& f) -> const std::vector<double>& {
    auto it = cache.find(f);
    if (it == cache.end()) it = cache.emplace(f, factor_field(s, f, *p_hat[f.k - 1])).first;
    return it->second;
  };
  std::vector<double> acc(rows * rows, 0.0);
  for (const auto& [key, c] : q.terms()) {
    const auto& a = field(key.first);
    const auto& b = field(key.second);
    ks(s).accumulate_product(acc.data(), to_double(c), a.data(), b.data(), rows, rows);
  }
  std::vector<cplx> out(rows * cols);
  s.fft().forward(acc, out);
  return out;
}

void check_guard(const FieldState& s) {
  const double frac = resolution_tail_fraction(s);
  if (frac > s.options().guard_tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "resolution guard tripped at t = %.6g: top-mode energy fraction %.3e exceeds %.1e",
                  s.t(), frac, s.options().guard_tol);
    throw GuardError(buf);
  }
}

}  // namespace

double profile_value(Profile p, double r, double K) {
  const double s = r / K;
  if (!(s < 1.0)) return 0.0;
  const double q = 1.0 - s * s;
  if (p == Profile::Gaussian) return std::exp(-kGaussianRate * s * s);
  static const double norm = boost::math::cyl_bessel_i(0, kBumpShape) - 1.0;
  const double kb = (boost::math::cyl_bessel_i(0, kBumpShape * std::sqrt(q)) - 1.0) / norm;
  return kb * std::exp(kBumpTaper - kBumpTaper / q);
}

FieldState::FieldState(const SolverOptions& options, double K) : opt_(options), K_(K) {
  if (!power_of_two(opt_.N)) throw std::invalid_argument("N must be a power of two >= 4");
  if (!(opt_.L > 0.0) || !(K > 0.0)) throw std::invalid_argument("L and K must be positive");
  if (!(opt_.m1 > 0.0) || !(opt_.m2 > 0.0)) throw std::invalid_argument("masses must be positive");
  if (!(opt_.margin >= 0.0) || !(opt_.horizon >= 0.0)) throw std::invalid_argument("margin and horizon must be >= 0");
  if (opt_.horizon > opt_.L - K - opt_.margin) {
    throw std::invalid_argument("horizon exceeds L - K - margin; the periodic box would wrap around");
  }
  const std::size_t n = opt_.N;
  const std::size_t nc = cols();
  const double dk = std::numbers::pi / opt_.L;
  for (int j = 0; j < 2; ++j) {
    uh_[j].assign(n * nc, cplx{});
    ph_[j].assign(n * nc, cplx{});
    omega_[j].resize(n * nc);
    xi_[j].resize(n * nc);
  }
  mask_.resize(n * nc);
  tail_.resize(n * nc);
  weight_.resize(n * nc);
  const auto half = static_cast<long>(n / 2);
  for (std::size_t r = 0; r < n; ++r) {
    const long k1 = static_cast<long>(r) <= half ? static_cast<long>(r) : static_cast<long>(r) - static_cast<long>(n);
    for (std::size_t c = 0; c < nc; ++c) {
      const auto k2 = static_cast<long>(c);
      const std::size_t i = r * nc + c;
      const double x1 = dk * static_cast<double>(k1);
      const double x2 = dk * static_cast<double>(k2);
      const double xi2 = x1 * x1 + x2 * x2;
      omega_[0][i] = std::sqrt(opt_.m1 * opt_.m1 + xi2);
      omega_[1][i] = std::sqrt(opt_.m2 * opt_.m2 + xi2);
      // Odd derivatives drop the unpaired Nyquist modes.
      xi_[0][i] = k1 == half ? 0.0 : x1;
      xi_[1][i] = k2 == half ? 0.0 : x2;
      mask_[i] = (3 * std::labs(k1) <= static_cast<long>(n) && 3 * k2 <= static_cast<long>(n)) ? 1 : 0;
      tail_[i] = 10.0 * static_cast<double>(std::max(std::labs(k1), k2)) > 9.0 * static_cast<double>(half) ? 1 : 0;
      weight_[i] = (c == 0 || c == nc - 1) ? 1.0 : 2.0;
    }
  }
  radius_.resize(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) radius_[r * n + c] = std::hypot(x(r), x(c));
  }
  fft_ = std::make_unique<Fft2d>(n, opt_.parallel ? opt_.threads : 1);
}

std::vector<double> FieldState::u(int j) const {
  std::vector<double> out(N() * N());
  fft_->inverse(uh_[j - 1], out);
  return out;
}

std::vector<double> FieldState::p(int j) const {
  std::vector<double> out(N() * N());
  fft_->inverse(ph_[j - 1], out);
  return out;
}

std::vector<double> FieldState::du(int j, int a) const {
  std::vector<cplx> spec(uh_[0].size());
  ks(*this).derivative(uh_[j - 1].data(), xi_[a - 1].data(), nullptr, spec.data(), N(), cols());
  std::vector<double> out(N() * N());
  fft_->inverse(spec, out);
  return out;
}

void FieldState::set_fields(const std::vector<double>& u1, const std::vector<double>& u2,
                            const std::vector<double>& p1, const std::vector<double>& p2) {
  fft_->forward(u1, uh_[0]);
  fft_->forward(u2, uh_[1]);
  fft_->forward(p1, ph_[0]);
  fft_->forward(p2, ph_[1]);
}

FieldState init(const SolverOptions& options, const InitialData& data) {
  if (!(data.eps >= 0.0) || !std::isfinite(data.eps)) throw std::invalid_argument("eps must be finite and >= 0");
  FieldState state(options, data.K);
  const std::size_t n = options.N;
  std::vector<double> base(n * n);
  for (std::size_t i = 0; i < n * n; ++i) base[i] = profile_value(data.profile, state.radius()[i], data.K);
  auto scaled = [&](double a) {
    std::vector<double> out(base);
    for (double& v : out) v *= data.eps * a;
    return out;
  };
  state.set_fields(scaled(data.f1), scaled(data.f2), scaled(data.g1), scaled(data.g2));
  return state;
}

void linear_step(FieldState& state, double dt) {
  if (dt == 0.0) return;
  const std::size_t m = state.u_hat(1).size();
  std::vector<double> c(m), s(m);
  for (int j = 1; j <= 2; ++j) {
    const auto& om = state.omega(j);
    for (std::size_t i = 0; i < m; ++i) {
      c[i] = std::cos(om[i] * dt);
      s[i] = std::sin(om[i] * dt);
    }
    ks(state).rotate(state.u_hat(j).data(), state.p_hat(j).data(), om.data(), c.data(), s.data(), state.N(),
                     state.cols());
  }
  state.set_time(state.t() + dt);
}

void nonlinear_kick(FieldState& state, double dt, const NonlinearSystem& system) {
  if (dt == 0.0 || (system.q1.is_zero() && system.q2.is_zero())) return;
  check_guard(state);
  const std::uint8_t* mask = state.options().dealias ? state.dealias_mask().data() : nullptr;
  const bool midpoint = system.q1.uses_time_derivative() || system.q2.uses_time_derivative();
  const std::vector<cplx>* p_now[2] = {&state.p_hat(1), &state.p_hat(2)};
  std::vector<cplx> q[2];
  for (int j = 1; j <= 2; ++j) {
    if (!system.q(j).is_zero()) q[j - 1] = q_hat(state, system.q(j), p_now);
  }
  if (midpoint) {
    std::vector<cplx> p_mid[2] = {state.p_hat(1), state.p_hat(2)};
    for (int j = 1; j <= 2; ++j) {
      if (!q[j - 1].empty()) ks(state).kick(p_mid[j - 1].data(), q[j - 1].data(), mask, 0.5 * dt, state.N(), state.cols());
    }
    const std::vector<cplx>* p_half[2] = {&p_mid[0], &p_mid[1]};
    for (int j = 1; j <= 2; ++j) {
      if (!system.q(j).is_zero()) q[j - 1] = q_hat(state, system.q(j), p_half);
    }
  }
  for (int j = 1; j <= 2; ++j) {
    if (!q[j - 1].empty()) ks(state).kick(state.p_hat(j).data(), q[j - 1].data(), mask, dt, state.N(), state.cols());
  }
}

void strang_step(FieldState& state, double dt, const NonlinearSystem& system) {
  nonlinear_kick(state, 0.5 * dt, system);
  linear_step(state, dt);
  nonlinear_kick(state, 0.5 * dt, system);
}

double resolution_tail_fraction(const FieldState& state) {
  double total = 0.0;
  double tail = 0.0;
  for (int j = 1; j <= 2; ++j) {
    const auto e = ks(state).spectral_energy(state.u_hat(j).data(), state.p_hat(j).data(), state.omega(j).data(),
                                             state.hermitian_weight().data(), state.tail_flag().data(), state.N(),
                                             state.cols());
    total += e.total;
    tail += e.selected;
  }
  return total > 0.0 ? tail / total : 0.0;
}

double spectral_energy(const FieldState& state) {
  double total = 0.0;
  for (int j = 1; j <= 2; ++j) {
    total += ks(state)
                 .spectral_energy(state.u_hat(j).data(), state.p_hat(j).data(), state.omega(j).data(),
                                  state.hermitian_weight().data(), state.tail_flag().data(), state.N(), state.cols())
                 .total;
  }
  return total;
}

double support_check(const FieldState& state, double t, double K, double margin) {
  const double L = state.options().L;
  if (t > L - K - margin) throw std::invalid_argument("support_check: t exceeds L - K - margin");
  const std::size_t n = state.N();
  std::vector<double> density(n * n, 0.0);
  for (int j = 1; j <= 2; ++j) {
    const auto u = state.u(j);
    const auto p = state.p(j);
    const auto d1 = state.du(j, 1);
    const auto d2 = state.du(j, 2);
    const double m2 = state.mass(j) * state.mass(j);
    for (std::size_t i = 0; i < n * n; ++i) {
      density[i] += 0.5 * (p[i] * p[i] + d1[i] * d1[i] + d2[i] * d2[i] + m2 * u[i] * u[i]);
    }
  }
  const auto e = ks(state).exterior(density.data(), state.radius().data(), t + K + margin, n, n);
  return e.total > 0.0 ? e.selected / e.total : 0.0;
}

std::map<std::string, double> norms(const FieldState& state, const std::vector<std::string>& p_list) {
  for (const auto& p : p_list) {
    if (p != "L2" && p != "L4" && p != "Linf") throw std::invalid_argument("unknown norm '" + p + "'");
  }
  const std::size_t n = state.N();
  const double cell = state.h() * state.h();
  std::map<std::string, kernels::NormSums> raw;
  for (int j = 1; j <= 2; ++j) {
    const std::string s = std::to_string(j);
    raw["u" + s] = ks(state).norms(state.u(j).data(), n, n);
    raw["dt_u" + s] = ks(state).norms(state.p(j).data(), n, n);
    raw["dx1_u" + s] = ks(state).norms(state.du(j, 1).data(), n, n);
    raw["dx2_u" + s] = ks(state).norms(state.du(j, 2).data(), n, n);
  }
  std::map<std::string, double> out;
  for (const auto& p : p_list) {
    auto value = [&](const kernels::NormSums& r) {
      if (p == "L2") return std::sqrt(r.sum2 * cell);
      if (p == "L4") return std::sqrt(std::sqrt(r.sum4 * cell));
      return r.max_abs;
    };
    for (const auto& [name, r] : raw) out[p + "_" + name] = value(r);
    double total = 0.0;
    for (int j = 1; j <= 2; ++j) {
      const std::string s = std::to_string(j);
      const double d = out[p + "_dt_u" + s] + out[p + "_dx1_u" + s] + out[p + "_dx2_u" + s];
      out[p + "_du" + s] = d;
      out[p + "_total_u" + s] = out[p + "_u" + s] + d;
      total += out[p + "_total_u" + s];
    }
    out[p + "_u"] = out[p + "_u1"] + out[p + "_u2"];
    out[p + "_total"] = total;
  }
  return out;
}

const std::vector<double>& RunResult::column(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::out_of_range("no norm column named '" + name + "'");
  return columns[static_cast<std::size_t>(it - names.begin())];
}

RunResult run(FieldState& state, const NonlinearSystem& system, const RunOptions& options) {
  if (!(options.dt > 0.0) || !(options.sample_every > 0.0)) throw std::invalid_argument("dt and sample_every must be > 0");
  const double L = state.options().L;
  if (options.t_end > L - state.K() - options.margin) {
    throw std::invalid_argument("t_end exceeds L - K - margin; the periodic box would wrap around");
  }
  const double ratio = options.sample_every / options.dt;
  const auto per_sample = static_cast<std::size_t>(std::llround(ratio));
  if (per_sample == 0 || std::abs(ratio - static_cast<double>(per_sample)) > 1e-9 * ratio) {
    throw std::invalid_argument("sample_every must be an integer multiple of dt");
  }
  const auto n_samples = static_cast<std::size_t>(std::floor((options.t_end - state.t()) / options.sample_every + 1e-9));
  const double t0 = state.t();
  const bool fuse = !system.q1.uses_time_derivative() && !system.q2.uses_time_derivative();

  RunResult result;
  auto record = [&]() {
    const auto row = norms(state, options.p_list);
    if (result.names.empty()) {
      for (const auto& [name, v] : row) result.names.push_back(name);
      result.columns.resize(result.names.size());
    }
    std::size_t c = 0;
    for (const auto& [name, v] : row) result.columns[c++].push_back(v);
    result.t.push_back(state.t());
    const double ext = support_check(state, state.t(), state.K(), options.margin);
    result.exterior_fraction.push_back(ext);
    result.max_exterior_fraction = std::max(result.max_exterior_fraction, ext);
    result.max_tail_fraction = std::max(result.max_tail_fraction, resolution_tail_fraction(state));
  };

  record();
  try {
    for (std::size_t k = 0; k < n_samples; ++k) {
      if (fuse) {
        // Consecutive half kicks at the same u combine exactly for derivative-free Q.
        nonlinear_kick(state, 0.5 * options.dt, system);
        for (std::size_t s = 0; s < per_sample; ++s) {
          linear_step(state, options.dt);
          nonlinear_kick(state, s + 1 == per_sample ? 0.5 * options.dt : options.dt, system);
        }
      } else {
        for (std::size_t s = 0; s < per_sample; ++s) strang_step(state, options.dt, system);
      }
      result.steps += per_sample;
      state.set_time(t0 + static_cast<double>(result.steps) * options.dt);
      record();
    }
  } catch (const GuardError& e) {
    result.guard_tripped = true;
    result.guard_message = e.what();
  }
  return result;
}

void write_norms_csv(std::ostream& out, const RunResult& result) {
  out << "t";
  for (const auto& n : result.names) out << "," << n;
  out << ",exterior_fraction\n";
  char buf[64];
  for (std::size_t i = 0; i < result.t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", result.t[i]);
    out << buf;
    for (const auto& col : result.columns) {
      std::snprintf(buf, sizeof buf, ",%.17g", col[i]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g\n", result.exterior_fraction[i]);
    out << buf;
  }
}

}  // namespace kgres::spectral
