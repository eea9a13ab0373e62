#include "kgres/spectral/fits.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgres::spectral {

namespace {

struct Window {
  std::vector<double> t;
  std::vector<double> v;
};

Window select(std::span<const double> t, std::span<const double> value, double t_min, double t_max, bool positive) {
  if (t.size() != value.size()) throw std::invalid_argument("time and value series differ in length");
  if (!(t_max > t_min)) throw std::invalid_argument("fit window must satisfy t_min < t_max");
  Window w;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min || t[i] > t_max) continue;
    if (!std::isfinite(value[i])) throw std::invalid_argument("non-finite value in series");
    if (positive && !(value[i] > 0.0)) throw std::invalid_argument("nonpositive series");
    w.t.push_back(t[i]);
    w.v.push_back(value[i]);
  }
  if (w.t.size() < kMinFitSamples) {
    throw std::invalid_argument("fit window holds " + std::to_string(w.t.size()) + " samples; at least " +
                                std::to_string(kMinFitSamples) + " are required");
  }
  return w;
}

// Ordinary least squares y = a + b x. Returns (a, b).
std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit abscissae are degenerate");
  const double b = sxy / sxx;
  return {my - b * mx, b};
}

// RMS of value - C t^p with the optimal C for fixed p.
double power_rms(const Window& w, double p, double* amplitude) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < w.t.size(); ++i) {
    const double g = std::pow(w.t[i], p);
    num += w.v[i] * g;
    den += g * g;
  }
  const double C = den > 0.0 ? num / den : 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < w.t.size(); ++i) {
    const double r = w.v[i] - C * std::pow(w.t[i], p);
    ss += r * r;
  }
  if (amplitude != nullptr) *amplitude = C;
  return std::sqrt(ss / static_cast<double>(w.t.size()));
}

}  // namespace

DecayFit decay_fit(std::span<const double> t, std::span<const double> value, double t_min, double t_max) {
  const Window w = select(t, value, t_min, t_max, true);
  std::vector<double> x(w.t.size()), y(w.t.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::log1p(w.t[i]);
    y[i] = std::log(w.v[i]);
  }
  const auto [a, b] = line_fit(x, y);
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (a + b * x[i]);
    ss += r * r;
  }
  return {b, std::exp(a), std::sqrt(ss / static_cast<double>(x.size())), t_min, t_max, x.size()};
}

LogGrowthFit log_growth_fit(std::span<const double> t, std::span<const double> value, double t_min, double t_max) {
  const Window w = select(t, value, t_min, t_max, true);
  if (!(w.t.front() > 0.0)) throw std::invalid_argument("log growth fit needs t > 0");
  std::vector<double> x(w.t.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::log(w.t[i]);
  const auto [a, c] = line_fit(x, w.v);
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = w.v[i] - (a + c * x[i]);
    ss += r * r;
  }
  LogGrowthFit out;
  out.c = c;
  out.offset = a;
  out.log_rms = std::sqrt(ss / static_cast<double>(x.size()));
  out.t_min = t_min;
  out.t_max = t_max;
  out.samples = x.size();

  // Coarse scan for the best exponent, then Brent refinement around it.
  double best_p = 0.0;
  double best = power_rms(w, 0.0, nullptr);
  for (int k = -400; k <= 400; ++k) {
    const double p = k / 100.0;
    const double r = power_rms(w, p, nullptr);
    if (r < best) {
      best = r;
      best_p = p;
    }
  }
  const auto [p, rms] = boost::math::tools::brent_find_minima(
      [&](double q) { return power_rms(w, q, nullptr); }, best_p - 0.01, best_p + 0.01, 52);
  out.power_exponent = rms < best ? p : best_p;
  out.power_rms = power_rms(w, out.power_exponent, &out.power_amplitude);
  out.model_preference = out.power_rms > 0.0 ? out.log_rms / out.power_rms
                                             : (out.log_rms > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
  return out;
}

}  // namespace kgres::spectral
