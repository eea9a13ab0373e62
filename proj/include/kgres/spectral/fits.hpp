#pragma once

#include <span>

namespace kgres::spectral {

/// value ~ amplitude * (1 + t)^exponent on [t_min, t_max].
struct DecayFit {
  double exponent = 0.0;
  double amplitude = 0.0;
  double residual_rms = 0.0;  // in log space
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t samples = 0;
};

/// value ~ offset + c log t, compared against the best power law C t^p.
struct LogGrowthFit {
  double c = 0.0;
  double offset = 0.0;
  double log_rms = 0.0;
  double power_rms = 0.0;
  double power_exponent = 0.0;
  double power_amplitude = 0.0;
  double model_preference = 0.0;  // log_rms / power_rms; below one favours logarithmic growth
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t samples = 0;
};

inline constexpr std::size_t kMinFitSamples = 10;

/// Least squares of log(value) against log(1 + t). Throws std::invalid_argument with
/// "nonpositive series" if a value in the window is not positive, or when the window
/// holds fewer than kMinFitSamples points.
DecayFit decay_fit(std::span<const double> t, std::span<const double> value, double t_min, double t_max);

/// Least squares of value against a + c log t. Requires t > 0 in the window.
LogGrowthFit log_growth_fit(std::span<const double> t, std::span<const double> value, double t_min, double t_max);

}  // namespace kgres::spectral
