#pragma once

#include <span>
#include <string>
#include <vector>

namespace tsscale {

/// F(n) for each box size n (in samples). `dt` converts n to minutes.
struct FluctuationFunction {
  std::vector<std::size_t> box_sizes;
  std::vector<double> fluctuation;
  int order = 1;
  double dt = 1.0;
};

/// Slope of log10 F against log10 n over a window given in minutes.
struct ScalingExponent {
  double alpha = 0.0;
  double stderr_alpha = 0.0;
  double intercept = 0.0;
  double n_lo = 0.0;  // minutes
  double n_hi = 0.0;  // minutes
  std::size_t n_points = 0;
};

/// Timescale window in minutes, both ends inclusive.
struct TimeWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// Cumulative sum of the mean-removed input.
std::vector<double> dfa_profile(std::span<const double> series);

/// DFA of the given polynomial order. Every box size is evaluated on
/// floor(N/n) boxes taken from the start and floor(N/n) from the end of the
/// profile, and the squared residuals of all of them are pooled.
FluctuationFunction dfa(std::span<const double> series, int order, std::span<const std::size_t> box_sizes,
                        double dt = 1.0);

ScalingExponent scaling_exponent(const FluctuationFunction& f, double t_lo, double t_hi);
inline ScalingExponent scaling_exponent(const FluctuationFunction& f, TimeWindow w) {
  return scaling_exponent(f, w.lo, w.hi);
}

/// Log-spaced integer box sizes from t_min/dt up to N/10 samples.
std::vector<std::size_t> default_box_grid(std::size_t n, double dt, double t_min, std::size_t points_per_decade = 20,
                                          int order = 1);

/// Descriptive label for an exponent: "anti-persistent", "uncorrelated" or
/// "persistent", deciding "uncorrelated" when 0.5 lies within 2 stderr.
std::string correlation_label(const ScalingExponent& e);

}  // namespace tsscale
