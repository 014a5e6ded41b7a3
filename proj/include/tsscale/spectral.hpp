#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsscale/series.hpp"

namespace tsscale {

enum class Taper { hann, rectangular };

const char* to_string(Taper taper) noexcept;
Taper parse_taper(const std::string& name);

struct LpsdConfig {
  std::size_t n_freqs = 200;
  std::optional<double> f_min;  // min^-1; default min_bin/(N dt)
  std::optional<double> f_max;  // min^-1; default Nyquist
  Taper taper = Taper::hann;
  double overlap = 0.5;
  std::size_t desired_averages = 100;
  std::size_t min_segment = 16;
  /// Lowest admissible bin index f * L * dt of a segment.
  double min_bin = 4.0;
};

/// One-sided PSD density on a logarithmic frequency grid. Power is in
/// unit^2 per min^-1 so that the integral over frequency is the variance.
struct PsdEstimate {
  std::vector<double> frequencies;
  std::vector<double> power;
  std::vector<std::size_t> segment_lengths;
  std::vector<std::size_t> segments_per_freq;
  /// 1 where the optimal segment length fell outside [min_segment, N].
  std::vector<std::uint8_t> snapped;
  std::size_t n_freqs = 0;
  Taper window_kind = Taper::hann;
};

/// Log-frequency-axis PSD: every frequency gets its own segment length, so
/// resolution is coarse at high frequencies and fine at low ones, with
/// averaging counts traded off accordingly.
PsdEstimate lpsd(const TimeSeries& ts, const LpsdConfig& config = {});

/// beta is the exponent of a 1/f^beta law, i.e. minus the log-log slope.
struct SpectralFit {
  double beta = 0.0;
  double intercept = 0.0;  // log10 power at log10 f = 0
  double f_lo = 0.0;
  double f_hi = 0.0;
  double stderr_beta = 0.0;
  double r2 = 0.0;
  std::size_t n_points = 0;
};

SpectralFit fit_spectral_exponent(const PsdEstimate& psd, double f_lo, double f_hi);

/// Trapezoidal integral of the PSD over its frequency grid.
double integrated_power(const PsdEstimate& psd);

}  // namespace tsscale
