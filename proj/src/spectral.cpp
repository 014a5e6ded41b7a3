#include "tsscale/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tsscale/error.hpp"
#include "tsscale/regression.hpp"

namespace tsscale {

const char* to_string(Taper taper) noexcept {
  switch (taper) {
    case Taper::hann: return "hann";
    case Taper::rectangular: return "rectangular";
  }
  return "hann";
}

Taper parse_taper(const std::string& name) {
  if (name == "hann") return Taper::hann;
  if (name == "rectangular" || name == "none") return Taper::rectangular;
  fail(ErrorKind::config, "unknown taper '" + name + "'");
}

namespace {

std::vector<double> make_window(Taper taper, std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (taper == Taper::hann) {
    const double step = 2.0 * std::numbers::pi / static_cast<double>(length);
    for (std::size_t t = 0; t < length; ++t) w[t] = 0.5 * (1.0 - std::cos(step * static_cast<double>(t)));
  }
  return w;
}

}  // namespace

PsdEstimate lpsd(const TimeSeries& ts, const LpsdConfig& config) {
  const std::size_t n = ts.size();
  const double dt = ts.dt;
  if (config.n_freqs < 2) fail(ErrorKind::config, "lpsd: n_freqs must be at least 2");
  if (n < config.min_segment) fail(ErrorKind::numerical, "lpsd: series shorter than the minimum segment");
  if (!(config.overlap >= 0.0 && config.overlap < 1.0)) fail(ErrorKind::config, "lpsd: overlap must be in [0, 1)");

  const double fs = 1.0 / dt;
  const double resolution_min = fs / static_cast<double>(n);
  const double nyquist = 0.5 * fs;
  const double f_max = config.f_max.value_or(nyquist);
  double f_min = resolution_min;
  if (config.f_min)
    f_min = *config.f_min;
  else if (std::max(1.0, config.min_bin) * resolution_min < 0.5 * f_max)
    f_min = std::max(1.0, config.min_bin) * resolution_min;
  if (f_min < resolution_min * (1.0 - 1e-12))
    fail(ErrorKind::config, "lpsd: f_min below 1/(N dt) = " + std::to_string(resolution_min));
  if (f_max > nyquist * (1.0 + 1e-12)) fail(ErrorKind::config, "lpsd: f_max above Nyquist");
  if (!(f_min < f_max)) fail(ErrorKind::config, "lpsd: f_min must be below f_max");

  const std::size_t jn = config.n_freqs;
  const double g = std::log(f_max) - std::log(f_min);
  const double ratio_step = std::exp(g / static_cast<double>(jn - 1)) - 1.0;
  const double resolution_avg =
      resolution_min * (1.0 + (1.0 - config.overlap) * (static_cast<double>(config.desired_averages) - 1.0));

  PsdEstimate out;
  out.n_freqs = jn;
  out.window_kind = config.taper;
  out.frequencies.resize(jn);
  out.power.resize(jn);
  out.segment_lengths.resize(jn);
  out.segments_per_freq.resize(jn);
  out.snapped.resize(jn);

  const auto& x = ts.values;
  for (std::size_t j = 0; j < jn; ++j) {
    const double f = j + 1 == jn ? f_max : f_min * std::exp(g * static_cast<double>(j) / static_cast<double>(jn - 1));
    const double r_desired = f * ratio_step;
    double r = r_desired >= resolution_avg ? r_desired : std::sqrt(resolution_avg * r_desired);
    bool snapped = false;
    // Keep the evaluation bin clear of the DC lobe that mean removal leaves.
    r = std::min(r, f / config.min_bin);
    if (r < resolution_min) {
      r = resolution_min;
      snapped = true;
    }
    auto length = static_cast<std::size_t>(std::llround(fs / r));
    if (length > n) {
      length = n;
      snapped = true;
    }
    if (length < config.min_segment) {
      length = config.min_segment;
      snapped = true;
    }

    const auto window = make_window(config.taper, length);
    std::vector<double> kc(length), ks(length);
    double s2 = 0.0;
    const double omega = 2.0 * std::numbers::pi * f * dt;
    for (std::size_t t = 0; t < length; ++t) {
      const double phase = omega * static_cast<double>(t);
      kc[t] = window[t] * std::cos(phase);
      ks[t] = -window[t] * std::sin(phase);
      s2 += window[t] * window[t];
    }

    const double shift = static_cast<double>(length) * (1.0 - config.overlap);
    const std::size_t segments =
        length == n ? 1 : static_cast<std::size_t>(std::floor(static_cast<double>(n - length) / shift)) + 1;
    double acc = 0.0;
    for (std::size_t k = 0; k < segments; ++k) {
      const std::size_t start =
          segments == 1 ? 0
                        : static_cast<std::size_t>(std::llround(static_cast<double>(k) * static_cast<double>(n - length) /
                                                                static_cast<double>(segments - 1)));
      const double* seg = x.data() + start;
      double m = 0.0;
      for (std::size_t t = 0; t < length; ++t) m += seg[t];
      m /= static_cast<double>(length);
      double re = 0.0, im = 0.0;
      for (std::size_t t = 0; t < length; ++t) {
        const double v = seg[t] - m;
        re += kc[t] * v;
        im += ks[t] * v;
      }
      acc += re * re + im * im;
    }

    out.frequencies[j] = f;
    out.power[j] = 2.0 * dt * acc / (static_cast<double>(segments) * s2);
    out.segment_lengths[j] = length;
    out.segments_per_freq[j] = segments;
    out.snapped[j] = snapped ? 1 : 0;
  }
  return out;
}

SpectralFit fit_spectral_exponent(const PsdEstimate& psd, double f_lo, double f_hi) {
  if (!(f_lo < f_hi)) fail(ErrorKind::config, "spectral fit: f_lo must be below f_hi");
  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < psd.frequencies.size(); ++j) {
    const double f = psd.frequencies[j];
    if (f < f_lo || f > f_hi) continue;
    if (!(psd.power[j] > 0.0))
      fail(ErrorKind::numerical, "spectral fit: non-positive power at f=" + std::to_string(f));
    lx.push_back(std::log10(f));
    ly.push_back(std::log10(psd.power[j]));
  }
  if (lx.size() < 5)
    fail(ErrorKind::numerical, "spectral fit: only " + std::to_string(lx.size()) + " PSD points in band, need 5");
  const LineFit line = fit_line(lx, ly);
  SpectralFit fit;
  fit.beta = -line.slope;
  fit.intercept = line.intercept;
  fit.stderr_beta = line.stderr_slope;
  fit.r2 = line.r2;
  fit.f_lo = f_lo;
  fit.f_hi = f_hi;
  fit.n_points = line.n;
  return fit;
}

double integrated_power(const PsdEstimate& psd) {
  double total = 0.0;
  for (std::size_t j = 1; j < psd.frequencies.size(); ++j)
    total += 0.5 * (psd.power[j] + psd.power[j - 1]) * (psd.frequencies[j] - psd.frequencies[j - 1]);
  return total;
}

}  // namespace tsscale
