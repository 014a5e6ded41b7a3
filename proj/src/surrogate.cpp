#include "tsscale/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include <boost/random/uniform_real_distribution.hpp>

#include "tsscale/error.hpp"
#include "tsscale/fft.hpp"

namespace tsscale {

namespace {

// Writes sorted_values onto `out` in the rank order of `shape`; returns the
// ordering so callers can detect a fixed point.
std::vector<std::uint32_t> rank_remap(std::span<const double> shape, std::span<const double> sorted_values,
                                      std::span<double> out) {
  std::vector<std::pair<double, std::uint32_t>> keyed(shape.size());
  for (std::size_t i = 0; i < shape.size(); ++i) keyed[i] = {shape[i], static_cast<std::uint32_t>(i)};
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::uint32_t> order(shape.size());
  for (std::size_t k = 0; k < keyed.size(); ++k) {
    order[k] = keyed[k].second;
    out[order[k]] = sorted_values[k];
  }
  return order;
}

std::vector<std::size_t> band_edges(std::size_t bins) {
  // Log-spaced bands over bins 1..bins-1, 20 per decade, at least 16 bins wide.
  std::vector<std::size_t> edges{1};
  double edge = 1.0;
  while (edges.back() < bins) {
    edge *= std::pow(10.0, 1.0 / 20.0);
    std::size_t next = std::max(static_cast<std::size_t>(std::ceil(edge)), edges.back() + 16);
    if (next + 16 > bins) next = bins;
    edges.push_back(next);
  }
  return edges;
}

std::vector<double> band_power(std::span<const std::complex<double>> spec, std::span<const std::size_t> edges) {
  std::vector<double> power(edges.size() - 1, 0.0);
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    for (std::size_t k = edges[b]; k < edges[b + 1]; ++k) power[b] += std::norm(spec[k]);
    power[b] /= static_cast<double>(edges[b + 1] - edges[b]);
  }
  return power;
}

double band_error(std::span<const double> power, std::span<const double> target) {
  double ss = 0.0;
  std::size_t used = 0;
  for (std::size_t b = 0; b < power.size(); ++b) {
    if (!(target[b] > 0.0)) continue;
    const double d = (power[b] - target[b]) / target[b];
    ss += d * d;
    ++used;
  }
  return used ? std::sqrt(ss / static_cast<double>(used)) : 0.0;
}

double sample_std(std::span<const double> v, double m) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (const double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

Surrogate make_surrogate(std::span<const double> series, std::uint64_t seed, const SurrogateConfig& config) {
  const std::size_t n = series.size();
  if (n < 16) fail(ErrorKind::numerical, "surrogates need at least 16 samples");

  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());

  RealFft fft(n);
  std::vector<std::complex<double>> spec(fft.bins());
  fft.forward(series, spec);
  std::vector<double> target(spec.size());
  std::transform(spec.begin(), spec.end(), target.begin(), [](auto c) { return std::abs(c); });
  const auto edges = band_edges(spec.size());
  const auto target_bands = band_power(spec, edges);
  if (std::none_of(target_bands.begin(), target_bands.end(), [](double p) { return p > 0.0; }))
    fail(ErrorKind::numerical, "surrogate of an all-zero series");

  // Original amplitudes, random phases. DC stays real; so does Nyquist.
  std::mt19937_64 engine(seed);
  boost::random::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<std::complex<double>> start(spec.size());
  start[0] = spec[0];
  for (std::size_t k = 1; k < spec.size(); ++k) {
    const double p = phase(engine);
    start[k] = (2 * k == n) ? std::complex<double>(target[k] * (std::cos(p) >= 0.0 ? 1.0 : -1.0), 0.0)
                            : std::polar(target[k], p);
  }
  std::vector<double> shaped(n);
  fft.inverse(start, shaped);

  Surrogate best;
  std::vector<double> current(n);
  auto order = rank_remap(shaped, sorted, current);
  best.spectrum_error = std::numeric_limits<double>::infinity();

  std::size_t iteration = 0;
  while (true) {
    fft.forward(current, spec);
    const double err = band_error(band_power(spec, edges), target_bands);
    if (err < best.spectrum_error) {
      best.values = current;
      best.spectrum_error = err;
      best.iterations = iteration;
    }
    if (err < config.spectrum_tolerance) {
      best.converged = true;
      break;
    }
    if (iteration >= config.max_iterations) break;
    ++iteration;

    for (std::size_t k = 0; k < spec.size(); ++k) {
      const double a = std::abs(spec[k]);
      spec[k] = a > 0.0 ? spec[k] * (target[k] / a) : std::complex<double>(target[k], 0.0);
    }
    fft.inverse(spec, shaped);
    auto next_order = rank_remap(shaped, sorted, current);
    if (next_order == order) {
      // Fixed point: further iterations reproduce the same permutation.
      break;
    }
    order = std::move(next_order);
  }
  return best;
}

SurrogateReport ensemble_test(const IncrementSeries& increments, const SurrogateConfig& config, TimeWindow window,
                              const DfaSettings& settings) {
  if (config.count < 1) fail(ErrorKind::config, "surrogate count must be at least 1");
  const std::size_t n = increments.values.size();
  const auto grid = default_box_grid(n, increments.dt, settings.t_min, settings.points_per_decade, settings.order);

  auto exponents = [&](std::span<const double> inc) {
    const MagSignPair ms = mag_sign(IncrementSeries{std::vector<double>(inc.begin(), inc.end()), {}, increments.dt});
    const auto sign = ms.sign_as_double();
    const auto mag = scaling_exponent(dfa(ms.magnitude, settings.order, grid, increments.dt), window);
    const auto sgn = scaling_exponent(dfa(sign, settings.order, grid, increments.dt), window);
    return std::pair{mag, sgn};
  };

  SurrogateReport report;
  report.window = window;
  report.dfa = settings;
  report.config = config;
  const auto [mag0, sign0] = exponents(increments.values);
  report.alpha_mag_orig = mag0.alpha;
  report.alpha_sign_orig = sign0.alpha;
  report.alpha_mag_stderr_orig = mag0.stderr_alpha;
  report.alpha_sign_stderr_orig = sign0.stderr_alpha;

  for (std::size_t i = 0; i < config.count; ++i) {
    try {
      const Surrogate s = make_surrogate(increments.values, config.seed + i, config);
      const auto [mag, sgn] = exponents(s.values);
      report.alpha_mag.push_back(mag.alpha);
      report.alpha_sign.push_back(sgn.alpha);
      report.spectrum_errors.push_back(s.spectrum_error);
      if (s.converged) ++report.converged_count;
    } catch (const Error& e) {
      throw Error(e.kind(), "surrogate " + std::to_string(i) + ": " + e.what());
    }
  }

  report.alpha_mag_mean = mean(report.alpha_mag);
  report.alpha_sign_mean = mean(report.alpha_sign);
  report.alpha_mag_std = sample_std(report.alpha_mag, report.alpha_mag_mean);
  report.alpha_sign_std = sample_std(report.alpha_sign, report.alpha_sign_mean);
  report.degenerate_ensemble = config.count == 1;
  return report;
}

}  // namespace tsscale
