#include "tsscale/synth.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <boost/random/normal_distribution.hpp>

#include "tsscale/error.hpp"
#include "tsscale/fft.hpp"

namespace tsscale {

const char* to_string(SignalKind kind) noexcept {
  switch (kind) {
    case SignalKind::white: return "white";
    case SignalKind::powerlaw: return "powerlaw";
    case SignalKind::integrated_white: return "integrated-white";
    case SignalKind::cascade: return "cascade";
    case SignalKind::tone: return "tone";
    case SignalKind::ramp: return "ramp";
  }
  return "?";
}

SignalKind parse_signal_kind(const std::string& name) {
  if (name == "white") return SignalKind::white;
  if (name == "powerlaw") return SignalKind::powerlaw;
  if (name == "integrated-white") return SignalKind::integrated_white;
  if (name == "cascade") return SignalKind::cascade;
  if (name == "tone") return SignalKind::tone;
  if (name == "ramp") return SignalKind::ramp;
  fail(ErrorKind::config, "unknown signal kind '" + name + "'");
}

namespace {

using Engine = std::mt19937_64;

std::vector<double> white(std::size_t n, Engine& engine) {
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = normal(engine);
  return x;
}

// Steps on a 2^-30 grid: every partial sum of a few million of them is an
// exactly representable double, so differencing the sum gives them back bit
// for bit.
std::vector<double> integrated_white(std::size_t n, Engine& engine) {
  auto x = white(n, engine);
  const double q = std::ldexp(1.0, 30);
  double acc = 0.0;
  for (double& v : x) {
    acc += std::round(v * q) / q;
    v = acc;
  }
  return x;
}

std::vector<double> powerlaw(const GeneratorSpec& spec, Engine& engine) {
  const std::size_t n = spec.n;
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  RealFft fft(n);
  std::vector<std::complex<double>> coeffs(fft.bins(), {0.0, 0.0});
  const double df = 1.0 / (static_cast<double>(n) * spec.dt);
  const bool two_regime = spec.beta_high && spec.f_break;
  for (std::size_t k = 1; k < coeffs.size(); ++k) {
    const double f = static_cast<double>(k) * df;
    double log_s = -spec.beta * std::log(f);
    if (two_regime && f > *spec.f_break)
      log_s = -spec.beta * std::log(*spec.f_break) - *spec.beta_high * (std::log(f) - std::log(*spec.f_break));
    const double amp = std::exp(0.5 * log_s);
    const double re = normal(engine);
    const double im = normal(engine);
    coeffs[k] = (2 * k == n) ? std::complex<double>(amp * re, 0.0)
                             : std::complex<double>(amp * re, amp * im) / std::numbers::sqrt2;
  }
  std::vector<double> x(n);
  fft.inverse(coeffs, x);
  double ss = 0.0;
  for (const double v : x) ss += v * v;
  const double norm = std::sqrt(ss / static_cast<double>(n));
  for (double& v : x) v /= norm;
  return x;
}

std::vector<double> cascade(const GeneratorSpec& spec, Engine& engine) {
  std::size_t depth = spec.depth;
  if (depth == 0)
    while ((std::size_t{1} << depth) < spec.n) ++depth;
  if (depth < 2) fail(ErrorKind::config, "cascade depth must be at least 2");
  if ((std::size_t{1} << depth) < spec.n) fail(ErrorKind::config, "cascade depth too small for n");

  boost::random::normal_distribution<double> normal(0.0, 1.0);
  const double s = spec.cascade_sigma;
  std::vector<double> weights{1.0};
  for (std::size_t level = 0; level < depth; ++level) {
    std::vector<double> next(weights.size() * 2);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      next[2 * i] = weights[i] * std::exp(s * normal(engine) - 0.5 * s * s);
      next[2 * i + 1] = weights[i] * std::exp(s * normal(engine) - 0.5 * s * s);
    }
    weights = std::move(next);
  }
  weights.resize(spec.n);
  double ss = 0.0;
  for (const double w : weights) ss += w * w;
  const double norm = std::sqrt(ss / static_cast<double>(spec.n));

  // Increments are volatility-modulated Gaussians; the series is their sum.
  std::vector<double> x(spec.n);
  double acc = 0.0;
  for (std::size_t i = 0; i < spec.n; ++i) {
    acc += weights[i] / norm * normal(engine);
    x[i] = acc;
  }
  return x;
}

}  // namespace

TimeSeries generate(const GeneratorSpec& spec) {
  if (spec.n < 16) fail(ErrorKind::config, "generator length must be at least 16");
  if (!(spec.dt > 0.0)) fail(ErrorKind::config, "generator dt must be positive");
  if (spec.kind == SignalKind::powerlaw) {
    if (spec.beta < 0.0 || spec.beta > 3.0) fail(ErrorKind::config, "powerlaw beta must lie in [0, 3]");
    if (spec.beta_high && (*spec.beta_high < 0.0 || *spec.beta_high > 3.0))
      fail(ErrorKind::config, "powerlaw beta_high must lie in [0, 3]");
    if (spec.beta_high.has_value() != spec.f_break.has_value())
      fail(ErrorKind::config, "beta_high and f_break must be given together");
    if (spec.f_break && !(*spec.f_break > 0.0)) fail(ErrorKind::config, "f_break must be positive");
  }
  if (spec.kind == SignalKind::tone && !(spec.period > 0.0)) fail(ErrorKind::config, "tone period must be positive");

  Engine engine(spec.seed);
  TimeSeries ts;
  ts.dt = spec.dt;
  ts.label = to_string(spec.kind);
  switch (spec.kind) {
    case SignalKind::white: ts.values = white(spec.n, engine); break;
    case SignalKind::integrated_white: ts.values = integrated_white(spec.n, engine); break;
    case SignalKind::powerlaw: ts.values = powerlaw(spec, engine); break;
    case SignalKind::cascade: ts.values = cascade(spec, engine); break;
    case SignalKind::tone:
      ts.values.resize(spec.n);
      for (std::size_t i = 0; i < spec.n; ++i)
        ts.values[i] =
            spec.amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) * spec.dt / spec.period);
      break;
    case SignalKind::ramp:
      ts.values.resize(spec.n);
      for (std::size_t i = 0; i < spec.n; ++i) ts.values[i] = spec.slope * static_cast<double>(i);
      break;
  }
  return ts;
}

}  // namespace tsscale
