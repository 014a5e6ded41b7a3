#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "tsscale/error.hpp"
#include "tsscale/series.hpp"
#include "tsscale/synth.hpp"

using namespace tsscale;

namespace {

GeneratorSpec spec(SignalKind kind, std::size_t n, std::uint64_t seed) {
  GeneratorSpec g;
  g.kind = kind;
  g.n = n;
  g.seed = seed;
  return g;
}

}  // namespace

TEST(Synth, WhiteMomentsAndDeterminism) {
  const auto a = generate(spec(SignalKind::white, 100000, 1));
  EXPECT_NEAR(mean(a.values), 0.0, 0.02);
  EXPECT_NEAR(variance(a.values), 1.0, 0.02);
  EXPECT_EQ(generate(spec(SignalKind::white, 100000, 1)).values, a.values);
  EXPECT_NE(generate(spec(SignalKind::white, 100000, 2)).values, a.values);
  EXPECT_EQ(a.label, "white");
}

TEST(Synth, PowerlawIsZeroMeanUnitRms) {
  for (double beta : {0.0, 0.5, 1.5, 2.5}) {
    auto g = spec(SignalKind::powerlaw, 4096, 3);
    g.beta = beta;
    const auto x = generate(g).values;
    EXPECT_NEAR(oracle::mean(x), 0.0, 1e-10);
    double ss = 0.0;
    for (double v : x) ss += v * v;
    EXPECT_NEAR(ss / 4096.0, 1.0, 1e-12);
  }
}

TEST(Synth, PowerlawSpectrumFollowsExponent) {
  auto g = spec(SignalKind::powerlaw, 1024, 4);
  g.beta = 2.0;
  const auto p = oracle::periodogram(generate(g).values);
  // Average periodogram over two octaves, one decade apart.
  auto band = [&](std::size_t lo) {
    double s = 0.0;
    for (std::size_t k = lo; k < 2 * lo; ++k) s += p[k];
    return s / static_cast<double>(lo);
  };
  const double ratio = band(4) / band(40);
  EXPECT_GT(ratio, 100.0 / 3.0);
  EXPECT_LT(ratio, 100.0 * 3.0);
}

TEST(Synth, IntegratedWhiteDifferencesExactly) {
  const auto x = generate(spec(SignalKind::integrated_white, 50000, 5));
  const auto inc = increments(x);
  const double q = std::ldexp(1.0, 30);
  for (double v : inc.values) {
    ASSERT_EQ(v * q, std::round(v * q));
    ASSERT_LT(std::abs(v), 10.0);
  }
  EXPECT_NEAR(variance(inc.values), 1.0, 0.03);
}

TEST(Synth, ToneAndRamp) {
  auto g = spec(SignalKind::tone, 128, 0);
  g.period = 32;
  g.amplitude = 2;
  const auto t = generate(g).values;
  EXPECT_NEAR(t[8], 2.0, 1e-12);
  EXPECT_NEAR(t[16], 0.0, 1e-12);
  g.kind = SignalKind::ramp;
  g.slope = 0.5;
  const auto r = generate(g).values;
  EXPECT_EQ(r[0], 0.0);
  EXPECT_EQ(r[127], 63.5);
}

TEST(Synth, CascadeIsIntermittent) {
  auto g = spec(SignalKind::cascade, 1 << 14, 6);
  const auto x = generate(g);
  ASSERT_EQ(x.size(), std::size_t{1} << 14);
  const auto inc = increments(x);
  // Heavy-tailed increments: kurtosis above the Gaussian value of 3.
  const double m = oracle::mean(inc.values);
  double m2 = 0.0, m4 = 0.0;
  for (double v : inc.values) {
    m2 += (v - m) * (v - m);
    m4 += std::pow(v - m, 4);
  }
  m2 /= static_cast<double>(inc.values.size());
  m4 /= static_cast<double>(inc.values.size());
  EXPECT_GT(m4 / (m2 * m2), 3.2);
  EXPECT_EQ(generate(g).values, x.values);
}

TEST(Synth, Validation) {
  EXPECT_THROW(generate(spec(SignalKind::white, 8, 0)), Error);
  auto g = spec(SignalKind::powerlaw, 100, 0);
  g.beta = 3.5;
  EXPECT_THROW(generate(g), Error);
  g.beta = 1.0;
  g.beta_high = 0.5;
  EXPECT_THROW(generate(g), Error);
  g.f_break = -1.0;
  EXPECT_THROW(generate(g), Error);
  g = spec(SignalKind::cascade, 100, 0);
  g.depth = 3;
  EXPECT_THROW(generate(g), Error);
  g = spec(SignalKind::white, 100, 0);
  g.dt = 0.0;
  EXPECT_THROW(generate(g), Error);
  EXPECT_THROW(parse_signal_kind("pink"), Error);
  EXPECT_EQ(parse_signal_kind("integrated-white"), SignalKind::integrated_white);
}
