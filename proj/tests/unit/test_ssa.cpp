#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "tsscale/error.hpp"
#include "tsscale/spectral.hpp"
#include "tsscale/ssa.hpp"

using namespace tsscale;

namespace {

TimeSeries noise(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  TimeSeries ts;
  ts.values.resize(n);
  for (double& v : ts.values) v = g(rng);
  return ts;
}

SsaConfig window_of(std::size_t m) {
  SsaConfig c;
  c.window = m;
  return c;
}

}  // namespace

TEST(DefaultWindow, RuleAndClamps) {
  EXPECT_EQ(default_window(100, 1.5), 10u);
  EXPECT_EQ(default_window(10, 2.5), 2u);
  EXPECT_EQ(default_window(90000, 2.5), 440u);
  EXPECT_EQ(static_cast<std::size_t>(std::round(std::pow(std::log(90000.0), 2.5))), 440u);
  EXPECT_THROW(default_window(7, 2.5), Error);
  EXPECT_THROW(default_window(100, 3.0), Error);
}

TEST(Toeplitz, DiagonalIsLagZeroVariance) {
  const auto ts = noise(500, 1);
  const auto c = toeplitz_correlation(ts.values, 8);
  const double mu = oracle::mean(ts.values);
  double ss = 0.0;
  for (double v : ts.values) ss += (v - mu) * (v - mu);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(c(i, i), ss / 500.0, 1e-13);
}

TEST(Toeplitz, AlternatingSeriesMatchesDoubleLoop) {
  std::vector<double> x(101);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = i % 2 ? -1.0 : 1.0;
  const auto c = toeplitz_correlation(x, 3, false);
  const auto o = oracle::lagged_correlation(x, 3, false);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(c(i, j), o[i][j], 1e-14);
  EXPECT_NEAR(c(0, 1), -c(0, 0), 1e-14);
  EXPECT_EQ(c(0, 1), c(1, 0));
}

TEST(Toeplitz, WhiteNoiseOffDiagonalsNearZero) {
  const auto ts = noise(10000, 2);
  const auto c = toeplitz_correlation(ts.values, 20);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j)
      if (i != j) EXPECT_LT(std::abs(c(i, j)), 3.0 / std::sqrt(10000.0));
}

TEST(Toeplitz, WindowMustBeBelowLength) { EXPECT_THROW(toeplitz_correlation(std::vector<double>(10, 1.0), 10), Error); }

TEST(Decompose, BruteForceEquivalenceSmall) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const std::size_t n = 40 + 13 * seed;
    const std::size_t m = 3 + seed % 8;
    auto ts = noise(n, seed + 100);
    for (std::size_t i = 0; i < n; ++i) ts.values[i] += 0.05 * static_cast<double>(i) + std::sin(0.3 * i);
    const auto dec = decompose(ts, window_of(m));

    std::vector<double> centered = ts.values;
    const double mu = oracle::mean(centered);
    for (double& v : centered) v -= mu;
    const auto c = oracle::lagged_correlation(ts.values, m, true);
    const auto [lambda, e] = oracle::jacobi_eigen(c);

    for (std::size_t k = 0; k < m; ++k) {
      EXPECT_NEAR(dec.eigenvalues[k], std::max(0.0, lambda[k]), 1e-9);
      for (std::size_t j = 0; j < m; ++j) EXPECT_NEAR(dec.eigenvectors(j, k), e[j][k], 1e-9) << seed << " " << k;
      const auto a = oracle::pc(centered, e, k);
      const auto r = oracle::rc(a, e, k, n);
      ASSERT_EQ(dec.pcs[k].size(), a.size());
      for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(dec.pcs[k][i], a[i], 1e-9);
      for (std::size_t t = 0; t < n; ++t) EXPECT_NEAR(dec.rcs[k][t], r[t], 1e-9);
    }
  }
}

TEST(Decompose, InteriorMatchesLiteralAveragingFormula) {
  const auto ts = noise(150, 7);
  const std::size_t m = 10, n = 150;
  const auto dec = decompose(ts, window_of(m));
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = m - 1; i + m <= n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += dec.pcs[k][i - j] * dec.eigenvectors(static_cast<Eigen::Index>(j), k);
      EXPECT_NEAR(dec.rcs[k][i], s / static_cast<double>(m), 1e-10);
    }
}

TEST(Decompose, CompletenessOrthonormalityAndOrder) {
  for (std::size_t n : {100u, 1000u, 10000u})
    for (std::size_t m : {5u, 20u, 100u}) {
      if (m * 5 > n) continue;
      auto ts = noise(n, n + m);
      for (std::size_t i = 0; i < n; ++i) ts.values[i] += 3.0 + 0.001 * static_cast<double>(i);
      const auto dec = decompose(ts, window_of(m));
      for (std::size_t t = 0; t < n; ++t) {
        double s = dec.mean;
        for (const auto& rc : dec.rcs) s += rc[t];
        ASSERT_NEAR(s, ts.values[t], 1e-8) << n << " " << m << " " << t;
      }
      const Eigen::MatrixXd gram = dec.eigenvectors.transpose() * dec.eigenvectors;
      EXPECT_LT((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-8);
      double total = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        total += dec.variance_fractions[k];
        EXPECT_GE(dec.eigenvalues[k], -1e-10);
        if (k) EXPECT_LE(dec.variance_fractions[k], dec.variance_fractions[k - 1]);
      }
      EXPECT_NEAR(total, 1.0, 1e-10);
    }
}

TEST(Decompose, UncenteredRcsSumToInput) {
  auto ts = noise(300, 9);
  for (double& v : ts.values) v += 5.0;
  SsaConfig c = window_of(12);
  c.center = false;
  const auto dec = decompose(ts, c);
  EXPECT_EQ(dec.mean, 0.0);
  for (std::size_t t = 0; t < 300; ++t) {
    double s = 0.0;
    for (const auto& rc : dec.rcs) s += rc[t];
    EXPECT_NEAR(s, ts.values[t], 1e-8);
  }
  const auto o = oracle::lagged_correlation(ts.values, 12, false);
  const auto mat = toeplitz_correlation(ts.values, 12, false);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) EXPECT_NEAR(mat(i, j), o[i][j], 1e-12);
}

TEST(Decompose, SinusoidOccupiesOnePair) {
  TimeSeries ts;
  for (int i = 0; i < 4096; ++i) ts.values.push_back(std::sin(2.0 * std::numbers::pi * i / 64.0));
  const auto dec = decompose(ts, window_of(256));
  EXPECT_GT(dec.variance_fractions[0] + dec.variance_fractions[1], 0.99);
}

TEST(Decompose, RampCapturedByFirstComponent) {
  auto ts = noise(2000, 10);
  std::vector<double> ramp(2000);
  for (std::size_t i = 0; i < 2000; ++i) {
    ramp[i] = 0.05 * static_cast<double>(i);
    // ramp std is about 28.9; noise std 0.289 gives SNR 100
    ts.values[i] = ramp[i] + 0.289 * ts.values[i];
  }
  SsaConfig c;
  c.materialize = 1;
  const auto dec = decompose(ts, c);
  EXPECT_GT(pearson(dec.rcs[0], ramp), 0.999);
}

TEST(Decompose, WhiteNoiseSpectrumIsFlat) {
  const auto dec = decompose(noise(100000, 11), [] {
    SsaConfig c = window_of(50);
    c.materialize = 0;
    return c;
  }());
  const auto [lo, hi] = std::minmax_element(dec.eigenvalues.begin(), dec.eigenvalues.end());
  EXPECT_LT(*hi / *lo, 3.0);
}

TEST(Decompose, NegativeEigenvaluesAreClampedAndFlagged) {
  // The lag-normalised matrix is not guaranteed positive semi-definite for
  // short series with a wide window.
  bool seen = false;
  for (std::uint64_t seed = 0; seed < 500 && !seen; ++seed) {
    const auto ts = noise(12, seed);
    const auto dec = decompose(ts, window_of(9));
    if (dec.clamped_eigenvalues > 0) {
      seen = true;
      EXPECT_LT(dec.most_negative_eigenvalue, 0.0);
      for (double l : dec.eigenvalues) EXPECT_GE(l, 0.0);
    }
  }
  EXPECT_TRUE(seen);
}

TEST(SplitTrend, AllComponentsLeaveZeroResidual) {
  const auto ts = noise(400, 12);
  const auto dec = decompose(ts, window_of(20));
  std::vector<std::size_t> all(20);
  for (std::size_t k = 0; k < 20; ++k) all[k] = k + 1;
  const auto split = split_trend(dec, all, ts);
  for (double r : split.residual.values) EXPECT_NEAR(r, 0.0, 1e-8);
}

TEST(SplitTrend, TrendPlusResidualIsOriginal) {
  auto ts = noise(3000, 13);
  for (std::size_t i = 0; i < 3000; ++i) ts.values[i] += 0.01 * static_cast<double>(i);
  const auto dec = decompose(ts);
  const std::size_t sel[] = {1, 3};
  const auto split = split_trend(dec, sel, ts);
  EXPECT_EQ(split.selected, (std::vector<std::size_t>{1, 3}));
  for (std::size_t t = 0; t < 3000; ++t) EXPECT_NEAR(split.trend.values[t] + split.residual.values[t], ts.values[t], 1e-10);
}

TEST(SplitTrend, ResidualKeepsTheSine) {
  const std::size_t n = 8192;
  auto ts = noise(n, 14, 0.1);
  TimeSeries sine;
  sine.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sine.values[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 50.0);
    ts.values[i] += 0.01 * static_cast<double>(i) + sine.values[i];
  }
  const auto dec = decompose(ts, [] {
    SsaConfig c;
    c.materialize = 1;
    return c;
  }());
  const std::size_t one[] = {1};
  const auto split = split_trend(dec, one, ts);
  LpsdConfig lc;
  const auto a = lpsd(split.residual, lc);
  const auto b = lpsd(sine, lc);
  const auto pa = std::max_element(a.power.begin(), a.power.end()) - a.power.begin();
  const auto pb = std::max_element(b.power.begin(), b.power.end()) - b.power.begin();
  EXPECT_EQ(pa, pb);
  EXPECT_NEAR(a.power[static_cast<std::size_t>(pa)] / b.power[static_cast<std::size_t>(pb)], 1.0, 0.05);
}

TEST(SplitTrend, UnmaterializedComponentsMatchFull) {
  const auto ts = noise(800, 15);
  SsaConfig part = window_of(30);
  part.materialize = 1;
  const auto full = decompose(ts, window_of(30));
  const auto lazy = decompose(ts, part);
  const std::size_t sel[] = {2, 5};
  const auto a = split_trend(full, sel, ts), b = split_trend(lazy, sel, ts);
  for (std::size_t t = 0; t < 800; ++t) EXPECT_NEAR(a.trend.values[t], b.trend.values[t], 1e-12);
}

TEST(SplitTrend, SelectionErrors) {
  const auto ts = noise(200, 16);
  const auto dec = decompose(ts, window_of(10));
  EXPECT_THROW(split_trend(dec, std::vector<std::size_t>{}, ts), Error);
  EXPECT_THROW(split_trend(dec, std::vector<std::size_t>{11}, ts), Error);
  EXPECT_THROW(split_trend(dec, std::vector<std::size_t>{0}, ts), Error);
}
