#include "tsscale/ssa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "tsscale/error.hpp"

namespace tsscale {

std::size_t default_window(std::size_t n, double exponent) {
  if (n < 8) fail(ErrorKind::config, "SSA window rule needs N >= 8");
  if (exponent < 1.5 || exponent > 2.5) fail(ErrorKind::config, "SSA window exponent must lie in [1.5, 2.5]");
  const double m = std::round(std::pow(std::log(static_cast<double>(n)), exponent));
  const auto upper = static_cast<double>(n / 5);
  return static_cast<std::size_t>(std::clamp(m, 2.0, std::max(2.0, upper)));
}

Eigen::MatrixXd toeplitz_correlation(std::span<const double> x, std::size_t window, bool center) {
  const std::size_t n = x.size();
  if (window >= n) fail(ErrorKind::config, "SSA window must be smaller than the series length");
  if (window < 1) fail(ErrorKind::config, "SSA window must be positive");
  const double m = center ? std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n) : 0.0;
  std::vector<double> y(n);
  std::transform(x.begin(), x.end(), y.begin(), [m](double v) { return v - m; });

  std::vector<double> lag(window);
  for (std::size_t k = 0; k < window; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) s += y[i] * y[i + k];
    lag[k] = s / static_cast<double>(n - k);
  }
  const auto w = static_cast<Eigen::Index>(window);
  Eigen::MatrixXd c(w, w);
  for (Eigen::Index i = 0; i < w; ++i)
    for (Eigen::Index j = 0; j < w; ++j) c(i, j) = lag[static_cast<std::size_t>(std::abs(i - j))];
  return c;
}

std::vector<double> principal_component(std::span<const double> x, std::span<const double> eigenvector) {
  const std::size_t m = eigenvector.size();
  const std::size_t k = x.size() - m + 1;
  std::vector<double> a(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += x[i + j] * eigenvector[j];
    a[i] = s;
  }
  return a;
}

std::vector<double> reconstruct_component(std::span<const double> pc, std::span<const double> eigenvector,
                                          std::size_t n) {
  const std::size_t m = eigenvector.size();
  const std::size_t k = pc.size();
  std::vector<double> r(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    // j ranges over max(0, t-k+1) .. min(m-1, t)
    const std::size_t j_lo = t + 1 > k ? t + 1 - k : 0;
    const std::size_t j_hi = std::min(m - 1, t);
    double s = 0.0;
    for (std::size_t j = j_lo; j <= j_hi; ++j) s += pc[t - j] * eigenvector[j];
    r[t] = s / static_cast<double>(j_hi - j_lo + 1);
  }
  return r;
}

SsaDecomposition decompose(const TimeSeries& ts, const SsaConfig& config) {
  const std::size_t n = ts.size();
  const std::size_t window = config.window == 0 ? default_window(n, config.exponent) : config.window;
  if (window < 2 || window >= n) fail(ErrorKind::config, "SSA window must satisfy 1 < M < N");

  SsaDecomposition dec;
  dec.window = window;
  dec.mean = config.center ? mean(ts.view()) : 0.0;

  const Eigen::MatrixXd c = toeplitz_correlation(ts.view(), window, config.center);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
  if (solver.info() != Eigen::Success) fail(ErrorKind::numerical, "SSA eigendecomposition failed");

  const auto w = static_cast<Eigen::Index>(window);
  dec.eigenvalues.resize(window);
  dec.eigenvectors.resize(w, w);
  for (Eigen::Index k = 0; k < w; ++k) {
    // Eigen returns ascending order.
    const Eigen::Index src = w - 1 - k;
    double lambda = solver.eigenvalues()(src);
    if (lambda < 0.0) {
      ++dec.clamped_eigenvalues;
      dec.most_negative_eigenvalue = std::min(dec.most_negative_eigenvalue, lambda);
      lambda = 0.0;
    }
    dec.eigenvalues[static_cast<std::size_t>(k)] = lambda;
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    // Sign convention: first clearly nonzero entry positive.
    for (Eigen::Index j = 0; j < w; ++j) {
      if (std::abs(v(j)) > 1e-12) {
        if (v(j) < 0.0) v = -v;
        break;
      }
    }
    dec.eigenvectors.col(k) = v;
  }

  const double total = std::accumulate(dec.eigenvalues.begin(), dec.eigenvalues.end(), 0.0);
  if (!(total > 0.0)) fail(ErrorKind::numerical, "SSA: series has zero variance");
  dec.variance_fractions.resize(window);
  std::transform(dec.eigenvalues.begin(), dec.eigenvalues.end(), dec.variance_fractions.begin(),
                 [total](double l) { return l / total; });

  std::vector<double> y(ts.values);
  for (double& v : y) v -= dec.mean;

  const std::size_t count = std::min(config.materialize.value_or(window), window);
  const std::size_t k_len = n - window + 1;
  dec.pcs.resize(count);
  dec.rcs.resize(count);
  if (count > 4) {
    // Trajectory matrix times eigenvectors, all PCs at once.
    Eigen::MatrixXd traj(static_cast<Eigen::Index>(k_len), w);
    for (std::size_t i = 0; i < k_len; ++i)
      for (std::size_t j = 0; j < window; ++j)
        traj(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = y[i + j];
    const Eigen::MatrixXd pcs = traj * dec.eigenvectors.leftCols(static_cast<Eigen::Index>(count));
    for (std::size_t k = 0; k < count; ++k) {
      const auto col = pcs.col(static_cast<Eigen::Index>(k));
      dec.pcs[k].assign(col.data(), col.data() + col.size());
    }
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      const auto col = dec.eigenvectors.col(static_cast<Eigen::Index>(k));
      dec.pcs[k] = principal_component(y, std::span<const double>(col.data(), window));
    }
  }
  for (std::size_t k = 0; k < count; ++k) {
    const auto col = dec.eigenvectors.col(static_cast<Eigen::Index>(k));
    dec.rcs[k] = reconstruct_component(dec.pcs[k], std::span<const double>(col.data(), window), n);
  }
  return dec;
}

TrendSplit split_trend(const SsaDecomposition& dec, std::span<const std::size_t> selected,
                       const TimeSeries& original) {
  if (selected.empty()) fail(ErrorKind::config, "trend selection must name at least one component");
  const std::size_t n = original.size();
  TrendSplit out;
  out.selected.assign(selected.begin(), selected.end());
  out.trend = original;
  out.trend.label = original.label;
  std::fill(out.trend.values.begin(), out.trend.values.end(), dec.mean);

  std::vector<double> centered;
  for (const std::size_t idx : selected) {
    if (idx < 1 || idx > dec.window)
      fail(ErrorKind::config, "trend component " + std::to_string(idx) + " outside 1.." + std::to_string(dec.window));
    const std::size_t k = idx - 1;
    std::vector<double> computed;
    const std::vector<double>* rc = nullptr;
    if (k < dec.rcs.size() && dec.rcs[k].size() == n) {
      rc = &dec.rcs[k];
    } else {
      if (centered.empty()) {
        centered = original.values;
        for (double& v : centered) v -= dec.mean;
      }
      const auto col = dec.eigenvectors.col(static_cast<Eigen::Index>(k));
      const std::span<const double> e(col.data(), dec.window);
      computed = reconstruct_component(principal_component(centered, e), e, n);
      rc = &computed;
    }
    for (std::size_t t = 0; t < n; ++t) out.trend.values[t] += (*rc)[t];
  }
  out.residual = original;
  for (std::size_t t = 0; t < n; ++t) out.residual.values[t] = original.values[t] - out.trend.values[t];
  return out;
}

}  // namespace tsscale
