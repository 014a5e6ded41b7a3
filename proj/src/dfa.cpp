#include "tsscale/dfa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsscale/error.hpp"
#include "tsscale/regression.hpp"

namespace tsscale {

namespace {

// Orthonormal polynomial basis (degree 0..order) over the sample positions
// 0..n-1 by modified Gram-Schmidt on centered, scaled monomials.
std::vector<std::vector<double>> box_basis(std::size_t n, int order) {
  const double centre = 0.5 * static_cast<double>(n - 1);
  const double scale = std::max(1.0, centre);
  std::vector<std::vector<double>> basis;
  for (int d = 0; d <= order; ++d) {
    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t) v[t] = std::pow((static_cast<double>(t) - centre) / scale, d);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const double dot = std::inner_product(v.begin(), v.end(), q.begin(), 0.0);
        for (std::size_t t = 0; t < n; ++t) v[t] -= dot * q[t];
      }
    }
    const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    for (double& x : v) x /= norm;
    basis.push_back(std::move(v));
  }
  return basis;
}

double box_residual_ss(const double* y, const std::vector<std::vector<double>>& basis, std::vector<double>& work) {
  const std::size_t n = basis.front().size();
  std::copy(y, y + n, work.begin());
  for (const auto& q : basis) {
    double dot = 0.0;
    for (std::size_t t = 0; t < n; ++t) dot += work[t] * q[t];
    for (std::size_t t = 0; t < n; ++t) work[t] -= dot * q[t];
  }
  double ss = 0.0;
  for (std::size_t t = 0; t < n; ++t) ss += work[t] * work[t];
  return ss;
}

}  // namespace

std::vector<double> dfa_profile(std::span<const double> series) {
  const double m = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
  std::vector<double> y(series.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    acc += series[i] - m;
    y[i] = acc;
  }
  return y;
}

FluctuationFunction dfa(std::span<const double> series, int order, std::span<const std::size_t> box_sizes, double dt) {
  const std::size_t n = series.size();
  if (order < 1 || order > 3) fail(ErrorKind::config, "DFA order must be 1, 2 or 3");
  if (n < 2) fail(ErrorKind::numerical, "DFA needs at least two samples");
  if (box_sizes.empty()) fail(ErrorKind::config, "DFA needs at least one box size");
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  if (*lo == *hi) fail(ErrorKind::numerical, "DFA of a constant series is undefined");

  const auto profile = dfa_profile(series);
  FluctuationFunction out;
  out.order = order;
  out.dt = dt;
  for (const std::size_t box : box_sizes) {
    if (box < static_cast<std::size_t>(order) + 2)
      fail(ErrorKind::config, "DFA box size " + std::to_string(box) + " is smaller than order + 2");
    if (box > n / 4)
      fail(ErrorKind::config, "DFA box size " + std::to_string(box) + " exceeds N/4 = " + std::to_string(n / 4));
    const auto basis = box_basis(box, order);
    std::vector<double> work(box);
    const std::size_t boxes = n / box;
    const std::size_t tail = n - boxes * box;
    double ss = 0.0;
    for (std::size_t b = 0; b < boxes; ++b) ss += box_residual_ss(profile.data() + b * box, basis, work);
    for (std::size_t b = 0; b < boxes; ++b) ss += box_residual_ss(profile.data() + tail + b * box, basis, work);
    out.box_sizes.push_back(box);
    out.fluctuation.push_back(std::sqrt(ss / static_cast<double>(2 * boxes * box)));
  }
  return out;
}

ScalingExponent scaling_exponent(const FluctuationFunction& f, double t_lo, double t_hi) {
  if (!(t_lo < t_hi)) fail(ErrorKind::config, "scaling window must satisfy t_lo < t_hi");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < f.box_sizes.size(); ++i) {
    const double minutes = static_cast<double>(f.box_sizes[i]) * f.dt;
    if (minutes < t_lo || minutes > t_hi) continue;
    if (!(f.fluctuation[i] > 0.0)) continue;
    lx.push_back(std::log10(minutes));
    ly.push_back(std::log10(f.fluctuation[i]));
  }
  if (lx.size() < 4)
    fail(ErrorKind::numerical, "scaling window [" + std::to_string(t_lo) + ", " + std::to_string(t_hi) +
                                   "] min holds " + std::to_string(lx.size()) + " box sizes, need 4");
  const LineFit line = fit_line(lx, ly);
  ScalingExponent e;
  e.alpha = line.slope;
  e.stderr_alpha = line.stderr_slope;
  e.intercept = line.intercept;
  e.n_lo = t_lo;
  e.n_hi = t_hi;
  e.n_points = line.n;
  return e;
}

std::vector<std::size_t> default_box_grid(std::size_t n, double dt, double t_min, std::size_t points_per_decade,
                                          int order) {
  if (points_per_decade < 1) fail(ErrorKind::config, "points_per_decade must be positive");
  if (t_min < static_cast<double>(order + 2) * dt * (1.0 - 1e-12))
    fail(ErrorKind::config, "t_min must be at least (order + 2) * dt");
  const double n_min = t_min / dt;
  const std::size_t n_max = n / 10;
  if (!(static_cast<double>(n_max) > n_min)) fail(ErrorKind::config, "empty DFA box grid: N/10 does not exceed t_min");

  const double decades = std::log10(static_cast<double>(n_max) / n_min);
  const auto steps = static_cast<std::size_t>(std::floor(decades * static_cast<double>(points_per_decade) + 1e-9));
  std::vector<std::size_t> grid;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double v = n_min * std::pow(10.0, static_cast<double>(i) / static_cast<double>(points_per_decade));
    const auto box = std::min(n_max, static_cast<std::size_t>(std::llround(v)));
    if (grid.empty() || box > grid.back()) grid.push_back(box);
  }
  if (grid.back() < n_max) grid.push_back(n_max);
  if (grid.empty()) fail(ErrorKind::config, "empty DFA box grid");
  return grid;
}

std::string correlation_label(const ScalingExponent& e) {
  if (std::abs(e.alpha - 0.5) <= 2.0 * e.stderr_alpha) return "uncorrelated";
  return e.alpha > 0.5 ? "persistent" : "anti-persistent";
}

}  // namespace tsscale
