#include "tsscale/distfit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "tsscale/error.hpp"

namespace tsscale {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double total_loglik(std::span<const double> data, const DistParams& params) {
  double sum = 0.0;
  for (const double x : data) sum += log_pdf(params, x);
  return sum;
}

// Profile-likelihood equation for the Weibull shape:
//   sum x^k ln x / sum x^k - 1/k - mean(ln x) = 0
// which is increasing in k. Safeguarded Newton inside a bracket.
DistFit fit_weibull(std::span<const double> x, const FitOptions& options) {
  const auto n = static_cast<double>(x.size());
  std::vector<double> lx(x.size());
  std::transform(x.begin(), x.end(), lx.begin(), [](double v) { return std::log(v); });
  const double mean_log = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double ref = *std::max_element(lx.begin(), lx.end());
  if (ref - *std::min_element(lx.begin(), lx.end()) <= 0.0)
    fail(ErrorKind::numerical, "Weibull fit: all samples are equal");

  struct Eval {
    double g, dg, log_s0;
  };
  auto eval = [&](double k) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (const double l : lx) {
      const double d = l - ref;
      const double w = std::exp(k * d);
      s0 += w;
      s1 += w * d;
      s2 += w * d * d;
    }
    const double m1 = s1 / s0;
    const double m2 = s2 / s0;
    return Eval{m1 + ref - 1.0 / k - mean_log, (m2 - m1 * m1) + 1.0 / (k * k), std::log(s0)};
  };

  const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (const double v : x) ss += (v - m) * (v - m);
  const double cv = std::sqrt(ss / (n - 1.0)) / m;
  double k = std::clamp(std::pow(cv, -1.086), 0.05, 50.0);

  double lo = 0.0, hi = kInf;
  DistFit fit;
  fit.family = Family::weibull;
  Eval e{};
  for (fit.iterations = 1; fit.iterations <= options.max_iterations; ++fit.iterations) {
    e = eval(k);
    if (e.g < 0.0) lo = k;
    else hi = k;
    double next = k - e.g / e.dg;
    if (!(next > lo && next < hi)) next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * k;
    const double step = std::abs(next - k);
    k = next;
    if (step <= 1e-14 * k || std::abs(e.g) < 1e-15) {
      fit.converged = true;
      break;
    }
  }
  if (!fit.converged) fail(ErrorKind::numerical, "Weibull fit did not converge within the iteration budget");
  e = eval(k);
  const double scale = std::exp(ref + (e.log_s0 - std::log(n)) / k);
  fit.params = WeibullParams{k, scale};
  return fit;
}

// Gamma: ln(alpha) - digamma(alpha) = ln(mean) - mean(ln x), rate = alpha/mean.
DistFit fit_gamma(std::span<const double> x, const FitOptions& options) {
  const auto n = static_cast<double>(x.size());
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double mean_log = 0.0;
  for (const double v : x) mean_log += std::log(v);
  mean_log /= n;
  const double s = std::log(m) - mean_log;
  if (!(s > 0.0)) fail(ErrorKind::numerical, "Gamma fit: all samples are equal");

  double alpha = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  DistFit fit;
  fit.family = Family::gamma;
  for (fit.iterations = 1; fit.iterations <= options.max_iterations; ++fit.iterations) {
    const double h = std::log(alpha) - boost::math::digamma(alpha) - s;
    const double dh = 1.0 / alpha - boost::math::trigamma(alpha);
    double next = alpha - h / dh;
    if (!(next > 0.0)) next = 0.5 * alpha;
    const double step = std::abs(next - alpha);
    alpha = next;
    if (step <= 1e-14 * alpha) {
      fit.converged = true;
      break;
    }
  }
  if (!fit.converged) fail(ErrorKind::numerical, "Gamma fit did not converge within the iteration budget");
  fit.params = GammaParams{alpha, alpha / m};
  return fit;
}

// Mean negative GEV log-likelihood of standardized data and its gradient in
// theta = (mu, ln sigma, xi). Returns +inf outside the support.
double gev_objective(std::span<const double> z, const std::array<double, 3>& theta, std::array<double, 3>& grad) {
  const double mu = theta[0];
  const double sigma = std::exp(theta[1]);
  const double xi = theta[2];
  double f = 0.0;
  double g_mu = 0.0, g_ls = 0.0, g_xi = 0.0;
  const bool near_gumbel = std::abs(xi) < 1e-5;
  for (const double v : z) {
    const double y = (v - mu) / sigma;
    const double xy = xi * y;
    if (xy <= -1.0) return kInf;
    const double t = 1.0 + xy;
    const double lt = std::log1p(xy);
    const double l_over_xi = near_gumbel && xi == 0.0 ? y : lt / xi;
    const double u = std::exp(-l_over_xi);
    f += -theta[1] - lt - l_over_xi - u;
    const double core = (1.0 + xi - u) / t;
    g_mu += core / sigma;
    g_ls += -1.0 + y * core;
    if (near_gumbel) {
      const double y2 = y * y, y3 = y2 * y, y4 = y3 * y;
      g_xi += -(y - 0.5 * y2) - 2.0 * xi * (y3 / 3.0 - 0.5 * y2) -
              std::exp(-y) * (0.5 * y2 + 2.0 * xi * (0.125 * y4 - y3 / 3.0));
    } else {
      g_xi += (1.0 - u) / xi * (l_over_xi - y / t) - y / t;
    }
  }
  const auto n = static_cast<double>(z.size());
  grad = {-g_mu / n, -g_ls / n, -g_xi / n};
  return -f / n;
}

std::array<double, 3> gev_pwm_start(std::span<const double> z) {
  std::vector<double> s(z.begin(), z.end());
  std::sort(s.begin(), s.end());
  const auto n = static_cast<double>(s.size());
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto j = static_cast<double>(i);
    b0 += s[i];
    b1 += j / (n - 1.0) * s[i];
    b2 += j * (j - 1.0) / ((n - 1.0) * (n - 2.0)) * s[i];
  }
  b0 /= n;
  b1 /= n;
  b2 /= n;
  const double c = (2.0 * b1 - b0) / (3.0 * b2 - b0) - std::log(2.0) / std::log(3.0);
  const double k = 7.8590 * c + 2.9554 * c * c;
  if (std::abs(k) < 1e-6) {
    const double sigma = (2.0 * b1 - b0) / std::log(2.0);
    return {b0 - 0.5772156649015329 * sigma, std::log(sigma), 0.0};
  }
  const double g = std::tgamma(1.0 + k);
  const double sigma = (2.0 * b1 - b0) * k / (g * (1.0 - std::pow(2.0, -k)));
  return {b0 + sigma * (g - 1.0) / k, std::log(sigma), -k};
}

DistFit fit_gev(std::span<const double> x, const FitOptions& options) {
  const auto n = static_cast<double>(x.size());
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (const double v : x) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) fail(ErrorKind::numerical, "GEV fit: all samples are equal");
  std::vector<double> z(x.size());
  std::transform(x.begin(), x.end(), z.begin(), [&](double v) { return (v - m) / sd; });

  std::array<double, 3> theta = gev_pwm_start(z);
  std::array<double, 3> grad{};
  double f = gev_objective(z, theta, grad);
  if (!std::isfinite(f)) {
    // Gumbel moments always give a feasible start.
    const double sigma = std::sqrt(6.0) / 3.141592653589793;
    theta = {-0.5772156649015329 * sigma, std::log(sigma), 0.0};
    f = gev_objective(z, theta, grad);
  }

  // BFGS on the inverse Hessian with Armijo backtracking.
  std::array<std::array<double, 3>, 3> h{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  auto reset = [&h] { h = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; };
  auto gnorm = [](const std::array<double, 3>& g) {
    return std::max({std::abs(g[0]), std::abs(g[1]), std::abs(g[2])});
  };

  DistFit fit;
  fit.family = Family::gev;
  for (fit.iterations = 0; fit.iterations < options.max_iterations; ++fit.iterations) {
    if (gnorm(grad) < options.gradient_tolerance) {
      fit.converged = true;
      break;
    }
    std::array<double, 3> p{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) p[i] -= h[i][j] * grad[j];
    double slope = p[0] * grad[0] + p[1] * grad[1] + p[2] * grad[2];
    if (slope >= 0.0) {
      reset();
      p = {-grad[0], -grad[1], -grad[2]};
      slope = -(grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2]);
    }
    double step = 1.0;
    std::array<double, 3> trial{}, trial_grad{};
    double trial_f = kInf;
    while (step > 1e-16) {
      for (int i = 0; i < 3; ++i) trial[i] = theta[i] + step * p[i];
      trial_f = gev_objective(z, trial, trial_grad);
      if (std::isfinite(trial_f) && trial_f <= f + 1e-4 * step * slope) break;
      // Near the optimum f is flat to rounding; accept steps that shrink the
      // gradient without measurably raising f.
      if (std::isfinite(trial_f) && trial_f <= f + 1e-13 * std::abs(f) && gnorm(trial_grad) < gnorm(grad)) break;
      step *= 0.5;
    }
    if (!(step > 1e-16)) {
      // Line search stalled at the floating-point floor of the objective.
      fit.converged = gnorm(grad) < 1e-6;
      break;
    }
    std::array<double, 3> s{}, y{};
    for (int i = 0; i < 3; ++i) {
      s[i] = trial[i] - theta[i];
      y[i] = trial_grad[i] - grad[i];
    }
    if (s[0] == 0.0 && s[1] == 0.0 && s[2] == 0.0) {
      fit.converged = gnorm(grad) < 1e-6;
      break;
    }
    const double sy = s[0] * y[0] + s[1] * y[1] + s[2] * y[2];
    if (sy > 1e-14) {
      std::array<double, 3> hy{};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) hy[i] += h[i][j] * y[j];
      const double yhy = y[0] * hy[0] + y[1] * hy[1] + y[2] * hy[2];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          h[i][j] += (sy + yhy) * s[i] * s[j] / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
    }
    theta = trial;
    grad = trial_grad;
    f = trial_f;
  }
  if (!fit.converged) fail(ErrorKind::numerical, "GEV fit did not converge within the iteration budget");
  fit.params = GevParams{m + sd * theta[0], sd * std::exp(theta[1]), theta[2]};
  return fit;
}

std::vector<double> prepare(std::span<const double> data, Family family, const FitOptions& options,
                            std::size_t& shifted) {
  if (data.size() < 30) fail(ErrorKind::numerical, "distribution fit needs at least 30 samples");
  std::vector<double> x(data.begin(), data.end());
  shifted = 0;
  if (family == Family::gev) return x;
  for (double& v : x) {
    if (v < 0.0)
      fail(ErrorKind::numerical, std::string("invalid support: negative sample for ") + to_string(family));
    if (v == 0.0) {
      v = options.zero_shift;
      ++shifted;
    }
  }
  return x;
}

double quantile_sorted(const std::vector<double>& s, double p) {
  const double pos = p * static_cast<double>(s.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  return i + 1 < s.size() ? s[i] + frac * (s[i + 1] - s[i]) : s[i];
}

}  // namespace

DistFit fit_distribution(std::span<const double> data, Family family, const FitOptions& options) {
  std::size_t shifted = 0;
  const auto x = prepare(data, family, options, shifted);
  DistFit fit;
  switch (family) {
    case Family::weibull: fit = fit_weibull(x, options); break;
    case Family::gamma: fit = fit_gamma(x, options); break;
    case Family::gev: fit = fit_gev(x, options); break;
  }
  fit.shifted_zeros = shifted;
  fit.loglik = total_loglik(x, fit.params);
  if (!std::isfinite(fit.loglik))
    fail(ErrorKind::numerical, std::string(to_string(family)) + " fit: non-finite log-likelihood");
  return fit;
}

DistFit fit_distribution(const TimeSeries& ts, Family family, const FitOptions& options) {
  return fit_distribution(ts.view(), family, options);
}

EmpiricalDensity empirical_density(std::span<const double> data, std::optional<std::size_t> n_bins) {
  if (data.size() < 2) fail(ErrorKind::numerical, "empirical density needs at least two samples");
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  if (!(hi > lo)) fail(ErrorKind::numerical, "empirical density: fewer than 2 non-empty bins (constant data)");

  std::size_t bins = 0;
  if (n_bins) {
    bins = *n_bins;
  } else {
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    const double width = 2.0 * iqr * std::cbrt(1.0 / static_cast<double>(sorted.size()));
    bins = width > 0.0 ? static_cast<std::size_t>(std::ceil((hi - lo) / width))
                       : static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(sorted.size())))) + 1;
  }
  bins = std::max<std::size_t>(bins, 1);

  EmpiricalDensity out;
  out.n = sorted.size();
  out.bin_edges.resize(bins + 1);
  const double w = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) out.bin_edges[i] = lo + w * static_cast<double>(i);
  out.bin_edges.back() = hi;
  std::vector<std::size_t> counts(bins, 0);
  for (const double v : sorted) {
    auto idx = static_cast<std::size_t>((v - lo) / w);
    counts[std::min(idx, bins - 1)]++;
  }
  out.probs.resize(bins);
  for (std::size_t i = 0; i < bins; ++i)
    out.probs[i] = static_cast<double>(counts[i]) / static_cast<double>(out.n);
  return out;
}

KlResult kl_divergence(std::span<const double> data, const DistParams& params, std::optional<std::size_t> n_bins) {
  const EmpiricalDensity density = empirical_density(data, n_bins);
  const auto nonempty = std::count_if(density.probs.begin(), density.probs.end(), [](double p) { return p > 0.0; });
  if (nonempty < 2) fail(ErrorKind::numerical, "KL divergence: fewer than 2 non-empty bins");

  KlResult out;
  out.n_bins = density.probs.size();
  // Bin mass from CDF differences below the median, survival differences above.
  auto mass = [&params](double lo, double hi) {
    const double c = cdf(params, lo);
    if (c < 0.5) return cdf(params, hi) - c;
    return sf(params, lo) - sf(params, hi);
  };
  double sum = 0.0;
  for (std::size_t i = 0; i < density.probs.size(); ++i) {
    const double q = mass(density.bin_edges[i], density.bin_edges[i + 1]);
    const double p = density.probs[i];
    if (p == 0.0) continue;
    if (!(q > 0.0)) {
      out.value = kInf;
      out.infinite_bin = i;
      return out;
    }
    sum += p * std::log(p / q);
  }
  if (sum < 0.0) {
    sum = 0.0;
    out.clamped = true;
  }
  out.value = sum;
  return out;
}

KlResult kl_divergence(const TimeSeries& data, const DistFit& fit, std::optional<std::size_t> n_bins) {
  return kl_divergence(data.view(), fit.params, n_bins);
}

bool ranks_before(const DistFit& a, const DistFit& b) {
  const double ka = a.kl.value_or(kInf);
  const double kb = b.kl.value_or(kInf);
  if (ka != kb) return ka < kb;
  if (a.loglik != b.loglik) return a.loglik > b.loglik;
  return std::strcmp(to_string(a.family), to_string(b.family)) < 0;
}

Ranking rank_distributions(const TimeSeries& ts, const FitOptions& options, std::optional<std::size_t> n_bins) {
  Ranking ranking;
  for (const Family family : {Family::weibull, Family::gamma, Family::gev}) {
    try {
      DistFit fit = fit_distribution(ts, family, options);
      std::vector<double> scored(ts.values);
      if (family != Family::gev)
        for (double& v : scored)
          if (v == 0.0) v = options.zero_shift;
      const KlResult kl = kl_divergence(scored, fit.params, n_bins);
      fit.kl = kl.value;
      fit.kl_clamped = kl.clamped;
      fit.kl_infinite_bin = kl.infinite_bin;
      ranking.fits.push_back(std::move(fit));
    } catch (const Error& e) {
      ranking.failures.push_back({family, e.what()});
    }
  }
  if (ranking.fits.empty()) fail(ErrorKind::numerical, "all distribution fits failed for '" + ts.label + "'");
  std::sort(ranking.fits.begin(), ranking.fits.end(), ranks_before);
  return ranking;
}

}  // namespace tsscale
