// Runs the acceptance criteria on synthetic inputs with known ground truth and
// prints one PASS/FAIL line per criterion. Exit status is the failure count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "tsscale/config.hpp"
#include "tsscale/dfa.hpp"
#include "tsscale/distfit.hpp"
#include "tsscale/error.hpp"
#include "tsscale/io.hpp"
#include "tsscale/pipeline.hpp"
#include "tsscale/series.hpp"
#include "tsscale/spectral.hpp"
#include "tsscale/ssa.hpp"
#include "tsscale/surrogate.hpp"
#include "tsscale/synth.hpp"

using namespace tsscale;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void note(Outcome& o, bool ok, const std::string& what) {
  if (!ok) o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what + (ok ? "" : " [violated]");
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

TimeSeries make(SignalKind kind, std::size_t n, std::uint64_t seed, double beta = 1.0) {
  GeneratorSpec g;
  g.kind = kind;
  g.n = n;
  g.seed = seed;
  g.beta = beta;
  return generate(g);
}

double dfa_alpha(const std::vector<double>& x, double lo, double hi) {
  const auto grid = default_box_grid(x.size(), 1.0, 10.0, 20, 1);
  return scaling_exponent(dfa(x, 1, grid), lo, hi).alpha;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome dfa_calibration() {
  Outcome o;
  const std::size_t n = 1 << 16;
  const double hi = n / 10.0;
  const double white = dfa_alpha(make(SignalKind::white, n, 1).values, 10, hi);
  note(o, std::abs(white - 0.5) <= 0.03, fmt("white alpha %.4f (0.50 +- 0.03)", white));
  const auto w = make(SignalKind::white, n, 2).values;
  std::vector<double> walk(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) walk[i] = acc += w[i];
  const double brown = dfa_alpha(walk, 10, hi);
  note(o, std::abs(brown - 1.5) <= 0.05, fmt("cumulative sum alpha %.4f (1.50 +- 0.05)", brown));
  return o;
}

Outcome spectral_calibration() {
  Outcome o;
  const auto psd = lpsd(make(SignalKind::powerlaw, 1 << 20, 3, 1.5));
  const auto fit = fit_spectral_exponent(psd, 1e-4, 1e-2);
  note(o, std::abs(fit.beta - 1.5) <= 0.1, fmt("beta %.4f over [1e-4, 1e-2] (1.5 +- 0.1)", fit.beta));
  return o;
}

Outcome cross_method() {
  Outcome o;
  const std::size_t n = 1 << 16;
  for (double beta : {0.5, 1.0, 1.5, 2.0}) {
    const double a = dfa_alpha(make(SignalKind::powerlaw, n, 40 + static_cast<std::uint64_t>(beta * 10), beta).values,
                               10, n / 10.0);
    const double want = (beta + 1.0) / 2.0;
    note(o, std::abs(a - want) <= 0.1, fmt("beta %.1f: alpha %.4f vs %.3f", beta, a, want));
  }
  return o;
}

Outcome ssa_correctness() {
  Outcome o;
  // Brute force at N <= 200.
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const std::size_t n = 60 + 20 * seed, m = 4 + seed;
    auto ts = make(SignalKind::powerlaw, n, 100 + seed, 1.0);
    SsaConfig c;
    c.window = m;
    const auto dec = decompose(ts, c);
    std::vector<double> centred = ts.values;
    const double mu = oracle::mean(centred);
    for (double& v : centred) v -= mu;
    const auto [lambda, e] = oracle::jacobi_eigen(oracle::lagged_correlation(ts.values, m, true));
    const auto cm = toeplitz_correlation(ts.values, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        worst = std::max(worst, std::abs(cm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                                         oracle::lagged_correlation(ts.values, m, true)[i][j]));
    for (std::size_t k = 0; k < m; ++k) {
      worst = std::max(worst, std::abs(dec.eigenvalues[k] - std::max(0.0, lambda[k])));
      const auto a = oracle::pc(centred, e, k);
      const auto r = oracle::rc(a, e, k, n);
      for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(dec.pcs[k][i] - a[i]));
      for (std::size_t t = 0; t < n; ++t) worst = std::max(worst, std::abs(dec.rcs[k][t] - r[t]));
    }
  }
  note(o, worst <= 1e-9, fmt("brute-force max deviation %.2e (<= 1e-9)", worst));

  // Completeness at N = 10^4.
  const auto ts = make(SignalKind::powerlaw, 10000, 7, 1.2);
  const auto dec = decompose(ts);
  double gap = 0.0;
  for (std::size_t t = 0; t < ts.size(); ++t) {
    double s = dec.mean;
    for (const auto& rc : dec.rcs) s += rc[t];
    gap = std::max(gap, std::abs(s - ts.values[t]));
  }
  note(o, gap <= 1e-8, fmt("completeness at N=1e4, M=%zu: %.2e (<= 1e-8)", dec.window, gap));

  // Ramp captured by RC-1.
  auto noisy = make(SignalKind::white, 5000, 8);
  std::vector<double> ramp(5000);
  for (std::size_t i = 0; i < 5000; ++i) {
    ramp[i] = 0.01 * static_cast<double>(i);
    noisy.values[i] = ramp[i] + 0.15 * noisy.values[i];
  }
  SsaConfig one;
  one.materialize = 1;
  const double r = pearson(decompose(noisy, one).rcs[0], ramp);
  note(o, r > 0.999, fmt("ramp vs RC-1 r = %.6f (> 0.999)", r));
  return o;
}

Outcome distribution_ranking() {
  Outcome o;
  const std::pair<Family, DistParams> cases[] = {{Family::weibull, WeibullParams{2, 3}},
                                                 {Family::gamma, GammaParams{2, 1}},
                                                 {Family::gev, GevParams{5, 1, 0.1}}};
  for (const auto& [family, params] : cases) {
    int wins = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
      std::mt19937_64 eng(1000 * static_cast<std::uint64_t>(family) + trial);
      TimeSeries ts;
      ts.values.resize(100000);
      for (double& v : ts.values) v = sample(params, eng);
      const auto r = rank_distributions(ts);
      if (!r.fits.empty() && r.fits.front().family == family) ++wins;
    }
    note(o, wins >= 95, fmt("%s ranked first in %d/100", to_string(family), wins));
  }
  return o;
}

Outcome kl_properties() {
  Outcome o;
  const DistParams truths[] = {WeibullParams{2, 3}, GammaParams{2, 1}, GevParams{0, 1, 0.1}};
  std::uint64_t seed = 1;
  for (const auto& p : truths) {
    std::mt19937_64 eng(seed++);
    std::vector<double> x(100000);
    for (double& v : x) v = sample(p, eng);
    const double kl = kl_divergence(x, p).value;
    note(o, kl < 0.01, fmt("self-KL %.5f (< 0.01)", kl));
  }
  double min_kl = INFINITY;
  std::size_t evaluated = 0;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.3, 4.0);
  for (int trial = 0; trial < 90; ++trial) {
    const DistParams truth = trial % 3 == 0   ? DistParams{WeibullParams{u(rng), u(rng)}}
                             : trial % 3 == 1 ? DistParams{GammaParams{u(rng), u(rng)}}
                                              : DistParams{GevParams{u(rng), u(rng), 0.15 * (u(rng) - 2.0)}};
    std::vector<double> x(200 + 200 * static_cast<std::size_t>(trial));
    for (double& v : x) v = sample(truth, rng);
    for (Family f : {Family::weibull, Family::gamma, Family::gev}) {
      try {
        const auto fit = fit_distribution(x, f);
        for (std::optional<std::size_t> bins : {std::optional<std::size_t>{}, std::optional<std::size_t>{13}}) {
          min_kl = std::min(min_kl, kl_divergence(x, fit.params, bins).value);
          ++evaluated;
        }
      } catch (const Error&) {
      }
    }
  }
  note(o, min_kl >= -1e-10, fmt("min KL over %zu evaluations %.3e (>= -1e-10)", evaluated, min_kl));
  return o;
}

Outcome surrogate_contrast() {
  Outcome o;
  GeneratorSpec g;
  g.kind = SignalKind::cascade;
  g.n = (std::size_t{1} << 17) + 1;
  g.depth = 18;
  g.seed = 2024;
  const auto x = generate(g);
  SurrogateConfig c;
  c.count = 100;
  const auto r = ensemble_test(increments(x), c, {300, 9070});
  const double dm = r.alpha_mag_orig - r.alpha_mag_mean;
  const double ds = std::abs(r.alpha_sign_orig - r.alpha_sign_mean);
  note(o, dm > 3.0 * r.alpha_mag_std,
       fmt("magnitude %.3f vs %.3f +- %.3f, gap %.3f > %.3f", r.alpha_mag_orig, r.alpha_mag_mean, r.alpha_mag_std, dm,
           3.0 * r.alpha_mag_std));
  note(o, ds < 2.0 * r.alpha_sign_std,
       fmt("sign %.3f vs %.3f +- %.3f, gap %.3f < %.3f", r.alpha_sign_orig, r.alpha_sign_mean, r.alpha_sign_std, ds,
           2.0 * r.alpha_sign_std));
  note(o, true, fmt("%zu/100 surrogates converged", r.converged_count));
  return o;
}

PipelineConfig shared_trend_setup(const fs::path& root, std::size_t n, std::size_t count) {
  fs::remove_all(root);
  fs::create_directories(root);
  PipelineConfig cfg;
  cfg.output_dir = root / "out";
  cfg.high = {300, n / 10.0};
  cfg.surrogate_window = {300, n / 10.0};
  cfg.surrogate.count = count;
  for (std::uint64_t i = 0; i < 6; ++i) {
    auto noise = make(SignalKind::powerlaw, n, 500 + i, 0.5);
    TimeSeries ts;
    ts.values.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      const double u = static_cast<double>(t) / static_cast<double>(n);
      ts.values[t] = 10.0 + 2.0 * u + 1.5 * std::sin(4.0 * std::numbers::pi * u) + 0.3 * noise.values[t];
    }
    ts.t0 = 1.7e9;
    const std::string label = "s" + std::to_string(i + 1);
    write_series_csv(root / (label + ".csv"), ts);
    cfg.inputs.push_back({label, root / (label + ".csv")});
  }
  return cfg;
}

Outcome exact_invariants() {
  Outcome o;
  const auto ts = make(SignalKind::cascade, 8192, 9);
  const auto inc = increments(ts);
  const auto s = make_surrogate(inc.values, 4);
  auto a = inc.values, b = s.values;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  note(o, a == b, "surrogate multiset equality");

  const auto ms = mag_sign(inc);
  bool exact = true;
  for (std::size_t i = 0; i < inc.values.size(); ++i) exact &= ms.magnitude[i] * ms.sign[i] == inc.values[i];
  note(o, exact, "magnitude x sign reconstruction");

  const auto dec = decompose(ts);
  const std::size_t sel[] = {1, 2};
  const auto split = split_trend(dec, sel, ts);
  double gap = 0.0;
  for (std::size_t t = 0; t < ts.size(); ++t)
    gap = std::max(gap, std::abs(split.trend.values[t] + split.residual.values[t] - ts.values[t]));
  note(o, gap <= 1e-10, fmt("trend + residual identity %.1e", gap));

  std::vector<TimeSeries> set;
  for (std::uint64_t i = 0; i < 4; ++i) set.push_back(make(SignalKind::powerlaw, 4096, 60 + i, 1.0));
  for (std::size_t i = 0; i < set.size(); ++i) set[i].label = "p" + std::to_string(i);
  const auto m = pearson_matrix(set);
  bool sym = true;
  for (Eigen::Index i = 0; i < m.r.rows(); ++i) {
    sym &= m.r(i, i) == 1.0;
    for (Eigen::Index k = 0; k < m.r.cols(); ++k) sym &= m.r(i, k) == m.r(k, i);
  }
  note(o, sym, "Pearson symmetry and unit diagonal");

  const fs::path root = fs::temp_directory_path() / "tsscale_acceptance_repro";
  auto cfg = shared_trend_setup(root, 12000, 2);
  cfg.inputs.resize(2);
  cfg.high = cfg.surrogate_window = {150, 1200};
  run_pipeline(cfg);
  const std::string first = slurp(cfg.output_dir / "report.json");
  cfg.output_dir = root / "again";
  run_pipeline(cfg);
  note(o, !first.empty() && first == slurp(cfg.output_dir / "report.json"), "byte-identical reports for a fixed seed");
  fs::remove_all(root);
  return o;
}

Outcome pipeline_pattern() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "tsscale_acceptance_pattern";
  const auto cfg = shared_trend_setup(root, 20000, 3);
  const Json report = run_pipeline(cfg);
  const auto& trends = report["pearson"]["trends"]["r"];
  const auto& originals = report["pearson"]["originals"]["r"];
  double t_min = 1.0, o_min = 1.0, o_max = -1.0;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t k = 0; k < 6; ++k) {
      if (i == k) continue;
      t_min = std::min(t_min, trends[i][k].get<double>());
      o_min = std::min(o_min, originals[i][k].get<double>());
      o_max = std::max(o_max, originals[i][k].get<double>());
    }
  note(o, t_min > 0.99, fmt("trend r min %.4f (> 0.99)", t_min));
  note(o, o_min >= 0.8 && o_max <= 1.0, fmt("original r in [%.4f, %.4f] (within [0.8, 1.0])", o_min, o_max));
  fs::remove_all(root);
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"DFA calibration", dfa_calibration},
      {"spectral calibration", spectral_calibration},
      {"cross-method consistency", cross_method},
      {"SSA correctness", ssa_correctness},
      {"distribution ranking", distribution_ranking},
      {"KL properties", kl_properties},
      {"surrogate contrast", surrogate_contrast},
      {"exact invariants", exact_invariants},
      {"pipeline pattern", pipeline_pattern},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failures;
    std::printf("%s %d %s: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", index, name, out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures;
}
