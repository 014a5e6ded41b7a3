#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsscale/distributions.hpp"
#include "tsscale/series.hpp"

namespace tsscale {

struct FitOptions {
  /// Zero samples are replaced by this value for Weibull/Gamma support.
  double zero_shift = 1e-6;
  std::size_t max_iterations = 500;
  double gradient_tolerance = 1e-8;
};

/// Maximum-likelihood fit of one family. `loglik` is the total (not mean)
/// log-likelihood at the optimum.
struct DistFit {
  Family family = Family::gev;
  DistParams params;
  double loglik = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t shifted_zeros = 0;

  // Filled by kl_divergence / rank_distributions.
  std::optional<double> kl;
  bool kl_clamped = false;
  std::optional<std::size_t> kl_infinite_bin;
};

DistFit fit_distribution(const TimeSeries& ts, Family family, const FitOptions& options = {});
DistFit fit_distribution(std::span<const double> data, Family family, const FitOptions& options = {});

/// Histogram of the data, per-bin probabilities summing to one.
struct EmpiricalDensity {
  std::vector<double> bin_edges;
  std::vector<double> probs;
  std::size_t n = 0;
};

/// Freedman-Diaconis bins over [min, max] unless `n_bins` is given.
EmpiricalDensity empirical_density(std::span<const double> data, std::optional<std::size_t> n_bins = {});

/// Discrete KL divergence in nats, sum_i p_i log(p_i / q_i) over bins with
/// p_i > 0, where q_i comes from CDF differences of the fitted law.
struct KlResult {
  double value = 0.0;
  std::size_t n_bins = 0;
  bool clamped = false;                    // a tiny negative was raised to zero
  std::optional<std::size_t> infinite_bin;  // first bin with p > 0 and q == 0
};

KlResult kl_divergence(std::span<const double> data, const DistParams& params,
                       std::optional<std::size_t> n_bins = {});
KlResult kl_divergence(const TimeSeries& data, const DistFit& fit, std::optional<std::size_t> n_bins = {});

struct FitFailure {
  Family family;
  std::string reason;
};

struct Ranking {
  std::vector<DistFit> fits;  // ascending KL
  std::vector<FitFailure> failures;
};

/// Ascending KL; ties go to the higher log-likelihood, then to the family
/// name in lexical order ("GEV" < "Gamma" < "Weibull").
bool ranks_before(const DistFit& a, const DistFit& b);

Ranking rank_distributions(const TimeSeries& ts, const FitOptions& options = {},
                           std::optional<std::size_t> n_bins = {});

}  // namespace tsscale
