#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tsscale/series.hpp"

namespace tsscale {

struct SsaConfig {
  /// Embedding window M; 0 selects round((ln N)^exponent) clamped to [2, N/5].
  std::size_t window = 0;
  double exponent = 2.5;
  /// Subtract the series mean before forming the lagged correlations.
  bool center = true;
  /// How many leading components get PCs and RCs materialized; empty = all M.
  std::optional<std::size_t> materialize;
};

/// Toeplitz-variant SSA. Components are ordered by descending eigenvalue.
/// The RCs decompose the (centered) series: mean + sum_k rcs[k] == input.
struct SsaDecomposition {
  std::size_t window = 0;
  double mean = 0.0;  // 0 when not centered
  std::vector<double> eigenvalues;
  Eigen::MatrixXd eigenvectors;  // column k is E_k
  std::vector<std::vector<double>> pcs;  // length N - M + 1
  std::vector<std::vector<double>> rcs;  // length N
  std::vector<double> variance_fractions;
  /// Number of eigenvalues that came out negative and were clamped to 0.
  std::size_t clamped_eigenvalues = 0;
  double most_negative_eigenvalue = 0.0;
};

struct TrendSplit {
  TimeSeries trend;
  TimeSeries residual;
  std::vector<std::size_t> selected;  // 1-based
};

std::size_t default_window(std::size_t n, double exponent = 2.5);

/// c_ij = 1/(N - |i-j|) sum_m x_m x_{m+|i-j|}.
Eigen::MatrixXd toeplitz_correlation(std::span<const double> x, std::size_t window, bool center = true);

SsaDecomposition decompose(const TimeSeries& ts, const SsaConfig& config = {});

/// a_i = sum_j x_{i+j} E_j, i = 0..N-M.
std::vector<double> principal_component(std::span<const double> x, std::span<const double> eigenvector);

/// Diagonal averaging of a_{t-j} E_j over the j that keep t-j in range.
std::vector<double> reconstruct_component(std::span<const double> pc, std::span<const double> eigenvector,
                                          std::size_t n);

/// trend = mean + sum of the selected RCs (1-based), residual = original - trend.
TrendSplit split_trend(const SsaDecomposition& dec, std::span<const std::size_t> selected,
                       const TimeSeries& original);

}  // namespace tsscale
