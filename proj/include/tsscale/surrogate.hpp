#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tsscale/dfa.hpp"
#include "tsscale/series.hpp"

namespace tsscale {

struct SurrogateConfig {
  std::size_t count = 100;
  std::uint64_t seed = 0;
  std::size_t max_iterations = 200;
  double spectrum_tolerance = 1e-3;
};

/// One amplitude-adjusted Fourier-phase surrogate. `values` is always a
/// permutation of the input.
struct Surrogate {
  std::vector<double> values;
  std::size_t iterations = 0;
  double spectrum_error = 0.0;  // RMS relative error of band-averaged periodogram
  bool converged = false;
};

/// Iterative amplitude-adjusted Fourier transform: start from the original
/// amplitudes with random phases, then alternate between imposing the
/// original amplitude spectrum and rank-remapping onto the original values.
/// Stops on tolerance, on a fixed point of the rank ordering, or on the
/// iteration cap; the best rank-remapped iterate is returned.
Surrogate make_surrogate(std::span<const double> series, std::uint64_t seed, const SurrogateConfig& config = {});

struct DfaSettings {
  int order = 1;
  double t_min = 10.0;  // minutes, smallest box of the grid
  std::size_t points_per_decade = 20;
};

struct SurrogateReport {
  double alpha_mag_orig = 0.0;
  double alpha_sign_orig = 0.0;
  double alpha_mag_stderr_orig = 0.0;
  double alpha_sign_stderr_orig = 0.0;
  double alpha_mag_mean = 0.0;
  double alpha_mag_std = 0.0;
  double alpha_sign_mean = 0.0;
  double alpha_sign_std = 0.0;
  std::vector<double> alpha_mag;   // per surrogate, index order
  std::vector<double> alpha_sign;  // per surrogate, index order
  std::vector<double> spectrum_errors;
  std::size_t converged_count = 0;
  /// Set when count == 1 and the reported std is 0 by construction.
  bool degenerate_ensemble = false;
  TimeWindow window;
  DfaSettings dfa;
  SurrogateConfig config;
};

/// Surrogate ensemble of an increment series: for each surrogate (seed
/// config.seed + index) decompose into magnitude and sign, run DFA and fit
/// the exponent in `window`; compare with the same chain on the original.
SurrogateReport ensemble_test(const IncrementSeries& increments, const SurrogateConfig& config, TimeWindow window,
                              const DfaSettings& dfa = {});

}  // namespace tsscale
