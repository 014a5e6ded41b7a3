#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tsscale/series.hpp"

namespace tsscale {

enum class SignalKind { white, powerlaw, integrated_white, cascade, tone, ramp };

const char* to_string(SignalKind kind) noexcept;
SignalKind parse_signal_kind(const std::string& name);

/// Synthetic signal with known ground truth. Only the fields of the chosen
/// kind are read.
struct GeneratorSpec {
  SignalKind kind = SignalKind::white;
  std::size_t n = 1024;
  std::uint64_t seed = 0;
  double dt = 1.0;  // minutes

  // powerlaw: S(f) ~ f^-beta. With `beta_high` and `f_break` set, the
  // exponent switches to beta_high above f_break (min^-1), continuously.
  double beta = 1.0;
  std::optional<double> beta_high;
  std::optional<double> f_break;

  // tone
  double period = 64.0;  // minutes
  double amplitude = 1.0;

  // ramp
  double slope = 1.0;

  // cascade: binary multiplicative cascade of `depth` levels with
  // log-normal multipliers of log-standard-deviation `cascade_sigma`.
  std::size_t depth = 0;  // 0 = smallest depth with 2^depth >= n
  double cascade_sigma = 0.2;
};

TimeSeries generate(const GeneratorSpec& spec);

}  // namespace tsscale
