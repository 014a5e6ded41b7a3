#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tsscale/dfa.hpp"
#include "tsscale/distfit.hpp"
#include "tsscale/io.hpp"
#include "tsscale/spectral.hpp"
#include "tsscale/ssa.hpp"
#include "tsscale/surrogate.hpp"

namespace tsscale {

struct InputSpec {
  std::string label;
  std::filesystem::path path;
  std::string value_column = "value";
  std::string time_column = "time";
  std::string unit;
};

struct PipelineConfig {
  std::vector<InputSpec> inputs;
  std::filesystem::path output_dir = "tsscale-out";
  std::optional<double> resample_window;  // minutes

  double expected_dt = 1.0;  // minutes, of the raw input
  GapPolicy gap_policy = GapPolicy::fail;
  char delimiter = ',';

  FitOptions distfit;
  std::optional<std::size_t> bins;

  LpsdConfig lpsd;
  double f_lo = 1e-4;  // fit band, min^-1
  double f_hi = 1e-2;

  SsaConfig ssa;
  std::vector<std::size_t> trend{1};

  DfaSettings dfa;
  TimeWindow low{10.0, 70.0};
  TimeWindow high{300.0, 9070.0};

  SurrogateConfig surrogate;
  TimeWindow surrogate_window{300.0, 9070.0};
};

/// Reads an INI-style file. Sections: [pipeline], [ingest], [distfit],
/// [spectral], [ssa], [dfa], [surrogate], and one [input:<label>] per series.
/// Unknown sections and keys are rejected. Paths are relative to the file.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

/// Checks the cross-field invariants; throws a config error on the first
/// violation.
void validate(const PipelineConfig& config, bool require_inputs = true);

Json to_json(const PipelineConfig& config);

/// "1,2,3" -> {1,2,3}.
std::vector<std::size_t> parse_index_list(const std::string& text);
/// "300,9070" -> {300, 9070}.
TimeWindow parse_window(const std::string& text);
GapPolicy parse_gap_policy(const std::string& text);
const char* to_string(GapPolicy policy) noexcept;

}  // namespace tsscale
