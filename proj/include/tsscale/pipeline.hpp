#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tsscale/config.hpp"
#include "tsscale/io.hpp"

namespace tsscale {

// Stage runners shared by the pipeline and the single-stage subcommands. Each
// writes its artifacts into `dir` under fixed names and returns a summary.

/// load_csv with the configured ingest options, then the optional resampling.
TimeSeries ingest_stage(const InputSpec& input, const PipelineConfig& config, IngestReport* report = nullptr);

/// distfit.json
Json distfit_stage(const TimeSeries& ts, const PipelineConfig& config, const std::filesystem::path& dir);

/// psd.csv, psd.json
Json psd_stage(const TimeSeries& ts, const PipelineConfig& config, const std::filesystem::path& dir);

/// eigvals.csv, trend.csv, residual.csv
Json ssa_stage(const TimeSeries& ts, const PipelineConfig& config, const std::filesystem::path& dir,
               TrendSplit* split = nullptr);

/// mag.csv, sign.csv: magnitude and sign of the increments as series.
Json magsign_stage(const TimeSeries& ts, const std::filesystem::path& dir);

/// fluct_mag.csv, fluct_sign.csv, dfa.json: DFA of the magnitude and sign of
/// the increments of `ts`, with exponents in the low and high windows.
Json dfa_stage(const TimeSeries& ts, const PipelineConfig& config, const std::filesystem::path& dir);

/// surrogate.json, surrogate.csv: surrogate ensemble of the increments of `ts`.
Json surrogate_stage(const TimeSeries& ts, const PipelineConfig& config, const std::filesystem::path& dir);

/// Completion log of a pipeline run, rewritten after every stage so that an
/// aborted run leaves an accurate record next to its partial outputs.
class Manifest {
 public:
  explicit Manifest(std::filesystem::path path);
  void stage_done(const std::string& label, const std::string& stage, const std::vector<std::string>& files);
  void complete();
  void failed(const std::string& message);

 private:
  void flush(const std::string& state, const std::string& message = {}) const;
  std::filesystem::path path_;
  std::vector<std::string> lines_;
};

/// Full chain for every input: ingest, resample, distribution ranking, LPSD
/// and beta, SSA trend split, increments of the residual, magnitude/sign,
/// DFA per window, surrogate ensemble; then Pearson matrices of the originals
/// and of the trends. Writes `<output_dir>/<label>/...`, report.json and
/// MANIFEST. Stage errors are rethrown with the stage name and series label.
Json run_pipeline(const PipelineConfig& config);

}  // namespace tsscale
