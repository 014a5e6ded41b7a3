#include "tsscale/pipeline.hpp"

#include <algorithm>
#include <sstream>

#include "tsscale/error.hpp"

#ifndef TSSCALE_VERSION
#define TSSCALE_VERSION "unknown"
#endif

namespace tsscale {

namespace fs = std::filesystem;

namespace {

TimeSeries as_series(std::vector<double> values, const TimeSeries& like, double t0, const std::string& label) {
  TimeSeries ts;
  ts.values = std::move(values);
  ts.dt = like.dt;
  ts.t0 = t0;
  ts.label = label;
  ts.unit = like.unit;
  return ts;
}

}  // namespace

TimeSeries ingest_stage(const InputSpec& input, const PipelineConfig& config, IngestReport* report) {
  CsvOptions options;
  options.value_column = input.value_column;
  options.time_column = input.time_column;
  options.expected_dt = config.expected_dt;
  options.gap_policy = config.gap_policy;
  options.delimiter = config.delimiter;
  options.label = input.label;
  options.unit = input.unit;
  TimeSeries ts = load_csv(input.path, options, report);
  if (config.resample_window) ts = resample_mean(ts, *config.resample_window);
  return ts;
}

Json distfit_stage(const TimeSeries& ts, const PipelineConfig& config, const fs::path& dir) {
  const Ranking ranking = rank_distributions(ts, config.distfit, config.bins);
  Json doc = to_json(ranking);
  doc["label"] = ts.label;
  doc["n"] = ts.size();
  doc["bins"] = config.bins ? Json(*config.bins) : Json("auto");
  write_json(dir / "distfit.json", doc);
  return doc;
}

Json psd_stage(const TimeSeries& ts, const PipelineConfig& config, const fs::path& dir) {
  const PsdEstimate psd = lpsd(ts, config.lpsd);
  const SpectralFit fit = fit_spectral_exponent(psd, config.f_lo, config.f_hi);
  write_psd_csv(dir / "psd.csv", psd);
  const auto snapped = std::count(psd.snapped.begin(), psd.snapped.end(), std::uint8_t{1});
  Json doc{{"label", ts.label},
           {"config", to_json(config.lpsd)},
           {"n_freqs", psd.n_freqs},
           {"window_kind", to_string(psd.window_kind)},
           {"snapped_frequencies", snapped},
           {"integrated_power", integrated_power(psd)},
           {"fit", to_json(fit)},
           {"segments_per_freq", psd.segments_per_freq},
           {"segment_lengths", psd.segment_lengths}};
  write_json(dir / "psd.json", doc);
  return Json{{"fit", to_json(fit)}, {"integrated_power", integrated_power(psd)}, {"snapped_frequencies", snapped}};
}

Json ssa_stage(const TimeSeries& ts, const PipelineConfig& config, const fs::path& dir, TrendSplit* split_out) {
  SsaConfig ssa = config.ssa;
  // Only the trend components are needed as RCs; eigenvalues cover all M.
  if (!ssa.materialize) ssa.materialize = *std::max_element(config.trend.begin(), config.trend.end());
  const SsaDecomposition dec = decompose(ts, ssa);
  TrendSplit split = split_trend(dec, config.trend, ts);
  write_eigvals_csv(dir / "eigvals.csv", dec);
  write_series_csv(dir / "trend.csv", split.trend);
  write_series_csv(dir / "residual.csv", split.residual);

  const std::size_t head = std::min<std::size_t>(10, dec.variance_fractions.size());
  Json doc{{"window", dec.window},
           {"mean", dec.mean},
           {"variance_fractions_head",
            std::vector<double>(dec.variance_fractions.begin(), dec.variance_fractions.begin() + head)},
           {"trend_components", split.selected},
           {"clamped_eigenvalues", dec.clamped_eigenvalues},
           {"most_negative_eigenvalue", dec.most_negative_eigenvalue},
           {"trend_variance", variance(split.trend.values)},
           {"residual_variance", variance(split.residual.values)}};
  if (split_out) *split_out = std::move(split);
  return doc;
}

Json magsign_stage(const TimeSeries& ts, const fs::path& dir) {
  const MagSignPair ms = mag_sign(increments(ts));
  const double t0 = ts.t0 + ts.dt * 60.0;
  write_series_csv(dir / "mag.csv", as_series(ms.magnitude, ts, t0, ts.label + "-mag"));
  write_series_csv(dir / "sign.csv", as_series(ms.sign_as_double(), ts, t0, ts.label + "-sign"));
  const auto zeros = std::count(ms.sign.begin(), ms.sign.end(), std::int8_t{0});
  return Json{{"n", ms.magnitude.size()}, {"zero_increments", zeros}};
}

Json dfa_stage(const TimeSeries& ts, const PipelineConfig& config, const fs::path& dir) {
  const MagSignPair ms = mag_sign(increments(ts));
  const auto sign = ms.sign_as_double();
  const auto grid =
      default_box_grid(ms.magnitude.size(), ts.dt, config.dfa.t_min, config.dfa.points_per_decade, config.dfa.order);
  const FluctuationFunction f_mag = dfa(ms.magnitude, config.dfa.order, grid, ts.dt);
  const FluctuationFunction f_sign = dfa(sign, config.dfa.order, grid, ts.dt);
  write_fluctuation_csv(dir / "fluct_mag.csv", f_mag);
  write_fluctuation_csv(dir / "fluct_sign.csv", f_sign);

  auto windows = [&](const FluctuationFunction& f) {
    return Json{{"low", to_json(scaling_exponent(f, config.low))}, {"high", to_json(scaling_exponent(f, config.high))}};
  };
  Json doc{{"label", ts.label},
           {"order", config.dfa.order},
           {"t_min", config.dfa.t_min},
           {"points_per_decade", config.dfa.points_per_decade},
           {"box_count", grid.size()},
           {"magnitude", windows(f_mag)},
           {"sign", windows(f_sign)}};
  write_json(dir / "dfa.json", doc);
  return doc;
}

Json surrogate_stage(const TimeSeries& ts, const PipelineConfig& config, const fs::path& dir) {
  const SurrogateReport report = ensemble_test(increments(ts), config.surrogate, config.surrogate_window, config.dfa);
  Json doc = to_json(report);
  doc["label"] = ts.label;
  write_json(dir / "surrogate.json", doc);
  write_surrogate_csv(dir / "surrogate.csv", report);
  for (const char* key : {"alpha_mag", "alpha_sign", "spectrum_errors"}) doc.erase(key);
  return doc;
}

Manifest::Manifest(fs::path path) : path_(std::move(path)) { flush("running"); }

void Manifest::stage_done(const std::string& label, const std::string& stage, const std::vector<std::string>& files) {
  std::string line = "done " + label + " " + stage;
  for (const auto& f : files) line += " " + f;
  lines_.push_back(std::move(line));
  flush("running");
}

void Manifest::complete() { flush("complete"); }

void Manifest::failed(const std::string& message) { flush("failed", message); }

void Manifest::flush(const std::string& state, const std::string& message) const {
  std::ostringstream os;
  os << "state " << state << '\n';
  for (const auto& l : lines_) os << l << '\n';
  if (!message.empty()) os << "error " << message << '\n';
  write_text(path_, os.str());
}

Json run_pipeline(const PipelineConfig& config) {
  validate(config);
  fs::create_directories(config.output_dir);
  Manifest manifest(config.output_dir / "MANIFEST");

  std::vector<TimeSeries> originals;
  std::vector<TimeSeries> trends;
  Json series = Json::array();

  std::string stage;
  std::string label;
  auto run = [&](const std::string& name, auto&& body) {
    stage = name;
    return body();
  };

  try {
    for (const auto& input : config.inputs) {
      label = input.label;
      const fs::path dir = config.output_dir / label;
      fs::create_directories(dir);
      const std::string prefix = label + "/";

      IngestReport ingest_report;
      TimeSeries ts = run("ingest", [&] { return ingest_stage(input, config, &ingest_report); });
      write_series_csv(dir / "series.csv", ts);
      manifest.stage_done(label, "ingest", {prefix + "series.csv"});

      Json entry{{"label", label},
                 {"unit", ts.unit},
                 {"n", ts.size()},
                 {"dt", ts.dt},
                 {"t0", ts.t0},
                 {"ingest", to_json(ingest_report)}};

      Json dist = run("distfit", [&] { return distfit_stage(ts, config, dir); });
      manifest.stage_done(label, "distfit", {prefix + "distfit.json"});
      entry["distfit"] = Json{{"best", dist["best"]}, {"kl_units", "nats"}, {"ranking", Json::array()}};
      for (const auto& f : dist["ranking"])
        entry["distfit"]["ranking"].push_back(
            Json{{"family", f["family"]}, {"kl", f["kl"]}, {"params", f["params"]}, {"converged", f["converged"]}});
      entry["distfit"]["failures"] = dist["failures"];

      entry["spectral"] = run("psd", [&] { return psd_stage(ts, config, dir); });
      manifest.stage_done(label, "psd", {prefix + "psd.csv", prefix + "psd.json"});

      TrendSplit split;
      entry["ssa"] = run("ssa", [&] { return ssa_stage(ts, config, dir, &split); });
      manifest.stage_done(label, "ssa", {prefix + "eigvals.csv", prefix + "trend.csv", prefix + "residual.csv"});

      entry["magsign"] = run("magsign", [&] { return magsign_stage(split.residual, dir); });
      manifest.stage_done(label, "magsign", {prefix + "mag.csv", prefix + "sign.csv"});

      Json d = run("dfa", [&] { return dfa_stage(split.residual, config, dir); });
      entry["dfa"] = Json{{"order", d["order"]}, {"magnitude", d["magnitude"]}, {"sign", d["sign"]}};
      manifest.stage_done(label, "dfa", {prefix + "fluct_mag.csv", prefix + "fluct_sign.csv", prefix + "dfa.json"});

      entry["surrogate"] = run("surrogate", [&] { return surrogate_stage(split.residual, config, dir); });
      manifest.stage_done(label, "surrogate", {prefix + "surrogate.json", prefix + "surrogate.csv"});

      entry["files"] = Json{{"series", prefix + "series.csv"},     {"distfit", prefix + "distfit.json"},
                            {"psd", prefix + "psd.csv"},           {"eigvals", prefix + "eigvals.csv"},
                            {"trend", prefix + "trend.csv"},       {"residual", prefix + "residual.csv"},
                            {"fluct_mag", prefix + "fluct_mag.csv"}, {"fluct_sign", prefix + "fluct_sign.csv"},
                            {"surrogate", prefix + "surrogate.json"}};
      series.push_back(std::move(entry));
      originals.push_back(std::move(ts));
      split.trend.label = label;
      trends.push_back(std::move(split.trend));
    }

    label = "*";
    auto correlations = [&](const std::vector<TimeSeries>& set) -> Json {
      const bool same_length = std::all_of(set.begin(), set.end(), [&](const TimeSeries& s) {
        return s.size() == set.front().size();
      });
      if (!same_length) return Json{{"skipped", "series lengths differ"}};
      return to_json(pearson_matrix(set));
    };
    Json pearson = run("pearson", [&] {
      return Json{{"originals", correlations(originals)}, {"trends", correlations(trends)}};
    });

    Json report{{"tool", "tsscale"},
                {"version", TSSCALE_VERSION},
                {"config", to_json(config)},
                {"series", series},
                {"pearson", pearson}};
    write_json(config.output_dir / "report.json", report);
    manifest.stage_done("*", "report", {"report.json"});
    manifest.complete();
    return report;
  } catch (const Error& e) {
    const std::string message = "stage '" + stage + "' series '" + label + "': " + e.what();
    manifest.failed(message);
    throw Error(e.kind(), message);
  } catch (const std::exception& e) {
    const std::string message = "stage '" + stage + "' series '" + label + "': " + e.what();
    manifest.failed(message);
    throw Error(ErrorKind::internal, message);
  }
}

}  // namespace tsscale
