// tsscale command line: one subcommand per analysis stage plus the full
// pipeline. Exit codes: 0 ok, 2 config/usage, 3 ingestion, 4 numerical,
// 5 internal.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tsscale/config.hpp"
#include "tsscale/error.hpp"
#include "tsscale/io.hpp"
#include "tsscale/pipeline.hpp"
#include "tsscale/synth.hpp"

namespace fs = std::filesystem;
using namespace tsscale;

namespace {

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string output;
  std::string input;
};

void add_common(CLI::App* app, Common& c, const std::string& output_help, const std::string& output_default) {
  app->add_option("--config", c.config, "INI configuration file supplying defaults")->check(CLI::ExistingFile);
  c.seed_opt = app->add_option("--seed", c.seed, "random seed");
  c.output = output_default;
  app->add_option("--output,-o", c.output, output_help)->capture_default_str();
}

PipelineConfig base_config(const Common& c) {
  PipelineConfig cfg;
  if (!c.config.empty()) cfg = load_config(c.config);
  if (c.seed_opt && c.seed_opt->count()) cfg.surrogate.seed = c.seed;
  return cfg;
}

template <class T, class U>
void overlay(const CLI::Option* opt, const T& value, U& target) {
  if (opt->count()) target = value;
}

fs::path output_dir(const Common& c) {
  fs::path dir = c.output;
  fs::create_directories(dir);
  return dir;
}

void print(const Json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scaling analysis of nonstationary time series"};
  app.set_version_flag("--version", std::string(TSSCALE_VERSION));
  app.require_subcommand(1);

  // gen
  Common gen_c;
  GeneratorSpec spec;
  std::string kind = "white";
  double t0 = 0.0;
  auto* gen = app.add_subcommand("gen", "write a synthetic series as standard CSV");
  add_common(gen, gen_c, "output CSV ('-' for stdout)", "-");
  gen->add_option("--kind", kind, "white|powerlaw|integrated-white|cascade|tone|ramp")->capture_default_str();
  gen->add_option("--n", spec.n, "length")->capture_default_str();
  gen->add_option("--dt", spec.dt, "sampling interval in minutes")->capture_default_str();
  gen->add_option("--t0", t0, "first timestamp, epoch seconds")->capture_default_str();
  gen->add_option("--beta", spec.beta, "powerlaw exponent")->capture_default_str();
  double beta_high = 0.0, f_break = 0.0;
  auto* bh = gen->add_option("--beta-high", beta_high, "powerlaw exponent above --f-break");
  auto* fb = gen->add_option("--f-break", f_break, "break frequency, 1/min");
  gen->add_option("--period", spec.period, "tone period, minutes")->capture_default_str();
  gen->add_option("--amplitude", spec.amplitude, "tone amplitude")->capture_default_str();
  gen->add_option("--slope", spec.slope, "ramp slope per sample")->capture_default_str();
  gen->add_option("--depth", spec.depth, "cascade depth (0: smallest covering n)")->capture_default_str();
  gen->add_option("--sigma", spec.cascade_sigma, "cascade log-multiplier std")->capture_default_str();

  // ingest
  Common ing_c;
  InputSpec ing_in;
  double ing_dt = 1.0, ing_resample = 0.0;
  std::string ing_policy = "fail", ing_delim = ",";
  auto* ingest = app.add_subcommand("ingest", "read a raw CSV into a gap-free standard series");
  add_common(ingest, ing_c, "output CSV ('-' for stdout)", "-");
  ingest->add_option("--input,-i", ing_c.input, "raw CSV")->required()->check(CLI::ExistingFile);
  ingest->add_option("--label", ing_in.label, "series label");
  auto* ing_vc = ingest->add_option("--value-column", ing_in.value_column, "value column")->capture_default_str();
  auto* ing_tc = ingest->add_option("--time-column", ing_in.time_column, "time column")->capture_default_str();
  auto* ing_dt_o = ingest->add_option("--dt", ing_dt, "expected sampling interval, minutes");
  auto* ing_gp = ingest->add_option("--gap-policy", ing_policy, "fail|drop-to-longest-contiguous");
  auto* ing_dl = ingest->add_option("--delimiter", ing_delim, "field delimiter");
  auto* ing_rs = ingest->add_option("--resample", ing_resample, "mean over windows of this many minutes");

  // psd
  Common psd_c;
  auto* psd = app.add_subcommand("psd", "LPSD spectrum and power-law exponent (psd.csv, psd.json)");
  add_common(psd, psd_c, "output directory", ".");
  psd->add_option("--input,-i", psd_c.input, "standard series CSV")->required()->check(CLI::ExistingFile);
  std::size_t n_freqs = 0;
  double f_min = 0, f_max = 0, f_lo = 0, f_hi = 0;
  std::string taper;
  auto* psd_nf = psd->add_option("--n-freqs", n_freqs, "number of log-spaced frequencies");
  auto* psd_fmin = psd->add_option("--f-min", f_min, "lowest frequency, 1/min");
  auto* psd_fmax = psd->add_option("--f-max", f_max, "highest frequency, 1/min");
  auto* psd_taper = psd->add_option("--taper", taper, "hann|rectangular");
  auto* psd_flo = psd->add_option("--f-lo", f_lo, "fit band lower edge, 1/min");
  auto* psd_fhi = psd->add_option("--f-hi", f_hi, "fit band upper edge, 1/min");

  // distfit
  Common dist_c;
  auto* distfit = app.add_subcommand("distfit", "Weibull/Gamma/GEV fits ranked by KL divergence (distfit.json)");
  add_common(distfit, dist_c, "output directory", ".");
  distfit->add_option("--input,-i", dist_c.input, "standard series CSV")->required()->check(CLI::ExistingFile);
  std::size_t bins = 0;
  double zero_shift = 0.0;
  auto* dist_bins = distfit->add_option("--bins", bins, "histogram bins (default Freedman-Diaconis)");
  auto* dist_zs = distfit->add_option("--zero-shift", zero_shift, "replacement for zero samples");

  // ssa
  Common ssa_c;
  auto* ssa = app.add_subcommand("ssa", "SSA trend split (eigvals.csv, trend.csv, residual.csv)");
  add_common(ssa, ssa_c, "output directory", ".");
  ssa->add_option("--input,-i", ssa_c.input, "standard series CSV")->required()->check(CLI::ExistingFile);
  std::size_t ssa_window = 0;
  double ssa_exp = 2.5;
  std::string ssa_trend;
  bool uncentered = false;
  auto* ssa_w = ssa->add_option("--window", ssa_window, "embedding window M (default round((ln N)^c))");
  auto* ssa_e = ssa->add_option("--exponent", ssa_exp, "window-rule exponent c");
  auto* ssa_t = ssa->add_option("--trend", ssa_trend, "1-based trend components, e.g. 1 or 1,2");
  auto* ssa_u = ssa->add_flag("--uncentered", uncentered, "skip mean removal before the lagged correlations");

  // magsign
  Common ms_c;
  auto* magsign = app.add_subcommand("magsign", "magnitude and sign of the increments (mag.csv, sign.csv)");
  add_common(magsign, ms_c, "output directory", ".");
  magsign->add_option("--input,-i", ms_c.input, "standard series CSV")->required()->check(CLI::ExistingFile);

  // dfa
  Common dfa_c;
  auto* dfa_cmd = app.add_subcommand("dfa", "detrended fluctuation analysis");
  add_common(dfa_cmd, dfa_c, "output directory", ".");
  dfa_cmd->add_option("--input,-i", dfa_c.input, "standard series CSV")->required()->check(CLI::ExistingFile);
  int order = 1;
  double t_min = 10.0;
  std::size_t ppd = 20;
  std::string low, high, window;
  bool use_increments = false;
  auto* dfa_o = dfa_cmd->add_option("--order", order, "detrending polynomial degree (1-3)");
  auto* dfa_tm = dfa_cmd->add_option("--t-min", t_min, "smallest box, minutes");
  auto* dfa_ppd = dfa_cmd->add_option("--points-per-decade", ppd, "box grid density");
  auto* dfa_low = dfa_cmd->add_option("--low", low, "low window 'lo,hi' in minutes (with --increments)");
  auto* dfa_high = dfa_cmd->add_option("--high", high, "high window 'lo,hi' in minutes (with --increments)");
  dfa_cmd->add_option("--window", window, "fit window 'lo,hi' in minutes (default t_min to N dt/10)");
  dfa_cmd->add_flag("--increments", use_increments,
                    "analyse magnitude and sign of the increments (fluct_mag.csv, fluct_sign.csv, dfa.json) "
                    "instead of the series itself (fluct.csv, dfa.json)");

  // surrogate
  Common sur_c;
  auto* surrogate = app.add_subcommand("surrogate", "surrogate ensemble test on the increments");
  add_common(surrogate, sur_c, "output directory", ".");
  surrogate->add_option("--input,-i", sur_c.input, "standard series CSV")->required()->check(CLI::ExistingFile);
  std::size_t count = 0, max_it = 0, emit = 0;
  double tol = 0.0;
  std::string sur_window;
  int sur_order = 1;
  double sur_tmin = 10.0;
  std::size_t sur_ppd = 20;
  auto* sur_n = surrogate->add_option("--count", count, "ensemble size");
  auto* sur_mi = surrogate->add_option("--max-iterations", max_it, "amplitude-adjustment iteration cap");
  auto* sur_tol = surrogate->add_option("--tolerance", tol, "band-averaged spectrum error target");
  auto* sur_w = surrogate->add_option("--window", sur_window, "DFA fit window 'lo,hi' in minutes");
  auto* sur_o = surrogate->add_option("--order", sur_order, "DFA order");
  auto* sur_tm = surrogate->add_option("--t-min", sur_tmin, "smallest DFA box, minutes");
  auto* sur_ppd_o = surrogate->add_option("--points-per-decade", sur_ppd, "DFA grid density");
  auto* sur_emit = surrogate->add_option("--emit", emit, "also write surrogate number K of the increments");

  // pipeline
  Common pipe_c;
  auto* pipeline = app.add_subcommand("pipeline", "run every stage for every configured input");
  pipeline->add_option("--config", pipe_c.config, "INI configuration file")->required();
  pipe_c.seed_opt = pipeline->add_option("--seed", pipe_c.seed, "surrogate seed (overrides the config)");
  auto* pipe_out = pipeline->add_option("--output,-o", pipe_c.output, "output directory (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code(ErrorKind::config);
  }

  try {
    if (gen->parsed()) {
      spec.kind = parse_signal_kind(kind);
      overlay(gen_c.seed_opt, gen_c.seed, spec.seed);
      if (bh->count()) spec.beta_high = beta_high;
      if (fb->count()) spec.f_break = f_break;
      TimeSeries ts = generate(spec);
      ts.t0 = t0;
      write_series_csv(gen_c.output, ts);
    } else if (ingest->parsed()) {
      PipelineConfig cfg = base_config(ing_c);
      InputSpec in = ing_in;
      if (!ing_vc->count() && !cfg.inputs.empty()) in.value_column = cfg.inputs.front().value_column;
      if (!ing_tc->count() && !cfg.inputs.empty()) in.time_column = cfg.inputs.front().time_column;
      in.path = ing_c.input;
      if (in.label.empty()) in.label = fs::path(ing_c.input).stem().string();
      overlay(ing_dt_o, ing_dt, cfg.expected_dt);
      if (ing_gp->count()) cfg.gap_policy = parse_gap_policy(ing_policy);
      if (ing_dl->count()) {
        if (ing_delim.size() != 1) fail(ErrorKind::config, "--delimiter must be one character");
        cfg.delimiter = ing_delim[0];
      }
      if (ing_rs->count()) cfg.resample_window = ing_resample;
      validate(cfg, false);
      IngestReport report;
      const TimeSeries ts = ingest_stage(in, cfg, &report);
      write_series_csv(ing_c.output, ts);
      std::cerr << to_json(report).dump() << '\n';
    } else if (psd->parsed()) {
      PipelineConfig cfg = base_config(psd_c);
      overlay(psd_nf, n_freqs, cfg.lpsd.n_freqs);
      if (psd_fmin->count()) cfg.lpsd.f_min = f_min;
      if (psd_fmax->count()) cfg.lpsd.f_max = f_max;
      if (psd_taper->count()) cfg.lpsd.taper = parse_taper(taper);
      overlay(psd_flo, f_lo, cfg.f_lo);
      overlay(psd_fhi, f_hi, cfg.f_hi);
      validate(cfg, false);
      print(psd_stage(read_series_csv(psd_c.input), cfg, output_dir(psd_c)));
    } else if (distfit->parsed()) {
      PipelineConfig cfg = base_config(dist_c);
      if (dist_bins->count()) cfg.bins = bins;
      overlay(dist_zs, zero_shift, cfg.distfit.zero_shift);
      validate(cfg, false);
      const Json doc = distfit_stage(read_series_csv(dist_c.input), cfg, output_dir(dist_c));
      print(Json{{"best", doc["best"]}, {"kl_units", "nats"}});
    } else if (ssa->parsed()) {
      PipelineConfig cfg = base_config(ssa_c);
      overlay(ssa_w, ssa_window, cfg.ssa.window);
      overlay(ssa_e, ssa_exp, cfg.ssa.exponent);
      if (ssa_t->count()) cfg.trend = parse_index_list(ssa_trend);
      if (ssa_u->count()) cfg.ssa.center = !uncentered;
      validate(cfg, false);
      print(ssa_stage(read_series_csv(ssa_c.input), cfg, output_dir(ssa_c)));
    } else if (magsign->parsed()) {
      base_config(ms_c);
      print(magsign_stage(read_series_csv(ms_c.input), output_dir(ms_c)));
    } else if (dfa_cmd->parsed()) {
      PipelineConfig cfg = base_config(dfa_c);
      overlay(dfa_o, order, cfg.dfa.order);
      overlay(dfa_tm, t_min, cfg.dfa.t_min);
      overlay(dfa_ppd, ppd, cfg.dfa.points_per_decade);
      if (dfa_low->count()) cfg.low = parse_window(low);
      if (dfa_high->count()) cfg.high = parse_window(high);
      validate(cfg, false);
      const TimeSeries ts = read_series_csv(dfa_c.input);
      const fs::path dir = output_dir(dfa_c);
      if (use_increments) {
        print(dfa_stage(ts, cfg, dir));
      } else {
        const auto grid = default_box_grid(ts.size(), ts.dt, cfg.dfa.t_min, cfg.dfa.points_per_decade, cfg.dfa.order);
        const FluctuationFunction f = dfa(ts.values, cfg.dfa.order, grid, ts.dt);
        const TimeWindow w = window.empty() ? TimeWindow{cfg.dfa.t_min, static_cast<double>(ts.size()) * ts.dt / 10.0}
                                            : parse_window(window);
        write_fluctuation_csv(dir / "fluct.csv", f);
        const Json doc{{"label", ts.label},
                       {"order", cfg.dfa.order},
                       {"box_count", grid.size()},
                       {"exponent", to_json(scaling_exponent(f, w))}};
        write_json(dir / "dfa.json", doc);
        print(doc);
      }
    } else if (surrogate->parsed()) {
      PipelineConfig cfg = base_config(sur_c);
      overlay(sur_n, count, cfg.surrogate.count);
      overlay(sur_mi, max_it, cfg.surrogate.max_iterations);
      overlay(sur_tol, tol, cfg.surrogate.spectrum_tolerance);
      if (sur_w->count()) cfg.surrogate_window = parse_window(sur_window);
      overlay(sur_o, sur_order, cfg.dfa.order);
      overlay(sur_tm, sur_tmin, cfg.dfa.t_min);
      overlay(sur_ppd_o, sur_ppd, cfg.dfa.points_per_decade);
      validate(cfg, false);
      const TimeSeries ts = read_series_csv(sur_c.input);
      const fs::path dir = output_dir(sur_c);
      print(surrogate_stage(ts, cfg, dir));
      if (sur_emit->count()) {
        const IncrementSeries inc = increments(ts);
        TimeSeries s;
        s.values = make_surrogate(inc.values, cfg.surrogate.seed + emit, cfg.surrogate).values;
        s.dt = ts.dt;
        s.t0 = ts.t0 + ts.dt * 60.0;
        write_series_csv(dir / ("surrogate_" + std::to_string(emit) + ".csv"), s);
      }
    } else if (pipeline->parsed()) {
      PipelineConfig cfg = load_config(pipe_c.config);
      if (pipe_c.seed_opt->count()) cfg.surrogate.seed = pipe_c.seed;
      if (pipe_out->count()) cfg.output_dir = pipe_c.output;
      const Json report = run_pipeline(cfg);
      std::cout << (cfg.output_dir / "report.json").string() << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "tsscale: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "tsscale: internal error: " << e.what() << '\n';
    return exit_code(ErrorKind::internal);
  }
  return 0;
}
