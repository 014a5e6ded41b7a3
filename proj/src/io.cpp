#include "tsscale/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tsscale/error.hpp"

namespace tsscale {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::internal, "cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) fail(ErrorKind::internal, "write failed for " + path.string());
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_series_csv(const std::filesystem::path& path, const TimeSeries& ts) {
  std::ostringstream os;
  os << "time,value\n";
  for (std::size_t i = 0; i < ts.size(); ++i)
    os << format_double(ts.t0 + static_cast<double>(i) * ts.dt * 60.0) << ',' << format_double(ts.values[i]) << '\n';
  write_text(path, os.str());
}

TimeSeries read_series_csv(const std::filesystem::path& path, const std::string& label) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ingestion, "cannot open " + path.string());
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  if (first.empty() || second.empty()) fail(ErrorKind::ingestion, path.string() + ": need at least two rows");
  auto time_of = [&](const std::string& row) { return parse_timestamp(row.substr(0, row.find(','))); };
  const double dt = (time_of(second) - time_of(first)) / 60.0;
  if (!(dt > 0.0)) fail(ErrorKind::ingestion, path.string() + ": timestamps are not increasing");

  CsvOptions options;
  options.expected_dt = dt;
  options.label = label.empty() ? path.stem().string() : label;
  TimeSeries ts = load_csv(path, options);
  ts.dt = dt;
  return ts;
}

void write_psd_csv(const std::filesystem::path& path, const PsdEstimate& psd) {
  std::ostringstream os;
  os << "frequency,power\n";
  for (std::size_t j = 0; j < psd.frequencies.size(); ++j)
    os << format_double(psd.frequencies[j]) << ',' << format_double(psd.power[j]) << '\n';
  write_text(path, os.str());
}

void write_eigvals_csv(const std::filesystem::path& path, const SsaDecomposition& dec) {
  std::ostringstream os;
  os << "k,variance_fraction\n";
  for (std::size_t k = 0; k < dec.variance_fractions.size(); ++k)
    os << k + 1 << ',' << format_double(dec.variance_fractions[k]) << '\n';
  write_text(path, os.str());
}

void write_fluctuation_csv(const std::filesystem::path& path, const FluctuationFunction& f) {
  std::ostringstream os;
  os << "n_minutes,F\n";
  for (std::size_t i = 0; i < f.box_sizes.size(); ++i)
    os << format_double(static_cast<double>(f.box_sizes[i]) * f.dt) << ',' << format_double(f.fluctuation[i])
       << '\n';
  write_text(path, os.str());
}

void write_surrogate_csv(const std::filesystem::path& path, const SurrogateReport& r) {
  std::ostringstream os;
  os << "row,alpha_mag,alpha_mag_err,alpha_sign,alpha_sign_err\n";
  os << "original," << format_double(r.alpha_mag_orig) << ',' << format_double(r.alpha_mag_stderr_orig) << ','
     << format_double(r.alpha_sign_orig) << ',' << format_double(r.alpha_sign_stderr_orig) << '\n';
  os << "surrogates," << format_double(r.alpha_mag_mean) << ',' << format_double(r.alpha_mag_std) << ','
     << format_double(r.alpha_sign_mean) << ',' << format_double(r.alpha_sign_std) << '\n';
  write_text(path, os.str());
}

void write_json(const std::filesystem::path& path, const Json& doc) { write_text(path, doc.dump(2) + "\n"); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  auto out = open_out(path);
  out << text;
  finish(out, path);
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const SpectralFit& fit) {
  return Json{{"beta", fit.beta},     {"intercept", fit.intercept}, {"f_lo", fit.f_lo},
              {"f_hi", fit.f_hi},     {"stderr_beta", fit.stderr_beta}, {"r2", fit.r2},
              {"n_points", fit.n_points}};
}

Json to_json(const DistFit& fit) {
  Json params = std::visit(
      [](const auto& p) -> Json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, WeibullParams>) return Json{{"shape", p.shape}, {"scale", p.scale}};
        else if constexpr (std::is_same_v<P, GammaParams>) return Json{{"shape", p.shape}, {"rate", p.rate}};
        else return Json{{"location", p.location}, {"scale", p.scale}, {"shape", p.shape}};
      },
      fit.params);
  Json j{{"family", to_string(fit.family)},
         {"params", params},
         {"loglik", fit.loglik},
         {"converged", fit.converged},
         {"iterations", fit.iterations},
         {"shifted_zeros", fit.shifted_zeros}};
  j["kl"] = fit.kl ? number(*fit.kl) : Json(nullptr);
  j["kl_infinite"] = fit.kl && std::isinf(*fit.kl);
  if (fit.kl_infinite_bin) j["kl_infinite_bin"] = *fit.kl_infinite_bin;
  j["kl_clamped"] = fit.kl_clamped;
  return j;
}

Json to_json(const Ranking& ranking) {
  Json fits = Json::array();
  for (const auto& f : ranking.fits) fits.push_back(to_json(f));
  Json failures = Json::array();
  for (const auto& f : ranking.failures) failures.push_back(Json{{"family", to_string(f.family)}, {"reason", f.reason}});
  Json j{{"kl_units", "nats"}, {"ranking", fits}, {"failures", failures}};
  j["best"] = ranking.fits.empty() ? Json(nullptr) : Json(to_string(ranking.fits.front().family));
  return j;
}

Json to_json(const ScalingExponent& e) {
  return Json{{"alpha", e.alpha},   {"stderr", e.stderr_alpha}, {"intercept", e.intercept},
              {"t_lo", e.n_lo},     {"t_hi", e.n_hi},           {"n_points", e.n_points},
              {"label", correlation_label(e)}};
}

Json to_json(const SurrogateReport& r) {
  return Json{{"window", {r.window.lo, r.window.hi}},
              {"dfa_order", r.dfa.order},
              {"count", r.config.count},
              {"seed", r.config.seed},
              {"seed_scheme", "seed + surrogate index"},
              {"max_iterations", r.config.max_iterations},
              {"spectrum_tolerance", r.config.spectrum_tolerance},
              {"alpha_mag_orig", r.alpha_mag_orig},
              {"alpha_mag_stderr_orig", r.alpha_mag_stderr_orig},
              {"alpha_sign_orig", r.alpha_sign_orig},
              {"alpha_sign_stderr_orig", r.alpha_sign_stderr_orig},
              {"alpha_mag_mean", r.alpha_mag_mean},
              {"alpha_mag_std", r.alpha_mag_std},
              {"alpha_sign_mean", r.alpha_sign_mean},
              {"alpha_sign_std", r.alpha_sign_std},
              {"degenerate_ensemble", r.degenerate_ensemble},
              {"converged_count", r.converged_count},
              {"alpha_mag", r.alpha_mag},
              {"alpha_sign", r.alpha_sign},
              {"spectrum_errors", r.spectrum_errors}};
}

Json to_json(const CorrelationMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.r.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.r.cols(); ++k) row.push_back(m.r(i, k));
    rows.push_back(row);
  }
  return Json{{"labels", m.labels}, {"r", rows}};
}

Json to_json(const IngestReport& r) {
  return Json{{"rows_read", r.rows_read}, {"gaps", r.gaps}, {"kept_first_row", r.kept_first_row}, {"dropped", r.dropped}};
}

Json to_json(const LpsdConfig& c) {
  return Json{{"n_freqs", c.n_freqs},
              {"f_min", c.f_min ? Json(*c.f_min) : Json("auto")},
              {"f_max", c.f_max ? Json(*c.f_max) : Json("auto")},
              {"taper", to_string(c.taper)},
              {"overlap", c.overlap},
              {"desired_averages", c.desired_averages},
              {"min_segment", c.min_segment},
              {"min_bin", c.min_bin}};
}

}  // namespace tsscale
