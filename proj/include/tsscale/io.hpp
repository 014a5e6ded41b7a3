#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "tsscale/dfa.hpp"
#include "tsscale/distfit.hpp"
#include "tsscale/series.hpp"
#include "tsscale/spectral.hpp"
#include "tsscale/ssa.hpp"
#include "tsscale/surrogate.hpp"

namespace tsscale {

using Json = nlohmann::ordered_json;

/// %.17g, enough to round-trip any double.
std::string format_double(double v);

/// Standard series CSV: header `time,value`, time in epoch seconds.
void write_series_csv(const std::filesystem::path& path, const TimeSeries& ts);
/// Reads a standard series CSV. dt is taken from the first two timestamps;
/// any irregularity after that is an ingestion error.
TimeSeries read_series_csv(const std::filesystem::path& path, const std::string& label = {});

void write_psd_csv(const std::filesystem::path& path, const PsdEstimate& psd);
void write_eigvals_csv(const std::filesystem::path& path, const SsaDecomposition& dec);
void write_fluctuation_csv(const std::filesystem::path& path, const FluctuationFunction& f);
/// Two rows, original and surrogate ensemble, for error-bar plots.
void write_surrogate_csv(const std::filesystem::path& path, const SurrogateReport& report);
void write_json(const std::filesystem::path& path, const Json& doc);

/// Writes `text` to `path` or to stdout when path is "-".
void write_text(const std::filesystem::path& path, const std::string& text);

/// JSON number, or null for non-finite values.
Json number(double v);

Json to_json(const SpectralFit& fit);
Json to_json(const DistFit& fit);
Json to_json(const Ranking& ranking);
Json to_json(const ScalingExponent& e);
Json to_json(const SurrogateReport& report);
Json to_json(const CorrelationMatrix& m);
Json to_json(const IngestReport& r);
Json to_json(const LpsdConfig& c);

}  // namespace tsscale
