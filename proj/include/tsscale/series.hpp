#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tsscale {

/// Uniformly sampled scalar record. `dt` is in minutes, `t0` in UTC epoch
/// seconds. Gap handling happens at ingestion; a TimeSeries never has holes.
struct TimeSeries {
  std::vector<double> values;
  double dt = 1.0;
  double t0 = 0.0;
  std::string label;
  std::string unit;

  std::size_t size() const noexcept { return values.size(); }
  std::span<const double> view() const noexcept { return values; }
};

/// First differences of a parent series; one sample shorter than the parent.
struct IncrementSeries {
  std::vector<double> values;
  std::string parent_label;
  double dt = 1.0;
};

/// Magnitude and sign of increments. magnitude[i] * sign[i] == increment[i].
struct MagSignPair {
  std::vector<double> magnitude;
  std::vector<std::int8_t> sign;

  std::vector<double> sign_as_double() const;
};

struct CorrelationMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd r;
};

enum class GapPolicy { fail, drop_to_longest_contiguous };

struct CsvOptions {
  std::string value_column = "value";
  std::string time_column = "time";
  double expected_dt = 1.0;  // minutes
  GapPolicy gap_policy = GapPolicy::fail;
  char delimiter = ',';
  std::string label;
  std::string unit;
};

/// What ingestion did to the raw rows.
struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t gaps = 0;
  std::size_t kept_first_row = 0;  // index into the data rows
  std::size_t dropped = 0;
};

TimeSeries load_csv(const std::filesystem::path& path, const CsvOptions& options,
                    IngestReport* report = nullptr);
TimeSeries load_csv(std::istream& in, const CsvOptions& options, IngestReport* report = nullptr);

/// Parses an epoch-seconds number or an ISO-8601 UTC timestamp
/// (`YYYY-MM-DD[T| ]hh:mm[:ss[.fff]][Z|+hh:mm|-hh:mm]`).
double parse_timestamp(const std::string& text);

TimeSeries resample_mean(const TimeSeries& ts, double window);

IncrementSeries increments(const TimeSeries& ts);

MagSignPair mag_sign(const IncrementSeries& inc);

CorrelationMatrix pearson_matrix(std::span<const TimeSeries> series);

/// Sample Pearson coefficient of two equal-length sequences.
double pearson(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased

}  // namespace tsscale
