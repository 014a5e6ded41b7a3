#include "tsscale/series.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tsscale/error.hpp"

namespace tsscale {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\"");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, delimiter)) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == delimiter) cells.emplace_back();
  return cells;
}

bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

int parse_fixed_int(std::string_view s, std::size_t pos, std::size_t width, const std::string& text) {
  if (pos + width > s.size()) fail(ErrorKind::ingestion, "malformed timestamp '" + text + "'");
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + width, value);
  if (ec != std::errc() || ptr != s.data() + pos + width)
    fail(ErrorKind::ingestion, "malformed timestamp '" + text + "'");
  return value;
}

double parse_iso8601(const std::string& text) {
  const std::string_view s = text;
  const int year = parse_fixed_int(s, 0, 4, text);
  if (s.size() < 16 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':')
    fail(ErrorKind::ingestion, "malformed timestamp '" + text + "'");
  const int month = parse_fixed_int(s, 5, 2, text);
  const int day = parse_fixed_int(s, 8, 2, text);
  const int hour = parse_fixed_int(s, 11, 2, text);
  const int minute = parse_fixed_int(s, 14, 2, text);
  double seconds = 0.0;
  std::size_t pos = 16;
  if (pos < s.size() && s[pos] == ':') {
    std::size_t end = pos + 1;
    while (end < s.size() && (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.')) ++end;
    if (!parse_number(std::string(s.substr(pos + 1, end - pos - 1)), seconds))
      fail(ErrorKind::ingestion, "malformed timestamp '" + text + "'");
    pos = end;
  }
  double offset_seconds = 0.0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' && pos + 1 == s.size()) {
    } else if ((s[pos] == '+' || s[pos] == '-') && s.size() == pos + 6 && s[pos + 3] == ':') {
      const int oh = parse_fixed_int(s, pos + 1, 2, text);
      const int om = parse_fixed_int(s, pos + 4, 2, text);
      offset_seconds = (s[pos] == '+' ? 1.0 : -1.0) * (oh * 3600.0 + om * 60.0);
    } else {
      fail(ErrorKind::ingestion, "malformed timestamp '" + text + "'");
    }
  }
  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || seconds >= 61.0)
    fail(ErrorKind::ingestion, "invalid calendar timestamp '" + text + "'");
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<double>(days) * 86400.0 + hour * 3600.0 + minute * 60.0 + seconds - offset_seconds;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) fail(ErrorKind::ingestion, "missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

struct Row {
  double time;
  double value;
  bool present;
};

}  // namespace

double parse_timestamp(const std::string& text) {
  double value = 0.0;
  if (parse_number(text, value)) return value;
  return parse_iso8601(text);
}

TimeSeries load_csv(const std::filesystem::path& path, const CsvOptions& options, IngestReport* report) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ingestion, "cannot open '" + path.string() + "'");
  TimeSeries ts = load_csv(in, options, report);
  if (ts.label.empty()) ts.label = path.stem().string();
  return ts;
}

TimeSeries load_csv(std::istream& in, const CsvOptions& options, IngestReport* report) {
  if (!(options.expected_dt > 0.0)) fail(ErrorKind::config, "expected_dt must be positive");

  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::ingestion, "empty input: header row required");
  const auto header = split(line, options.delimiter);
  const std::size_t time_col = column_index(header, options.time_column);
  const std::size_t value_col = column_index(header, options.value_column);

  std::vector<Row> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, options.delimiter);
    if (cells.size() <= std::max(time_col, value_col))
      fail(ErrorKind::ingestion, "line " + std::to_string(line_no) + ": too few columns");
    Row row{parse_timestamp(cells[time_col]), 0.0, false};
    row.present = parse_number(cells[value_col], row.value);
    rows.push_back(row);
  }
  if (rows.empty()) fail(ErrorKind::ingestion, "no data rows");

  const double step = options.expected_dt * 60.0;
  const double tol = 1e-6 * step;

  // Contiguous runs of present samples. A missing value or a timestamp jump
  // breaks the run.
  struct Run {
    std::size_t first, last;  // inclusive, into rows
  };
  std::vector<Run> runs;
  std::string first_gap;
  std::size_t gaps = 0;
  std::size_t run_start = rows.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0) {
      const double delta = rows[i].time - rows[i - 1].time;
      if (!(delta > 0.0))
        fail(ErrorKind::ingestion, "non-monotone timestamps at data row " + std::to_string(i));
      if (delta < step - tol)
        fail(ErrorKind::ingestion, "irregular sampling at data row " + std::to_string(i) + ": step " +
                                       std::to_string(delta) + " s shorter than expected " +
                                       std::to_string(step) + " s");
      if (delta > step + tol) {
        ++gaps;
        if (first_gap.empty()) {
          std::ostringstream msg;
          msg.precision(17);
          msg << "gap between t=" << rows[i - 1].time << " and t=" << rows[i].time << " (data rows "
              << i - 1 << "->" << i << ")";
          first_gap = msg.str();
        }
        if (run_start < rows.size()) runs.push_back({run_start, i - 1});
        run_start = rows.size();
      }
    }
    if (!rows[i].present) {
      ++gaps;
      if (first_gap.empty()) first_gap = "missing value at data row " + std::to_string(i);
      if (run_start < rows.size()) runs.push_back({run_start, i - 1});
      run_start = rows.size();
      continue;
    }
    if (run_start == rows.size()) run_start = i;
  }
  if (run_start < rows.size()) runs.push_back({run_start, rows.size() - 1});

  if (gaps > 0 && options.gap_policy == GapPolicy::fail) fail(ErrorKind::ingestion, first_gap);
  if (runs.empty()) fail(ErrorKind::ingestion, "no valid samples");

  // Longest run wins; the earliest among equals.
  const Run best = *std::max_element(runs.begin(), runs.end(), [](const Run& a, const Run& b) {
    return (a.last - a.first) < (b.last - b.first);
  });

  TimeSeries ts;
  ts.dt = options.expected_dt;
  ts.t0 = rows[best.first].time;
  ts.label = options.label;
  ts.unit = options.unit;
  ts.values.reserve(best.last - best.first + 1);
  for (std::size_t i = best.first; i <= best.last; ++i) ts.values.push_back(rows[i].value);

  if (report) {
    report->rows_read = rows.size();
    report->gaps = gaps;
    report->kept_first_row = best.first;
    report->dropped = rows.size() - ts.values.size();
  }
  return ts;
}

TimeSeries resample_mean(const TimeSeries& ts, double window) {
  if (!(window >= ts.dt)) fail(ErrorKind::config, "resample window shorter than dt");
  const double ratio = window / ts.dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * ratio)
    fail(ErrorKind::config, "resample window is not an integer multiple of dt");
  const auto width = static_cast<std::size_t>(rounded);
  const std::size_t n_out = ts.size() / width;

  TimeSeries out;
  out.dt = window;
  out.t0 = ts.t0;
  out.label = ts.label;
  out.unit = ts.unit;
  out.values.resize(n_out);
  for (std::size_t k = 0; k < n_out; ++k) {
    const auto first = ts.values.begin() + static_cast<std::ptrdiff_t>(k * width);
    out.values[k] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(width), 0.0) /
                    static_cast<double>(width);
  }
  return out;
}

IncrementSeries increments(const TimeSeries& ts) {
  if (ts.size() < 2) fail(ErrorKind::numerical, "increments need at least two samples");
  IncrementSeries inc;
  inc.parent_label = ts.label;
  inc.dt = ts.dt;
  inc.values.resize(ts.size() - 1);
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) inc.values[i] = ts.values[i + 1] - ts.values[i];
  return inc;
}

MagSignPair mag_sign(const IncrementSeries& inc) {
  MagSignPair out;
  out.magnitude.resize(inc.values.size());
  out.sign.resize(inc.values.size());
  for (std::size_t i = 0; i < inc.values.size(); ++i) {
    const double v = inc.values[i];
    out.magnitude[i] = std::abs(v);
    out.sign[i] = static_cast<std::int8_t>((v > 0.0) - (v < 0.0));
  }
  return out;
}

std::vector<double> MagSignPair::sign_as_double() const { return {sign.begin(), sign.end()}; }

double mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  const double m = mean(x);
  double ss = 0.0;
  for (const double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix pearson_matrix(std::span<const TimeSeries> series) {
  if (series.empty()) fail(ErrorKind::numerical, "pearson_matrix needs at least one series");
  const std::size_t n = series.front().size();
  for (const auto& s : series) {
    if (s.size() != n)
      fail(ErrorKind::numerical, "length mismatch: '" + s.label + "' has " + std::to_string(s.size()) +
                                     " samples, expected " + std::to_string(n));
    if (n < 2) fail(ErrorKind::numerical, "series '" + s.label + "' is shorter than 2 samples");
    const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
    if (*lo == *hi) fail(ErrorKind::numerical, "zero-variance series '" + s.label + "'");
  }

  CorrelationMatrix out;
  const auto k = series.size();
  out.r = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    out.labels.push_back(series[i].label);
    for (std::size_t j = i + 1; j < k; ++j) {
      const double r = pearson(series[i].values, series[j].values);
      out.r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r;
      out.r(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = r;
    }
  }
  return out;
}

}  // namespace tsscale
