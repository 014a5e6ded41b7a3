#include "tsscale/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "tsscale/error.hpp"

namespace tsscale {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void bad(const std::string& where, const std::string& what) { fail(ErrorKind::config, where + ": " + what); }

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& where, const std::string& text) {
  double v = 0.0;
  const std::string t = trim(text);
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size() || t.empty()) bad(where, "not a number '" + text + "'");
  return v;
}

std::uint64_t to_unsigned(const std::string& where, const std::string& text) {
  std::uint64_t v = 0;
  const std::string t = trim(text);
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size() || t.empty())
    bad(where, "not a non-negative integer '" + text + "'");
  return v;
}

bool to_bool(const std::string& where, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  bad(where, "not a boolean '" + text + "'");
}

using Setter = std::function<void(const std::string& where, const std::string& value)>;

void apply_section(const std::string& name, const pt::ptree& section, const std::map<std::string, Setter>& keys) {
  for (const auto& [key, node] : section) {
    const std::string where = "[" + name + "] " + key;
    const auto it = keys.find(key);
    if (it == keys.end()) bad(where, "unknown key");
    it->second(where, node.data());
  }
}

}  // namespace

const char* to_string(GapPolicy policy) noexcept {
  return policy == GapPolicy::fail ? "fail" : "drop-to-longest-contiguous";
}

GapPolicy parse_gap_policy(const std::string& text) {
  const std::string t = trim(text);
  if (t == "fail") return GapPolicy::fail;
  if (t == "drop-to-longest-contiguous") return GapPolicy::drop_to_longest_contiguous;
  fail(ErrorKind::config, "unknown gap policy '" + text + "'");
}

std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_unsigned("index list", item));
  return out;
}

TimeWindow parse_window(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) fail(ErrorKind::config, "window must be 'lo,hi', got '" + text + "'");
  return {to_double("window", text.substr(0, comma)), to_double("window", text.substr(comma + 1))};
}

PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  // '#' comments are accepted alongside the ';' ones the INI reader knows.
  std::stringstream cleaned;
  {
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const std::string t = trim(line);
      if (!t.empty() && t.front() == '#') continue;
      cleaned << line << '\n';
    }
  }
  pt::ptree tree;
  try {
    pt::read_ini(cleaned, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::config, std::string("config syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  PipelineConfig c;
  auto window_setter = [](TimeWindow& w) { return [&w](const std::string&, const std::string& v) { w = parse_window(v); }; };

  for (const auto& [name, section] : tree) {
    if (!section.data().empty() && section.empty()) bad(name, "key outside any section");
    if (name == "pipeline") {
      apply_section(name, section,
                    {{"output_dir", [&](auto&, auto& v) { c.output_dir = base_dir / trim(v); }},
                     {"resample_window", [&](auto& w, auto& v) { c.resample_window = to_double(w, v); }}});
    } else if (name == "ingest") {
      apply_section(name, section,
                    {{"expected_dt", [&](auto& w, auto& v) { c.expected_dt = to_double(w, v); }},
                     {"gap_policy", [&](auto&, auto& v) { c.gap_policy = parse_gap_policy(v); }},
                     {"delimiter", [&](auto& w, auto& v) {
                        const std::string t = v == "\\t" ? "\t" : v;
                        if (t.size() != 1) bad(w, "delimiter must be one character");
                        c.delimiter = t[0];
                      }}});
    } else if (name == "distfit") {
      apply_section(name, section,
                    {{"bins", [&](auto& w, auto& v) {
                        if (trim(v) == "auto") c.bins.reset();
                        else c.bins = to_unsigned(w, v);
                      }},
                     {"zero_shift", [&](auto& w, auto& v) { c.distfit.zero_shift = to_double(w, v); }},
                     {"max_iterations", [&](auto& w, auto& v) { c.distfit.max_iterations = to_unsigned(w, v); }},
                     {"gradient_tolerance", [&](auto& w, auto& v) { c.distfit.gradient_tolerance = to_double(w, v); }}});
    } else if (name == "spectral") {
      apply_section(name, section,
                    {{"n_freqs", [&](auto& w, auto& v) { c.lpsd.n_freqs = to_unsigned(w, v); }},
                     {"f_min", [&](auto& w, auto& v) {
                        if (trim(v) == "auto") c.lpsd.f_min.reset();
                        else c.lpsd.f_min = to_double(w, v);
                      }},
                     {"f_max", [&](auto& w, auto& v) {
                        if (trim(v) == "auto") c.lpsd.f_max.reset();
                        else c.lpsd.f_max = to_double(w, v);
                      }},
                     {"taper", [&](auto&, auto& v) { c.lpsd.taper = parse_taper(trim(v)); }},
                     {"overlap", [&](auto& w, auto& v) { c.lpsd.overlap = to_double(w, v); }},
                     {"desired_averages", [&](auto& w, auto& v) { c.lpsd.desired_averages = to_unsigned(w, v); }},
                     {"min_bin", [&](auto& w, auto& v) { c.lpsd.min_bin = to_double(w, v); }},
                     {"f_lo", [&](auto& w, auto& v) { c.f_lo = to_double(w, v); }},
                     {"f_hi", [&](auto& w, auto& v) { c.f_hi = to_double(w, v); }}});
    } else if (name == "ssa") {
      apply_section(name, section,
                    {{"window", [&](auto& w, auto& v) {
                        c.ssa.window = trim(v) == "auto" ? 0 : to_unsigned(w, v);
                      }},
                     {"exponent", [&](auto& w, auto& v) { c.ssa.exponent = to_double(w, v); }},
                     {"center", [&](auto& w, auto& v) { c.ssa.center = to_bool(w, v); }},
                     {"trend", [&](auto&, auto& v) { c.trend = parse_index_list(v); }}});
    } else if (name == "dfa") {
      apply_section(name, section,
                    {{"order", [&](auto& w, auto& v) { c.dfa.order = static_cast<int>(to_unsigned(w, v)); }},
                     {"t_min", [&](auto& w, auto& v) { c.dfa.t_min = to_double(w, v); }},
                     {"points_per_decade", [&](auto& w, auto& v) { c.dfa.points_per_decade = to_unsigned(w, v); }},
                     {"low", window_setter(c.low)},
                     {"high", window_setter(c.high)}});
    } else if (name == "surrogate") {
      apply_section(name, section,
                    {{"count", [&](auto& w, auto& v) { c.surrogate.count = to_unsigned(w, v); }},
                     {"seed", [&](auto& w, auto& v) { c.surrogate.seed = to_unsigned(w, v); }},
                     {"max_iterations", [&](auto& w, auto& v) { c.surrogate.max_iterations = to_unsigned(w, v); }},
                     {"tolerance", [&](auto& w, auto& v) { c.surrogate.spectrum_tolerance = to_double(w, v); }},
                     {"window", window_setter(c.surrogate_window)}});
    } else if (name.rfind("input:", 0) == 0) {
      InputSpec in;
      in.label = trim(name.substr(6));
      if (in.label.empty()) bad(name, "input label is empty");
      apply_section(name, section,
                    {{"path", [&](auto&, auto& v) { in.path = base_dir / trim(v); }},
                     {"value_column", [&](auto&, auto& v) { in.value_column = trim(v); }},
                     {"time_column", [&](auto&, auto& v) { in.time_column = trim(v); }},
                     {"unit", [&](auto&, auto& v) { in.unit = trim(v); }}});
      if (in.path.empty()) bad(name, "missing path");
      c.inputs.push_back(std::move(in));
    } else {
      bad("[" + name + "]", "unknown section");
    }
  }
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, "config file not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

void validate(const PipelineConfig& c, bool require_inputs) {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::config, what);
  };
  check(!require_inputs || !c.inputs.empty(), "at least one [input:<label>] section is required");
  for (const auto& in : c.inputs)
    check(!in.label.empty() && std::all_of(in.label.begin(), in.label.end(),
                                           [](unsigned char ch) {
                                             return std::isalnum(ch) || ch == '_' || ch == '-' || ch == '.';
                                           }) &&
              in.label != "." && in.label != "..",
          "input label '" + in.label + "' must use only letters, digits, '_', '-' and '.'");
  for (std::size_t i = 0; i < c.inputs.size(); ++i)
    for (std::size_t k = i + 1; k < c.inputs.size(); ++k)
      check(c.inputs[i].label != c.inputs[k].label, "duplicate input label '" + c.inputs[i].label + "'");
  check(c.expected_dt > 0.0, "[ingest] expected_dt must be positive");
  if (c.resample_window) {
    const double ratio = *c.resample_window / c.expected_dt;
    check(*c.resample_window >= c.expected_dt && std::abs(ratio - std::round(ratio)) < 1e-9,
          "[pipeline] resample_window must be a positive multiple of expected_dt");
  }
  check(c.f_lo > 0.0 && c.f_lo < c.f_hi, "[spectral] need 0 < f_lo < f_hi");
  check(c.lpsd.n_freqs >= 2, "[spectral] n_freqs must be at least 2");
  check(c.ssa.exponent >= 1.5 && c.ssa.exponent <= 2.5, "[ssa] exponent must lie in [1.5, 2.5]");
  check(!c.trend.empty(), "[ssa] trend must select at least one component");
  for (const auto k : c.trend) check(k >= 1, "[ssa] trend components are 1-based");
  check(c.dfa.order >= 1 && c.dfa.order <= 3, "[dfa] order must be 1, 2 or 3");
  check(c.dfa.points_per_decade >= 1, "[dfa] points_per_decade must be at least 1");
  check(c.dfa.t_min > 0.0, "[dfa] t_min must be positive");
  check(c.low.lo > 0.0 && c.low.lo < c.low.hi, "[dfa] low window must satisfy 0 < lo < hi");
  check(c.high.lo < c.high.hi, "[dfa] high window must satisfy lo < hi");
  check(c.low.hi < c.high.lo, "[dfa] windows must be ordered and non-overlapping (low.hi < high.lo)");
  check(c.surrogate.count >= 1, "[surrogate] count must be at least 1");
  check(c.surrogate_window.lo > 0.0 && c.surrogate_window.lo < c.surrogate_window.hi,
        "[surrogate] window must satisfy 0 < lo < hi");
  check(c.distfit.zero_shift > 0.0, "[distfit] zero_shift must be positive");
}

Json to_json(const PipelineConfig& c) {
  Json inputs = Json::array();
  for (const auto& in : c.inputs)
    inputs.push_back(Json{{"label", in.label},
                          {"path", in.path.filename().string()},
                          {"value_column", in.value_column},
                          {"time_column", in.time_column},
                          {"unit", in.unit}});
  return Json{
      {"inputs", inputs},
      {"resample_window", c.resample_window ? Json(*c.resample_window) : Json(nullptr)},
      {"ingest", {{"expected_dt", c.expected_dt}, {"gap_policy", to_string(c.gap_policy)},
                  {"delimiter", std::string(1, c.delimiter)}}},
      {"distfit", {{"bins", c.bins ? Json(*c.bins) : Json("auto")}, {"zero_shift", c.distfit.zero_shift},
                   {"max_iterations", c.distfit.max_iterations}, {"gradient_tolerance", c.distfit.gradient_tolerance},
                   {"kl_units", "nats"}}},
      {"spectral", {{"lpsd", to_json(c.lpsd)}, {"f_lo", c.f_lo}, {"f_hi", c.f_hi}}},
      {"ssa", {{"window", c.ssa.window == 0 ? Json("auto") : Json(c.ssa.window)}, {"exponent", c.ssa.exponent},
               {"center", c.ssa.center}, {"trend", c.trend}}},
      {"dfa", {{"order", c.dfa.order}, {"t_min", c.dfa.t_min}, {"points_per_decade", c.dfa.points_per_decade},
               {"low", {c.low.lo, c.low.hi}}, {"high", {c.high.lo, c.high.hi}}}},
      {"surrogate", {{"count", c.surrogate.count}, {"seed", c.surrogate.seed},
                     {"max_iterations", c.surrogate.max_iterations},
                     {"tolerance", c.surrogate.spectrum_tolerance},
                     {"window", {c.surrogate_window.lo, c.surrogate_window.hi}}}}};
}

}  // namespace tsscale
