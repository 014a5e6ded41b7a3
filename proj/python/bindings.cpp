#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tsscale/config.hpp"
#include "tsscale/dfa.hpp"
#include "tsscale/distfit.hpp"
#include "tsscale/error.hpp"
#include "tsscale/io.hpp"
#include "tsscale/pipeline.hpp"
#include "tsscale/series.hpp"
#include "tsscale/spectral.hpp"
#include "tsscale/ssa.hpp"
#include "tsscale/surrogate.hpp"
#include "tsscale/synth.hpp"

namespace py = pybind11;
using namespace tsscale;

namespace {

using InArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const InArray& a) {
  if (a.ndim() != 1) throw py::value_error("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
  py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

TimeSeries series(const InArray& values, double dt) {
  TimeSeries ts;
  ts.values = to_vector(values);
  ts.dt = dt;
  return ts;
}

// Structured results that already have a JSON form cross as JSON text and are
// decoded on the Python side.
std::string text(const Json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "tsscale native core";
  m.attr("__version__") = TSSCALE_VERSION;

  static py::exception<Error> error_type(m, "TsscaleError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  m.def(
      "generate",
      [](const std::string& kind, std::size_t n, std::uint64_t seed, double dt, double beta,
         std::optional<double> beta_high, std::optional<double> f_break, double period, double amplitude, double slope,
         std::size_t depth, double sigma) {
        GeneratorSpec g;
        g.kind = parse_signal_kind(kind);
        g.n = n;
        g.seed = seed;
        g.dt = dt;
        g.beta = beta;
        g.beta_high = beta_high;
        g.f_break = f_break;
        g.period = period;
        g.amplitude = amplitude;
        g.slope = slope;
        g.depth = depth;
        g.cascade_sigma = sigma;
        return to_array(generate(g).values);
      },
      py::arg("kind"), py::arg("n"), py::arg("seed") = 0, py::arg("dt") = 1.0, py::arg("beta") = 1.0,
      py::arg("beta_high") = py::none(), py::arg("f_break") = py::none(), py::arg("period") = 64.0,
      py::arg("amplitude") = 1.0, py::arg("slope") = 1.0, py::arg("depth") = 0, py::arg("sigma") = 0.2);

  m.def(
      "increments", [](const InArray& x) { return to_array(increments(series(x, 1.0)).values); }, py::arg("values"));

  m.def(
      "mag_sign",
      [](const InArray& inc) {
        const auto ms = mag_sign(IncrementSeries{to_vector(inc)});
        return py::make_tuple(to_array(ms.magnitude), to_array(ms.sign_as_double()));
      },
      py::arg("increments"));

  m.def(
      "lpsd",
      [](const InArray& x, double dt, std::size_t n_freqs, std::optional<double> f_min, std::optional<double> f_max,
         const std::string& taper) {
        LpsdConfig c;
        c.n_freqs = n_freqs;
        c.f_min = f_min;
        c.f_max = f_max;
        c.taper = parse_taper(taper);
        const auto psd = lpsd(series(x, dt), c);
        return py::make_tuple(to_array(psd.frequencies), to_array(psd.power));
      },
      py::arg("values"), py::arg("dt") = 1.0, py::arg("n_freqs") = 200, py::arg("f_min") = py::none(),
      py::arg("f_max") = py::none(), py::arg("taper") = "hann");

  m.def(
      "spectral_exponent_json",
      [](const InArray& x, double f_lo, double f_hi, double dt) {
        return text(to_json(fit_spectral_exponent(lpsd(series(x, dt)), f_lo, f_hi)));
      },
      py::arg("values"), py::arg("f_lo"), py::arg("f_hi"), py::arg("dt") = 1.0);

  m.def(
      "rank_distributions_json",
      [](const InArray& x, std::optional<std::size_t> bins) {
        return text(to_json(rank_distributions(series(x, 1.0), {}, bins)));
      },
      py::arg("values"), py::arg("bins") = py::none());

  m.def(
      "ssa",
      [](const InArray& x, std::size_t window, double exponent, bool center, const std::vector<std::size_t>& trend) {
        SsaConfig c;
        c.window = window;
        c.exponent = exponent;
        c.center = center;
        c.materialize = trend.empty() ? 0 : *std::max_element(trend.begin(), trend.end());
        const TimeSeries ts = series(x, 1.0);
        const auto dec = decompose(ts, c);
        const auto split = split_trend(dec, trend, ts);
        py::dict out;
        out["window"] = dec.window;
        out["eigenvalues"] = to_array(dec.eigenvalues);
        out["variance_fractions"] = to_array(dec.variance_fractions);
        out["trend"] = to_array(split.trend.values);
        out["residual"] = to_array(split.residual.values);
        return out;
      },
      py::arg("values"), py::arg("window") = 0, py::arg("exponent") = 2.5, py::arg("center") = true,
      py::arg("trend") = std::vector<std::size_t>{1});

  m.def(
      "dfa",
      [](const InArray& x, int order, double t_min, std::size_t points_per_decade, double dt) {
        const auto v = to_vector(x);
        const auto grid = default_box_grid(v.size(), dt, t_min, points_per_decade, order);
        const auto f = dfa(v, order, grid, dt);
        std::vector<double> minutes;
        for (auto b : f.box_sizes) minutes.push_back(static_cast<double>(b) * dt);
        return py::make_tuple(to_array(minutes), to_array(f.fluctuation));
      },
      py::arg("values"), py::arg("order") = 1, py::arg("t_min") = 10.0, py::arg("points_per_decade") = 20,
      py::arg("dt") = 1.0);

  m.def(
      "scaling_exponent",
      [](const InArray& minutes, const InArray& fluctuation, double lo, double hi) {
        FluctuationFunction f;
        for (double t : to_vector(minutes)) f.box_sizes.push_back(static_cast<std::size_t>(std::llround(t)));
        f.fluctuation = to_vector(fluctuation);
        if (f.fluctuation.size() != f.box_sizes.size()) throw py::value_error("length mismatch");
        const auto e = scaling_exponent(f, lo, hi);
        return py::make_tuple(e.alpha, e.stderr_alpha);
      },
      py::arg("minutes"), py::arg("fluctuation"), py::arg("lo"), py::arg("hi"));

  m.def(
      "surrogate",
      [](const InArray& x, std::uint64_t seed, std::size_t max_iterations, double tolerance) {
        SurrogateConfig c;
        c.max_iterations = max_iterations;
        c.spectrum_tolerance = tolerance;
        return to_array(make_surrogate(to_vector(x), seed, c).values);
      },
      py::arg("values"), py::arg("seed") = 0, py::arg("max_iterations") = 200, py::arg("tolerance") = 1e-3);

  m.def(
      "surrogate_test_json",
      [](const InArray& inc, std::size_t count, std::uint64_t seed, double lo, double hi) {
        SurrogateConfig c;
        c.count = count;
        c.seed = seed;
        py::gil_scoped_release release;
        return text(to_json(ensemble_test(IncrementSeries{to_vector(inc)}, c, {lo, hi})));
      },
      py::arg("increments"), py::arg("count") = 100, py::arg("seed") = 0, py::arg("lo") = 300.0,
      py::arg("hi") = 9070.0);

  m.def(
      "pearson",
      [](const std::vector<InArray>& xs) {
        std::vector<TimeSeries> set;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          set.push_back(series(xs[i], 1.0));
          set.back().label = "series " + std::to_string(i);
        }
        const auto r = pearson_matrix(set).r;
        py::array_t<double> out({r.rows(), r.cols()});
        auto view = out.mutable_unchecked<2>();
        for (Eigen::Index i = 0; i < r.rows(); ++i)
          for (Eigen::Index k = 0; k < r.cols(); ++k) view(i, k) = r(i, k);
        return out;
      },
      py::arg("series"));

  m.def(
      "run_pipeline_json",
      [](const std::string& config_path, std::optional<std::string> output, std::optional<std::uint64_t> seed) {
        PipelineConfig c = load_config(config_path);
        if (output) c.output_dir = *output;
        if (seed) c.surrogate.seed = *seed;
        py::gil_scoped_release release;
        return text(run_pipeline(c));
      },
      py::arg("config"), py::arg("output") = py::none(), py::arg("seed") = py::none());
}
