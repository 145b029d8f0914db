#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "neuroloop/cli.hpp"
#include "neuroloop/complexity.hpp"
#include "neuroloop/controller.hpp"
#include "neuroloop/dcmc.hpp"
#include "neuroloop/error.hpp"
#include "neuroloop/fatigue.hpp"
#include "neuroloop/signal.hpp"
#include "neuroloop/spectral_slope.hpp"
#include "neuroloop/stats.hpp"
#include "neuroloop/synth.hpp"

namespace py = pybind11;
using namespace neuroloop;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vec(const Array& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

TimeSeries series(const Array& x, double fs, const std::string& channel = "X") {
  TimeSeries ts{to_vec(x), fs, channel, 0.0};
  ts.validate();
  return ts;
}

Detrend parse_detrend(const std::string& s) {
  if (s == "none") return Detrend::none;
  if (s == "constant") return Detrend::constant;
  if (s == "linear") return Detrend::linear;
  throw py::value_error("detrend must be none, constant or linear");
}

BaselineRule parse_baseline(const std::string& s) {
  if (s == "per-bout") return BaselineRule::per_bout;
  if (s == "first-bout") return BaselineRule::first_bout_only;
  throw py::value_error("baseline must be per-bout or first-bout");
}

py::object opt(const std::optional<double>& v) { return v ? py::cast(*v) : py::none(); }

py::dict stat_dict(const stats::StatResult& r) {
  py::dict d;
  d["test"] = r.test;
  d["effect"] = r.effect;
  d["statistic"] = r.statistic;
  d["p_value"] = r.p_value;
  d["effect_size"] = opt(r.effect_size);
  d["df1"] = r.df1;
  d["df2"] = r.df2;
  return d;
}

// coeffs as a (p, 2, 2) array
std::vector<Eigen::Matrix2d> to_coeffs(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 3 || a.shape(1) != 2 || a.shape(2) != 2) throw py::value_error("coeffs must have shape (p, 2, 2)");
  std::vector<Eigen::Matrix2d> out(static_cast<std::size_t>(a.shape(0)));
  auto r = a.unchecked<3>();
  for (py::ssize_t k = 0; k < a.shape(0); ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out[static_cast<std::size_t>(k)](i, j) = r(k, i, j);
  return out;
}

py::array_t<double> from_coeffs(const std::vector<Eigen::Matrix2d>& c) {
  py::array_t<double> out({static_cast<py::ssize_t>(c.size()), py::ssize_t{2}, py::ssize_t{2}});
  auto w = out.mutable_unchecked<3>();
  for (std::size_t k = 0; k < c.size(); ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) w(static_cast<py::ssize_t>(k), i, j) = c[k](i, j);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Closed-loop fatigue-controlled training and neural signal analysis.";

  static py::exception<Error> exc(m, "NeuroloopError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(exc, e.what());
    }
  });

  // signal
  m.def(
      "preprocess",
      [](const Array& x, double fs, double target_rate) {
        PreprocessConfig cfg;
        cfg.target_rate = target_rate;
        auto out = preprocess(series(x, fs), cfg);
        return py::make_tuple(to_array(out.samples), out.sample_rate);
      },
      py::arg("x"), py::arg("sample_rate"), py::arg("target_rate") = 1000.0,
      "Band-pass 2-200 Hz, notch 49-51 Hz, resample. Returns (samples, rate).");

  m.def(
      "bandpass_filtfilt",
      [](const Array& x, double fs, double lo, double hi, int order) {
        const auto v = to_vec(x);
        return to_array(sos_filtfilt(butter_bandpass(order, lo, hi, fs), v));
      },
      py::arg("x"), py::arg("sample_rate"), py::arg("lo"), py::arg("hi"), py::arg("order") = 4);

  m.def(
      "periodogram",
      [](const Array& x, double fs, double segment_seconds, double overlap, const std::string& detrend) {
        SpectrumConfig cfg{segment_seconds, overlap, parse_detrend(detrend)};
        const auto v = to_vec(x);
        const auto s = periodogram(v, fs, cfg);
        return py::make_tuple(to_array(s.freqs), to_array(s.power));
      },
      py::arg("x"), py::arg("sample_rate"), py::arg("segment_seconds") = 1.0, py::arg("overlap") = 0.5,
      py::arg("detrend") = "constant", "Welch PSD. Returns (freqs, power).");

  // fatigue
  m.def(
      "mpf",
      [](const Array& freqs, const Array& power, double f_lo, double f_hi) {
        PowerSpectrum s{to_vec(freqs), to_vec(power), 0.0};
        if (s.freqs.size() != s.power.size() || s.freqs.size() < 2)
          throw py::value_error("freqs and power must have the same length >= 2");
        s.df = s.freqs[1] - s.freqs[0];
        return mpf(s, f_lo, f_hi);
      },
      py::arg("freqs"), py::arg("power"), py::arg("f_lo") = 60.0, py::arg("f_hi") = 200.0);
  m.def("mpf_drop_rate", &mpf_drop_rate, py::arg("baseline"), py::arg("running"));
  m.def(
      "stream_mpf",
      [](const Array& x, double fs, double window, const std::string& baseline) {
        BaselineConfig b;
        b.rule = parse_baseline(baseline);
        py::list out;
        for (const auto& w : stream_mpf(series(x, fs, "EMG_AFF"), window, b)) {
          py::dict d;
          d["window_start"] = w.window_start;
          d["mpf"] = opt(w.mpf);
          d["drop_rate"] = opt(w.drop_rate);
          d["is_baseline_window"] = w.is_baseline_window;
          out.append(d);
        }
        return out;
      },
      py::arg("x"), py::arg("sample_rate"), py::arg("window") = 4.0, py::arg("baseline") = "per-bout");

  // complexity
  m.def(
      "lz76_phrases",
      [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& bits) {
        return lz76_phrases(std::span<const std::uint8_t>(bits.data(), static_cast<std::size_t>(bits.size())));
      },
      py::arg("bits"));
  m.def(
      "lzc",
      [](const Array& x, double fs) {
        Epoch e{"X", 0.0, to_vec(x), fs, Quality::accepted};
        const auto r = lzc(e);
        return py::make_tuple(r.c_raw, r.c_norm);
      },
      py::arg("x"), py::arg("sample_rate"), "Median-binarized LZ76 complexity. Returns (c_raw, c_norm).");

  // spectral slope
  m.def(
      "psd_slope",
      [](const Array& x, double fs, const std::string& fit) {
        SlopeConfig cfg;
        if (fit == "log-log")
          cfg.fit = SlopeFit::log_log;
        else if (fit == "log-linear")
          cfg.fit = SlopeFit::log_linear;
        else
          throw py::value_error("fit must be log-log or log-linear");
        const auto r = psd_slope(series(x, fs), cfg);
        py::dict d;
        d["slope"] = r.slope;
        d["intercept"] = r.intercept;
        d["r2"] = r.r2;
        d["n_segments"] = r.n_segments;
        d["n_excluded"] = r.n_excluded;
        return d;
      },
      py::arg("x"), py::arg("sample_rate"), py::arg("fit") = "log-log");
  m.def("slope_si", &slope_si, py::arg("slope_aff"), py::arg("slope_un"));

  // synthesis
  m.def(
      "gen_mvar",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& coeffs, std::size_t n,
         std::uint64_t seed, double var1, double var2, double fs) {
        MvarSpec spec{to_coeffs(coeffs), var1, var2};
        auto [a, b] = gen_mvar(spec, n, seed, fs);
        return py::make_tuple(to_array(a.samples), to_array(b.samples));
      },
      py::arg("coeffs"), py::arg("n_samples"), py::arg("seed"), py::arg("var1") = 1.0, py::arg("var2") = 1.0,
      py::arg("sample_rate") = 1000.0, "Bivariate AR process. Returns (eeg, emg).");
  m.def(
      "gen_emg",
      [](double level, double duration, std::uint64_t seed, std::uint64_t call_index) {
        PlantConfig cfg;
        cfg.seed = seed;
        return to_array(gen_emg(FatigueState{level}, cfg, duration, call_index).samples);
      },
      py::arg("level"), py::arg("duration"), py::arg("seed") = 1, py::arg("call_index") = 0);

  // controller
  m.def(
      "run_session",
      [](const std::string& mode, std::uint64_t seed, double target_running, double rest_duration,
         double threshold) {
        SessionConfig cfg;
        cfg.mode = parse_mode(mode);
        cfg.target_running = target_running;
        cfg.rest_duration = rest_duration;
        cfg.threshold = threshold;
        const auto log = run_session(cfg, PlantConfig{}, seed);
        py::dict d;
        d["accumulated_running"] = log.accumulated_running;
        d["wall_clock"] = log.wall_clock;
        d["rests"] = log.rests;
        d["timed_out"] = log.timed_out;
        d["max_drop_rate"] = opt(log.max_drop_rate());
        py::list drops;
        for (const auto& e : log.events)
          if (e.kind == EventKind::window_evaluated) drops.append(opt(e.drop_rate));
        d["drop_rates"] = drops;
        return d;
      },
      py::arg("mode") = "fat-c", py::arg("seed") = 0, py::arg("target_running") = 1800.0,
      py::arg("rest_duration") = 180.0, py::arg("threshold") = 11.0);

  // dCMC
  m.def(
      "fit_mvar",
      [](const Array& eeg, const Array& emg, double fs, int order, double trial_seconds) {
        const auto trials = dcmc::make_trials(series(eeg, fs, "EEG_AFF"), series(emg, fs, "EMG_AFF"), trial_seconds);
        const auto model = dcmc::fit_mvar(trials, order);
        py::dict d;
        d["coeffs"] = from_coeffs(model.coeffs);
        d["var1"] = model.var1;
        d["var2"] = model.var2;
        d["cov12"] = model.cov12;
        return d;
      },
      py::arg("eeg"), py::arg("emg"), py::arg("sample_rate"), py::arg("order"), py::arg("trial_seconds") = 1.0);
  m.def(
      "directed_coherence",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& coeffs, double var1, double var2,
         const Array& freqs, double fs) {
        dcmc::MvarModel model;
        model.coeffs = to_coeffs(coeffs);
        model.var1 = var1;
        model.var2 = var2;
        const auto f = to_vec(freqs);
        const auto r = dcmc::directed_coherence(model, f, fs);
        return py::make_tuple(to_array(r.dc_desc), to_array(r.dc_asc));
      },
      py::arg("coeffs"), py::arg("var1"), py::arg("var2"), py::arg("freqs"), py::arg("sample_rate") = 1000.0,
      "Squared directed coherence. Returns (descending, ascending).");
  m.def(
      "significance_threshold",
      [](std::size_t n_trials, std::size_t trial_len, int order, int n_sim, std::uint64_t seed) {
        dcmc::SurrogateConfig cfg;
        cfg.n_sim = n_sim;
        cfg.seed = seed;
        return dcmc::significance_threshold(n_trials, trial_len, order, cfg);
      },
      py::arg("n_trials"), py::arg("trial_len"), py::arg("order"), py::arg("n_sim") = 50, py::arg("seed") = 0);

  // stats
  m.def(
      "t_test",
      [](const Array& a, const Array& b, bool paired) {
        const auto va = to_vec(a), vb = to_vec(b);
        return stat_dict(stats::t_test(va, vb, paired));
      },
      py::arg("a"), py::arg("b"), py::arg("paired") = false);
  m.def(
      "anova_oneway",
      [](const std::vector<std::vector<double>>& groups, bool posthoc) {
        const auto r = stats::anova_oneway(groups, posthoc);
        auto d = stat_dict(r.anova);
        d["posthoc"] = r.posthoc;
        return d;
      },
      py::arg("groups"), py::arg("posthoc") = false);
  m.def(
      "anova_twoway",
      [](const stats::TwoWayTable& cells) {
        const auto r = stats::anova_twoway(cells);
        py::dict d;
        d["A"] = stat_dict(r.factor_a);
        d["B"] = r.factor_b ? py::object(stat_dict(*r.factor_b)) : py::none();
        d["AxB"] = r.interaction ? py::object(stat_dict(*r.interaction)) : py::none();
        return d;
      },
      py::arg("cells"), "cells[a][b] is the list of observations at level a of A and b of B.");
  m.def(
      "ks_normality",
      [](const Array& x) {
        const auto v = to_vec(x);
        return stat_dict(stats::ks_normality(v));
      },
      py::arg("x"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"neuroloop"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(rc, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line tool in-process. Returns (exit_code, stdout, stderr).");
}
