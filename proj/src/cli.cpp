#include "neuroloop/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "neuroloop/complexity.hpp"
#include "neuroloop/config.hpp"
#include "neuroloop/controller.hpp"
#include "neuroloop/dcmc.hpp"
#include "neuroloop/error.hpp"
#include "neuroloop/io.hpp"
#include "neuroloop/random.hpp"
#include "neuroloop/spectral_slope.hpp"
#include "neuroloop/stats.hpp"
#include "neuroloop/synth.hpp"
#include "plot.hpp"

namespace neuroloop {
namespace {

using io::Row;

struct Common {
  std::optional<std::uint64_t> seed;
  std::string config_path;

  std::uint64_t resolved_seed() const {
    if (seed) return *seed;
    if (const char* env = std::getenv("NEUROLOOP_SEED")) {
      try {
        return std::stoull(env);
      } catch (const std::exception&) {
        throw ConfigError(std::string("NEUROLOOP_SEED is not an unsigned integer: '") + env + "'");
      }
    }
    return 0;
  }

  config::Config load() const {
    return config_path.empty() ? config::Config{} : config::Config::load(config_path);
  }
};

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("--seed", common.seed, "Random seed (default: $NEUROLOOP_SEED or 0)");
  sub->add_option("--config", common.config_path, "Configuration file")->check(CLI::ExistingFile);
}

std::string qualifier(const Row& r, const std::string& key) {
  std::istringstream in(r.qualifiers);
  std::string part;
  while (std::getline(in, part, ';')) {
    const auto eq = part.find('=');
    if (eq != std::string::npos && part.substr(0, eq) == key) return part.substr(eq + 1);
  }
  return {};
}

// Default EEG/EMG coupling used by `simulate`: EEG resonant near 20 Hz,
// EMG driven by EEG at a 2-sample lag.
MvarSpec default_coupling() {
  MvarSpec spec;
  const double r = 0.95, f0 = 20.0, fs = 1000.0;
  Eigen::Matrix2d a1, a2;
  a1 << 2.0 * r * std::cos(2.0 * std::acos(-1.0) * f0 / fs), 0.0, 0.0, 0.3;
  a2 << -r * r, 0.0, 1.0, 0.0;
  spec.coeffs = {a1, a2};
  return spec;
}

// ---------------------------------------------------------------- preprocess
struct PreprocessArgs {
  std::string input, output;
  bool binary = false;
  std::optional<double> target_rate;
};

int cmd_preprocess(const PreprocessArgs& a, const Common& common, std::ostream& out) {
  const auto cfg_file = common.load();
  auto cfg = config::preprocess_config(cfg_file);
  if (a.target_rate) cfg.target_rate = *a.target_rate;
  auto rec = io::read_recording(a.input);
  for (auto& ch : rec.channels) ch = preprocess(ch, cfg);
  io::write_recording(a.output, rec, a.binary ? io::SampleEncoding::binary : io::SampleEncoding::text);
  out << "preprocessed " << rec.channels.size() << " channel(s) -> " << a.output << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------------- mpf
struct MpfArgs {
  std::string input, output, channel = "EMG_AFF", group = "none", baseline = "per-bout";
  double window = 4.0;
  bool append = false;
};

int cmd_mpf(const MpfArgs& a, const Common& common, std::ostream& out) {
  const auto cfg_file = common.load();
  BaselineConfig rule;
  rule.windows = static_cast<int>(cfg_file.get_int("session", "baseline_windows", rule.windows));
  if (a.baseline == "first-bout")
    rule.rule = BaselineRule::first_bout_only;
  else if (a.baseline != "per-bout")
    throw UsageError("--baseline must be per-bout or first-bout");

  const auto rec = io::read_recording(a.input);
  const auto windows = stream_mpf(rec.channel(a.channel), a.window, rule);
  io::ResultTable rows;
  std::vector<double> base;
  for (const auto& w : windows) {
    const std::string q = "channel=" + a.channel + ";window_start=" + io::format_double(w.window_start);
    if (w.mpf) rows.push_back(Row{rec.subject, rec.day, a.group, "mpf", *w.mpf, q});
    if (w.is_baseline_window && w.mpf) base.push_back(*w.mpf);
    if (w.drop_rate) rows.push_back(Row{rec.subject, rec.day, a.group, "mpf_drop_rate", *w.drop_rate, q});
  }
  if (!base.empty())
    rows.push_back(Row{rec.subject, rec.day, a.group, "mpf_baseline",
                       std::accumulate(base.begin(), base.end(), 0.0) / static_cast<double>(base.size()),
                       "channel=" + a.channel});
  io::write_table(a.output, rows, a.append);
  out << windows.size() << " MPF windows -> " << a.output << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------ simulate
struct SimulateArgs {
  std::string mode = "fat-c", log = "session.jsonl", recording, table, group;
  std::string subject = "S0";
  int day = 0;
  bool binary = false;
};

int cmd_simulate(const SimulateArgs& a, const Common& common, std::ostream& out) {
  const auto cfg_file = common.load();
  auto session = config::session_config(cfg_file);
  session.mode = parse_mode(a.mode);
  const auto plant = config::plant_config(cfg_file);
  const auto seed = common.resolved_seed();

  TimeSeries emg;
  const auto log = run_session(session, plant, seed, &emg);
  io::write_session_log(a.log, log, session);

  if (!a.recording.empty()) {
    const auto coupling = config::mvar_spec(cfg_file, default_coupling());
    // EEG is scaled to a fixed RMS; the cortical drive is mixed into the
    // plant EMG at a fraction of its amplitude so the MPF stays plant-led.
    const double eeg_rms = cfg_file.get_double("simulate", "eeg_rms", 20.0);
    const double drive_fraction = cfg_file.get_double("simulate", "drive_fraction", 0.2);
    auto [eeg, drive] = gen_mvar(coupling, emg.samples.size(), derive_seed(seed, 0x6d766172), emg.sample_rate);
    const double eeg_gain = eeg_rms / rms(eeg.samples);
    const double drive_gain = drive_fraction * plant.amplitude / rms(drive.samples);
    for (double& v : eeg.samples) v *= eeg_gain;
    for (std::size_t i = 0; i < emg.samples.size(); ++i) emg.samples[i] += drive_gain * drive.samples[i];
    eeg.channel = "EEG_AFF";
    emg.channel = "EMG_AFF";
    io::Recording rec;
    rec.channels = {eeg, emg};
    rec.subject = a.subject;
    rec.day = a.day;
    rec.state = io::RecordingState::training;
    io::write_recording(a.recording, rec, a.binary ? io::SampleEncoding::binary : io::SampleEncoding::text);
  }

  if (!a.table.empty()) {
    const std::string group = a.group.empty() ? to_string(session.mode) : a.group;
    io::ResultTable rows{
        Row{a.subject, a.day, group, "session_rests", static_cast<double>(log.rests), ""},
        Row{a.subject, a.day, group, "session_wall_clock", log.wall_clock, ""},
        Row{a.subject, a.day, group, "session_running", log.accumulated_running, ""},
    };
    if (const auto m = log.max_drop_rate()) rows.push_back(Row{a.subject, a.day, group, "session_max_drop_rate", *m, ""});
    io::write_table(a.table, rows, true);
  }

  out << to_string(session.mode) << ": " << log.rests << " rest(s), running " << log.accumulated_running
      << " s, wall clock " << log.wall_clock << " s" << (log.timed_out ? " (TIMEOUT)" : "") << "\n";
  return log.timed_out ? kExitData : kExitOk;
}

// ----------------------------------------------------------------------- lzc
struct LzcArgs {
  std::string input, output, channel = "EEG_AFF", group = "none";
  double epoch = 5.0;
  bool raw = false, append = false;
};

int cmd_lzc(const LzcArgs& a, const Common& common, std::ostream& out) {
  common.load();
  const auto rec = io::read_recording(a.input);
  const auto& ts = rec.channel(a.channel);
  auto epochs = segment(ts, a.epoch, a.epoch);
  flag_artifacts(epochs);
  apply_rejections(epochs, rec.annotations);
  std::vector<LzcResult> results;
  io::ResultTable rows;
  for (const auto& ep : epochs) {
    if (!ep.accepted()) continue;
    const auto r = lzc(ep);
    results.push_back(r);
    const std::string q = "channel=" + a.channel + ";epoch_start=" + io::format_double(r.epoch_start);
    rows.push_back(Row{rec.subject, rec.day, a.group, "lzc_raw", static_cast<double>(r.c_raw), q});
    rows.push_back(Row{rec.subject, rec.day, a.group, "lzc_norm", r.c_norm, q});
  }
  if (ts.duration() >= 240.0) {
    LzcDropConfig dc;
    dc.normalized = !a.raw;
    rows.push_back(Row{rec.subject, rec.day, a.group, "lzc_drop_rate",
                       lzc_drop_rate(results, ts.duration(), ts.t0, dc), "channel=" + a.channel});
  }
  io::write_table(a.output, rows, a.append);
  out << results.size() << " LZC epochs -> " << a.output << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------- psd-slope
struct SlopeArgs {
  std::string input, output, aff = "EEG_AFF", un, fit = "log-log", group = "none";
  bool append = false;
};

int cmd_psd_slope(const SlopeArgs& a, const Common& common, std::ostream& out) {
  common.load();
  SlopeConfig cfg;
  if (a.fit == "log-linear")
    cfg.fit = SlopeFit::log_linear;
  else if (a.fit != "log-log")
    throw UsageError("--fit must be log-log or log-linear");
  const auto rec = io::read_recording(a.input);
  io::ResultTable rows;
  const auto aff = psd_slope(rec.channel(a.aff), cfg, rec.annotations);
  const std::string fq = ";fit=" + a.fit;
  rows.push_back(Row{rec.subject, rec.day, a.group, "psd_slope", aff.slope, "hemisphere=aff" + fq});
  rows.push_back(Row{rec.subject, rec.day, a.group, "psd_slope_r2", aff.r2, "hemisphere=aff" + fq});
  if (!a.un.empty()) {
    const auto un = psd_slope(rec.channel(a.un), cfg, rec.annotations);
    rows.push_back(Row{rec.subject, rec.day, a.group, "psd_slope", un.slope, "hemisphere=un" + fq});
    rows.push_back(Row{rec.subject, rec.day, a.group, "psd_slope_r2", un.r2, "hemisphere=un" + fq});
    rows.push_back(Row{rec.subject, rec.day, a.group, "psd_slope_si", slope_si(aff.slope, un.slope), fq.substr(1)});
  }
  io::write_table(a.output, rows, a.append);
  out << "PSD slope (" << a.fit << ") aff=" << aff.slope << " -> " << a.output << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------- dcmc
struct DcmcArgs {
  std::string input, output, spectra, eeg = "EEG_AFF", emg = "EMG_AFF", group = "none";
  std::optional<int> order;
  bool select_order = false, rectify = false, append = false;
  std::vector<double> beta, gamma;
  std::optional<int> n_sim, block_trials;
};

int cmd_dcmc(const DcmcArgs& a, const Common& common, std::ostream& out) {
  const auto cfg_file = common.load();
  auto cfg = config::dcmc_config(cfg_file);
  const bool config_order = cfg_file.has("dcmc", "order");
  if (a.order)
    cfg.order = *a.order;
  else if (a.select_order)
    cfg.order.reset();
  else if (!config_order)
    throw UsageError("dcmc requires --order (or --select-order, or [dcmc] order in the config)");
  if (a.rectify) cfg.rectify_emg = true;
  if (a.n_sim) cfg.surrogate.n_sim = *a.n_sim;
  if (a.block_trials) cfg.trials_per_block = *a.block_trials;
  auto set_band = [&](const std::vector<double>& edges, const std::string& name) {
    if (edges.empty()) return;
    if (edges.size() != 2 || !(edges[0] < edges[1])) throw UsageError("--" + name + " needs LO,HI");
    for (auto& b : cfg.bands)
      if (b.name == name) {
        b.lo = edges[0];
        b.hi = edges[1];
      }
  };
  set_band(a.beta, "beta");
  set_band(a.gamma, "gamma");
  cfg.surrogate.seed = common.resolved_seed();

  const auto rec = io::read_recording(a.input);
  const auto result = dcmc::analyze_session(rec.channel(a.eeg), rec.channel(a.emg), cfg, rec.annotations);

  io::ResultTable rows;
  const std::string order_q = "order=" + std::to_string(result.order);
  std::map<double, std::size_t> thresholds;
  for (const auto& b : result.blocks)
    if (b.sig_threshold) thresholds.emplace(*b.sig_threshold, 0);
  for (const auto& [thr, unused] : thresholds)
    rows.push_back(Row{rec.subject, rec.day, a.group, "dcmc_threshold", thr, order_q});
  for (const auto& b : result.blocks)
    for (const auto& band : cfg.bands)
      for (auto dir : {dcmc::Direction::descending, dcmc::Direction::ascending})
        rows.push_back(Row{rec.subject, rec.day, a.group, "dcmc_block", dcmc::band_mean(b, band, dir),
                           "band=" + band.name + ";direction=" + dcmc::to_string(dir) +
                               ";block_start=" + io::format_double(b.start_time)});
  for (const auto& s : result.summaries) {
    const std::string q = "band=" + s.band.name + ";direction=" + dcmc::to_string(s.direction);
    rows.push_back(Row{rec.subject, rec.day, a.group, "dcmc_early", s.early_mean, q});
    rows.push_back(Row{rec.subject, rec.day, a.group, "dcmc_late", s.late_mean, q});
  }
  io::write_table(a.output, rows, a.append);
  if (!a.spectra.empty()) io::write_dcmc_spectra(a.spectra, result.blocks);
  out << result.blocks.size() << " dCMC blocks (order " << result.order << ", " << result.trials_rejected
      << " trial(s) rejected) -> " << a.output << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------- stats
struct StatsArgs {
  std::vector<std::string> inputs;
  std::string output, test, metric, factor = "group", band;
  std::vector<std::string> levels;
  std::optional<int> day;
  bool posthoc = false;
};

std::string factor_value(const Row& r, const std::string& factor) {
  if (factor == "group") return r.group;
  if (factor == "day") return std::to_string(r.day);
  if (factor == "subject") return r.subject;
  if (factor.rfind("qualifier:", 0) == 0) return qualifier(r, factor.substr(10));
  throw UsageError("unknown factor '" + factor + "' (group, day, subject or qualifier:<key>)");
}

int cmd_stats(const StatsArgs& a, const Common& common, std::ostream& out) {
  common.load();
  io::ResultTable rows;
  for (const auto& in : a.inputs) {
    auto t = io::read_table(in);
    rows.insert(rows.end(), t.begin(), t.end());
  }
  if (!io::is_registered_metric(a.metric)) throw RegistryError("unknown metric '" + a.metric + "'");
  std::erase_if(rows, [&](const Row& r) {
    return r.metric != a.metric || (a.day && r.day != *a.day) || (!a.band.empty() && qualifier(r, "band") != a.band);
  });
  if (rows.empty()) throw InsufficientDataError("no rows for metric '" + a.metric + "'");

  // levels in order of first appearance unless given explicitly
  std::vector<std::string> levels = a.levels;
  if (levels.empty())
    for (const auto& r : rows) {
      const auto v = factor_value(r, a.factor);
      if (std::find(levels.begin(), levels.end(), v) == levels.end()) levels.push_back(v);
    }
  auto values_of = [&](const std::string& level) {
    std::vector<double> v;
    for (const auto& r : rows)
      if (factor_value(r, a.factor) == level) v.push_back(r.value);
    return v;
  };

  std::vector<stats::StatResult> results;
  if (a.test == "ks") {
    std::vector<double> all;
    for (const auto& r : rows) all.push_back(r.value);
    results.push_back(stats::ks_normality(all));
  } else if (a.test == "ttest" || a.test == "ttest-paired" || a.test == "dominance") {
    if (a.test == "dominance" && a.levels.empty()) levels = {"descending", "ascending"};
    if (levels.size() < 2) throw InsufficientDataError("t-test needs two levels of " + a.factor);
    std::vector<double> x, y;
    if (a.test == "ttest-paired") {
      // pair observations by subject and day
      std::map<std::pair<std::string, int>, std::pair<std::optional<double>, std::optional<double>>> pairs;
      for (const auto& r : rows) {
        const auto v = factor_value(r, a.factor);
        auto& slot = pairs[{r.subject, r.day}];
        if (v == levels[0]) slot.first = r.value;
        if (v == levels[1]) slot.second = r.value;
      }
      for (const auto& [key, p] : pairs)
        if (p.first && p.second) {
          x.push_back(*p.first);
          y.push_back(*p.second);
        }
    } else {
      x = values_of(levels[0]);
      y = values_of(levels[1]);
    }
    if (a.test == "dominance") {
      const auto d = dcmc::dominance(x, y);
      stats::StatResult r = stats::t_test(x, y, false);
      r.test = "dominance";
      r.effect = dcmc::to_string(d.label);
      results.push_back(r);
    } else {
      auto r = stats::t_test(x, y, a.test == "ttest-paired");
      r.effect = levels[0] + "-" + levels[1];
      results.push_back(r);
    }
  } else if (a.test == "anova1") {
    std::vector<std::vector<double>> groups;
    for (const auto& l : levels) groups.push_back(values_of(l));
    const auto res = stats::anova_oneway(groups, a.posthoc);
    auto main = res.anova;
    main.effect = a.factor;
    results.push_back(main);
    for (std::size_t i = 0; i < levels.size() && a.posthoc; ++i)
      for (std::size_t j = i + 1; j < levels.size(); ++j) {
        stats::StatResult p;
        p.test = "bonferroni";
        p.effect = levels[i] + "|" + levels[j];
        p.statistic = stats::t_test(groups[i], groups[j], false).statistic;
        p.df1 = static_cast<double>(groups[i].size() + groups[j].size() - 2);
        p.p_value = res.posthoc[i][j];
        results.push_back(p);
      }
  } else if (a.test == "anova2") {
    // factor A = --factor, factor B = day
    std::vector<int> days;
    for (const auto& r : rows)
      if (std::find(days.begin(), days.end(), r.day) == days.end()) days.push_back(r.day);
    stats::TwoWayTable table(levels.size(), std::vector<std::vector<double>>(days.size()));
    for (const auto& r : rows) {
      const auto li = std::find(levels.begin(), levels.end(), factor_value(r, a.factor)) - levels.begin();
      const auto di = std::find(days.begin(), days.end(), r.day) - days.begin();
      if (static_cast<std::size_t>(li) < levels.size())
        table[static_cast<std::size_t>(li)][static_cast<std::size_t>(di)].push_back(r.value);
    }
    const auto res = stats::anova_twoway(table);
    auto fa = res.factor_a;
    fa.effect = a.factor;
    results.push_back(fa);
    if (res.factor_b) {
      auto fb = *res.factor_b;
      fb.effect = "day";
      results.push_back(fb);
    }
    if (res.interaction) {
      auto fi = *res.interaction;
      fi.effect = a.factor + "xday";
      results.push_back(fi);
    }
  } else {
    throw UsageError("unknown test '" + a.test + "' (ks, ttest, ttest-paired, anova1, anova2, dominance)");
  }
  io::write_stat_results(a.output, results);
  out << results.size() << " result row(s) -> " << a.output << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------- plot
struct PlotArgs {
  std::vector<std::string> inputs;
  std::string output, metric, x = "day", by = "group", title;
};

int cmd_plot(const PlotArgs& a, const Common& common, std::ostream& out) {
  common.load();
  io::ResultTable rows;
  for (const auto& in : a.inputs) {
    auto t = io::read_table(in);
    rows.insert(rows.end(), t.begin(), t.end());
  }
  std::erase_if(rows, [&](const Row& r) { return r.metric != a.metric; });
  if (rows.empty()) throw InsufficientDataError("no rows for metric '" + a.metric + "'");

  std::map<std::string, std::map<double, std::vector<double>>> series;
  for (const auto& r : rows) {
    const std::string xs = factor_value(r, a.x);
    double xv = 0.0;
    try {
      xv = std::stod(xs);
    } catch (const std::exception&) {
      throw DataError("x factor '" + a.x + "' is not numeric for a row");
    }
    series[factor_value(r, a.by)][xv].push_back(r.value);
  }
  plot::Figure fig;
  fig.title = a.title.empty() ? a.metric : a.title;
  fig.x_label = a.x;
  fig.y_label = a.metric;
  for (const auto& [name, points] : series) {
    plot::Series s;
    s.name = name;
    for (const auto& [xv, vals] : points) {
      const double m = stats::mean(vals);
      const double sem = vals.size() > 1 ? std::sqrt(stats::variance(vals) / static_cast<double>(vals.size())) : 0.0;
      s.points.push_back({xv, m, sem});
    }
    fig.series.push_back(std::move(s));
  }
  io::atomic_write(a.output, plot::render_svg(fig));
  out << "figure -> " << a.output << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"neuroloop: fatigue-controlled training simulation and EEG/EMG analysis"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");
  Common common;

  PreprocessArgs pre;
  auto* s_pre = app.add_subcommand("preprocess", "Resample, band-pass and notch every channel");
  s_pre->add_option("--input", pre.input)->required();
  s_pre->add_option("--output", pre.output)->required();
  s_pre->add_option("--target-rate", pre.target_rate);
  s_pre->add_flag("--binary", pre.binary, "Write float32 samples");
  add_common(s_pre, common);

  MpfArgs mpf_args;
  auto* s_mpf = app.add_subcommand("mpf", "EMG mean power frequency per window");
  s_mpf->add_option("--input", mpf_args.input)->required();
  s_mpf->add_option("--output", mpf_args.output)->required();
  s_mpf->add_option("--channel", mpf_args.channel);
  s_mpf->add_option("--window", mpf_args.window);
  s_mpf->add_option("--baseline", mpf_args.baseline, "per-bout or first-bout");
  s_mpf->add_option("--group", mpf_args.group);
  s_mpf->add_flag("--append", mpf_args.append);
  add_common(s_mpf, common);

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "Closed-loop training session against the EMG plant");
  s_sim->add_option("--mode", sim.mode, "fat-c or for-t");
  s_sim->add_option("--log", sim.log, "Session log (JSON lines)");
  s_sim->add_option("--recording", sim.recording, "Synthetic EEG/EMG recording of the running time");
  s_sim->add_option("--table", sim.table, "Append session summary rows to this table");
  s_sim->add_option("--group", sim.group);
  s_sim->add_option("--subject", sim.subject);
  s_sim->add_option("--day", sim.day);
  s_sim->add_flag("--binary", sim.binary);
  add_common(s_sim, common);

  LzcArgs lz;
  auto* s_lzc = app.add_subcommand("lzc", "Lempel-Ziv complexity per epoch and its drop rate");
  s_lzc->add_option("--input", lz.input)->required();
  s_lzc->add_option("--output", lz.output)->required();
  s_lzc->add_option("--channel", lz.channel);
  s_lzc->add_option("--epoch", lz.epoch);
  s_lzc->add_option("--group", lz.group);
  s_lzc->add_flag("--raw", lz.raw, "Drop rate from raw phrase counts");
  s_lzc->add_flag("--append", lz.append);
  add_common(s_lzc, common);

  SlopeArgs sl;
  auto* s_sl = app.add_subcommand("psd-slope", "Resting EEG PSD slope and symmetry index");
  s_sl->add_option("--input", sl.input)->required();
  s_sl->add_option("--output", sl.output)->required();
  s_sl->add_option("--aff", sl.aff);
  s_sl->add_option("--un", sl.un);
  s_sl->add_option("--fit", sl.fit, "log-log or log-linear");
  s_sl->add_option("--group", sl.group);
  s_sl->add_flag("--append", sl.append);
  add_common(s_sl, common);

  DcmcArgs dc;
  auto* s_dc = app.add_subcommand("dcmc", "Directed corticomuscular coherence");
  s_dc->add_option("--input", dc.input)->required();
  s_dc->add_option("--output", dc.output)->required();
  s_dc->add_option("--spectra", dc.spectra, "Per-block spectra table");
  s_dc->add_option("--eeg", dc.eeg);
  s_dc->add_option("--emg", dc.emg);
  s_dc->add_option("--order", dc.order);
  s_dc->add_flag("--select-order", dc.select_order, "Pick the order by information criterion");
  s_dc->add_option("--beta", dc.beta, "LO,HI")->delimiter(',')->expected(2);
  s_dc->add_option("--gamma", dc.gamma, "LO,HI")->delimiter(',')->expected(2);
  s_dc->add_option("--n-sim", dc.n_sim);
  s_dc->add_option("--block-trials", dc.block_trials);
  s_dc->add_option("--group", dc.group);
  s_dc->add_flag("--rectify", dc.rectify);
  s_dc->add_flag("--append", dc.append);
  add_common(s_dc, common);

  StatsArgs st;
  auto* s_st = app.add_subcommand("stats", "Statistical tests on result tables");
  s_st->add_option("--input", st.inputs)->required();
  s_st->add_option("--output", st.output)->required();
  s_st->add_option("--test", st.test, "ks, ttest, ttest-paired, anova1, anova2, dominance")->required();
  s_st->add_option("--metric", st.metric)->required();
  s_st->add_option("--factor", st.factor, "group, day, subject or qualifier:<key>");
  s_st->add_option("--levels", st.levels)->delimiter(',');
  s_st->add_option("--day", st.day);
  s_st->add_option("--band", st.band);
  s_st->add_flag("--posthoc", st.posthoc);
  add_common(s_st, common);

  PlotArgs pl;
  auto* s_pl = app.add_subcommand("plot", "Static SVG figure: mean +/- SEM per group");
  s_pl->add_option("--input", pl.inputs)->required();
  s_pl->add_option("--output", pl.output)->required();
  s_pl->add_option("--metric", pl.metric)->required();
  s_pl->add_option("--x", pl.x);
  s_pl->add_option("--by", pl.by);
  s_pl->add_option("--title", pl.title);
  add_common(s_pl, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    if (*s_pre) return cmd_preprocess(pre, common, out);
    if (*s_mpf) return cmd_mpf(mpf_args, common, out);
    if (*s_sim) return cmd_simulate(sim, common, out);
    if (*s_lzc) return cmd_lzc(lz, common, out);
    if (*s_sl) return cmd_psd_slope(sl, common, out);
    if (*s_dc) return cmd_dcmc(dc, common, out);
    if (*s_st) return cmd_stats(st, common, out);
    if (*s_pl) return cmd_plot(pl, common, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.is_usage()) {
      err << app.help();
      return kExitUsage;
    }
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace neuroloop
