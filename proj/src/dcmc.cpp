#include "neuroloop/dcmc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "neuroloop/error.hpp"
#include "neuroloop/random.hpp"
#include "neuroloop/stats.hpp"

namespace neuroloop::dcmc {
namespace {

using cplx = std::complex<double>;

struct NormalEquations {
  Eigen::MatrixXd zz;  // 2p x 2p
  Eigen::MatrixXd zy;  // 2p x 2
  Eigen::Matrix2d yy = Eigen::Matrix2d::Zero();
  std::size_t rows = 0;
};

std::vector<double> centered(const std::vector<double>& x) {
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [m](double v) { return v - m; });
  return out;
}

NormalEquations accumulate(std::span<const TrialPair> trials, int order, bool center) {
  const auto p = static_cast<std::size_t>(order);
  const Eigen::Index dim = 2 * order;
  NormalEquations ne;
  ne.zz = Eigen::MatrixXd::Zero(dim, dim);
  ne.zy = Eigen::MatrixXd::Zero(dim, 2);

  for (const auto& tr : trials) {
    if (tr.eeg.size() != tr.emg.size()) throw DataError("trial channels differ in length");
    if (tr.eeg.size() <= p) throw DataError("trial shorter than the model order");
    const auto x1 = center ? centered(tr.eeg) : tr.eeg;
    const auto x2 = center ? centered(tr.emg) : tr.emg;
    const std::size_t rows = x1.size() - p;
    Eigen::MatrixXd z(static_cast<Eigen::Index>(rows), dim);
    Eigen::MatrixXd y(static_cast<Eigen::Index>(rows), 2);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t t = r + p;
      const auto row = static_cast<Eigen::Index>(r);
      y(row, 0) = x1[t];
      y(row, 1) = x2[t];
      for (std::size_t k = 1; k <= p; ++k) {
        const auto col = static_cast<Eigen::Index>(2 * (k - 1));
        z(row, col) = x1[t - k];
        z(row, col + 1) = x2[t - k];
      }
    }
    ne.zz.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
    ne.zy.noalias() += z.transpose() * y;
    ne.yy.noalias() += y.transpose() * y;
    ne.rows += rows;
  }
  ne.zz = ne.zz.selfadjointView<Eigen::Lower>();
  return ne;
}

struct Solution {
  Eigen::MatrixXd b;            // 2p x 2
  Eigen::Matrix2d residual_cov;  // divided by rows
};

Solution solve(const NormalEquations& ne) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ne.zz, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  if (!(ev.maxCoeff() > 0.0) || ev.minCoeff() <= 1e-12 * ev.maxCoeff())
    throw SingularError("MVAR regression is rank deficient");
  Solution s;
  s.b = ne.zz.ldlt().solve(ne.zy);
  // Y'Y - B'Z'Y, the residual cross-product at the least-squares solution
  Eigen::Matrix2d res = ne.yy - s.b.transpose() * ne.zy;
  s.residual_cov = 0.5 * (res + res.transpose()) / static_cast<double>(ne.rows);
  return s;
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

double MvarModel::spectral_radius() const {
  const int p = order();
  if (p == 0) return 0.0;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(2 * p, 2 * p);
  for (int k = 0; k < p; ++k) companion.block<2, 2>(0, 2 * k) = coeffs[static_cast<std::size_t>(k)];
  if (p > 1) companion.block(2, 0, 2 * (p - 1), 2 * (p - 1)).setIdentity();
  return Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues().cwiseAbs().maxCoeff();
}

MvarModel fit_mvar(std::span<const TrialPair> trials, int order, bool center) {
  if (order <= 0) throw ConfigError("MVAR order must be positive");
  if (trials.empty()) throw InsufficientDataError("MVAR fit needs at least one trial");
  const auto ne = accumulate(trials, order, center);
  const auto sol = solve(ne);

  MvarModel m;
  m.coeffs.resize(static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k) {
    auto& a = m.coeffs[static_cast<std::size_t>(k)];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) a(i, j) = sol.b(2 * k + j, i);
  }
  m.var1 = sol.residual_cov(0, 0);
  m.var2 = sol.residual_cov(1, 1);
  m.cov12 = sol.residual_cov(0, 1);
  m.n_trials = trials.size();
  m.n_samples = ne.rows;
  if (!(m.var1 > 0.0) || !(m.var2 > 0.0)) throw SingularError("MVAR fit left zero residual variance");
  return m;
}

int select_order(std::span<const TrialPair> trials, int p_min, int p_max) {
  if (p_min < 1 || p_max < p_min) throw ConfigError("invalid order search range");
  int best = p_min;
  double best_score = std::numeric_limits<double>::infinity();
  for (int p = p_min; p <= p_max; ++p) {
    const auto ne = accumulate(trials, p, true);
    const auto sol = solve(ne);
    const auto rows = static_cast<double>(ne.rows);
    const double det = sol.residual_cov.determinant();
    if (!(det > 0.0)) continue;
    const double score = rows * std::log(det) + 2.0 * 4.0 * p;
    if (score < best_score) {
      best_score = score;
      best = p;
    }
  }
  return best;
}

Eigen::Matrix2cd transfer_function(std::span<const Eigen::Matrix2d> coeffs, double freq,
                                   double sample_rate) {
  Eigen::Matrix2cd a = Eigen::Matrix2cd::Identity();
  const double w = 2.0 * std::numbers::pi * freq / sample_rate;
  for (std::size_t k = 1; k <= coeffs.size(); ++k) {
    const cplx e = std::polar(1.0, -w * static_cast<double>(k));
    a -= coeffs[k - 1].cast<cplx>() * e;
  }
  const cplx det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  if (std::abs(det) < 1e-12)
    throw SingularError("A(f) is singular at " + std::to_string(freq) + " Hz");
  Eigen::Matrix2cd h;
  h << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
  return h / det;
}

Eigen::Matrix2d directed_coherence_matrix(const MvarModel& model, double freq, double sample_rate) {
  const auto h = transfer_function(model.coeffs, freq, sample_rate);
  const std::array<double, 2> var{model.var1, model.var2};
  Eigen::Matrix2d dc;
  for (int i = 0; i < 2; ++i) {
    const double denom = var[0] * std::norm(h(i, 0)) + var[1] * std::norm(h(i, 1));
    for (int j = 0; j < 2; ++j) dc(i, j) = var[static_cast<std::size_t>(j)] * std::norm(h(i, j)) / denom;
  }
  return dc;
}

std::vector<double> default_freqs() {
  std::vector<double> f(100);
  std::iota(f.begin(), f.end(), 1.0);
  return f;
}

DcmcResult directed_coherence(const MvarModel& model, std::span<const double> freqs,
                              double sample_rate) {
  if (!(model.spectral_radius() < 1.0))
    throw StabilityError("MVAR model is unstable; directed coherence undefined");
  DcmcResult r;
  r.freqs.assign(freqs.begin(), freqs.end());
  r.dc_desc.reserve(freqs.size());
  r.dc_asc.reserve(freqs.size());
  for (double f : freqs) {
    const auto dc = directed_coherence_matrix(model, f, sample_rate);
    r.dc_desc.push_back(dc(1, 0));  // EEG (1) into EMG row (2)
    r.dc_asc.push_back(dc(0, 1));   // EMG (2) into EEG row (1)
  }
  return r;
}

double significance_threshold(std::size_t n_trials, std::size_t trial_len, int order,
                              const SurrogateConfig& cfg) {
  if (cfg.n_sim < 2) throw ConfigError("surrogate threshold needs at least two simulations");
  if (n_trials == 0) throw ConfigError("surrogate threshold needs at least one trial");
  if (order <= 0) throw ConfigError("MVAR order must be positive");

  std::vector<double> pooled;
  pooled.reserve(static_cast<std::size_t>(cfg.n_sim) * cfg.freqs.size() * 2);
  std::vector<TrialPair> trials(n_trials);
  for (int sim = 0; sim < cfg.n_sim; ++sim) {
    GaussianSource gauss(derive_seed(cfg.seed, static_cast<std::uint64_t>(sim)));
    for (auto& tr : trials) {
      tr.eeg.resize(trial_len);
      tr.emg.resize(trial_len);
      for (std::size_t i = 0; i < trial_len; ++i) {
        tr.eeg[i] = gauss();
        tr.emg[i] = gauss();
      }
    }
    const auto model = fit_mvar(trials, order);
    for (double f : cfg.freqs) {
      const auto dc = directed_coherence_matrix(model, f, cfg.sample_rate);
      pooled.push_back(dc(1, 0));
      pooled.push_back(dc(0, 1));
    }
  }
  return percentile(std::move(pooled), cfg.percentile);
}

namespace {

void apply_mask(DcmcResult& r, double threshold) {
  auto mask = [threshold](const std::vector<double>& v) {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(),
                   [threshold](double x) { return x >= threshold ? x : 0.0; });
    return out;
  };
  r.sig_threshold = threshold;
  r.masked_desc = mask(r.dc_desc);
  r.masked_asc = mask(r.dc_asc);
}

double surviving_max(const DcmcResult& r) {
  double m = 0.0;
  for (double v : r.masked_desc) m = std::max(m, v);
  for (double v : r.masked_asc) m = std::max(m, v);
  return m;
}

void scale(DcmcResult& r, double peak) {
  auto div = [peak](const std::vector<double>& v) {
    std::vector<double> out(v.size(), 0.0);
    if (peak > 0.0) std::transform(v.begin(), v.end(), out.begin(), [peak](double x) { return x / peak; });
    return out;
  };
  r.norm_desc = div(r.masked_desc);
  r.norm_asc = div(r.masked_asc);
}

}  // namespace

DcmcResult mask_and_normalize(DcmcResult raw, double threshold) {
  apply_mask(raw, threshold);
  scale(raw, surviving_max(raw));
  return raw;
}

void mask_and_normalize(std::vector<DcmcResult>& results, std::span<const double> thresholds) {
  if (thresholds.size() != results.size()) throw ConfigError("one threshold per result is required");
  double peak = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    apply_mask(results[i], thresholds[i]);
    peak = std::max(peak, surviving_max(results[i]));
  }
  for (auto& r : results) scale(r, peak);
}

double band_mean(const DcmcResult& r, const Band& band, Direction dir) {
  const auto& v = dir == Direction::descending ? r.norm_desc : r.norm_asc;
  if (v.size() != r.freqs.size()) throw ConfigError("result has not been masked and normalized");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < r.freqs.size(); ++i) {
    if (r.freqs[i] >= band.lo && r.freqs[i] <= band.hi) {
      sum += v[i];
      ++n;
    }
  }
  if (n == 0) throw ConfigError("band " + band.name + " contains no grid frequencies");
  return sum / static_cast<double>(n);
}

std::array<BandSummary, 2> band_summary(std::span<const DcmcResult> results, const Band& band,
                                        double trial_duration, double trial_start, double span) {
  if (!(trial_duration >= 2.0 * span))
    throw InsufficientDataError("running duration shorter than the early and late spans");
  std::array<BandSummary, 2> out{BandSummary{band, Direction::descending},
                                 BandSummary{band, Direction::ascending}};
  const double late_start = trial_start + trial_duration - span;
  for (auto& s : out) {
    for (const auto& r : results) {
      const double v = band_mean(r, band, s.direction);
      if (r.start_time >= trial_start && r.start_time < trial_start + span) {
        s.early_mean += v;
        ++s.early_count;
      }
      if (r.start_time >= late_start && r.start_time < trial_start + trial_duration) {
        s.late_mean += v;
        ++s.late_count;
      }
    }
    if (s.early_count == 0 || s.late_count == 0)
      throw InsufficientDataError("no dCMC results in the early or late span");
    s.early_mean /= static_cast<double>(s.early_count);
    s.late_mean /= static_cast<double>(s.late_count);
  }
  return out;
}

DominanceResult dominance(std::span<const double> desc, std::span<const double> asc, double alpha) {
  const auto t = stats::t_test(desc, asc, false);
  DominanceResult r;
  r.p_value = t.p_value;
  r.statistic = t.statistic;
  if (t.p_value < alpha) r.label = t.statistic > 0.0 ? Dominance::descending : Dominance::ascending;
  return r;
}

std::vector<TrialPair> make_trials(const TimeSeries& eeg, const TimeSeries& emg, double trial_seconds) {
  if (eeg.sample_rate != emg.sample_rate || eeg.samples.size() != emg.samples.size())
    throw DataError("EEG and EMG channels must share rate and length");
  const auto e1 = segment(eeg, trial_seconds, trial_seconds);
  const auto e2 = segment(emg, trial_seconds, trial_seconds);
  std::vector<TrialPair> trials;
  trials.reserve(e1.size());
  for (std::size_t i = 0; i < e1.size(); ++i)
    trials.push_back(TrialPair{e1[i].samples, e2[i].samples, e1[i].start_time - eeg.t0});
  return trials;
}

SessionResult analyze_session(const TimeSeries& eeg, const TimeSeries& emg_in,
                              const SessionConfig& cfg, std::span<const Span> rejected) {
  eeg.validate();
  emg_in.validate();
  if (cfg.trials_per_block < 1) throw ConfigError("trials_per_block must be >= 1");
  TimeSeries emg = emg_in;
  if (cfg.rectify_emg)
    for (double& v : emg.samples) v = std::abs(v);

  auto eeg_epochs = segment(eeg, cfg.trial_seconds, cfg.trial_seconds);
  auto emg_epochs = segment(emg, cfg.trial_seconds, cfg.trial_seconds);
  if (cfg.reject_artifacts) {
    flag_artifacts(eeg_epochs, cfg.mad_factor);
    flag_artifacts(emg_epochs, cfg.mad_factor);
  }
  apply_rejections(eeg_epochs, rejected);
  apply_rejections(emg_epochs, rejected);

  SessionResult out;
  out.trials_total = eeg_epochs.size();
  const double block_len = cfg.trial_seconds * cfg.trials_per_block;
  std::map<long, std::vector<TrialPair>> blocks;
  for (std::size_t i = 0; i < eeg_epochs.size(); ++i) {
    if (!eeg_epochs[i].accepted() || !emg_epochs[i].accepted()) {
      ++out.trials_rejected;
      continue;
    }
    const double rel = eeg_epochs[i].start_time - eeg.t0;
    const long b = static_cast<long>(std::floor(rel / block_len + 1e-9));
    blocks[b].push_back(TrialPair{eeg_epochs[i].samples, emg_epochs[i].samples, rel});
  }
  if (blocks.empty()) throw InsufficientDataError("no accepted dCMC trials");

  if (cfg.order) {
    out.order = *cfg.order;
  } else {
    std::vector<TrialPair> all;
    for (const auto& [b, trials] : blocks) all.insert(all.end(), trials.begin(), trials.end());
    out.order = select_order(all, cfg.order_min, cfg.order_max);
  }

  const auto trial_len = static_cast<std::size_t>(std::llround(cfg.trial_seconds * eeg.sample_rate));
  SurrogateConfig surrogate = cfg.surrogate;
  surrogate.sample_rate = eeg.sample_rate;
  std::map<std::size_t, double> threshold_cache;
  std::vector<double> thresholds;
  for (const auto& [b, trials] : blocks) {
    DcmcResult r;
    try {
      r = directed_coherence(fit_mvar(trials, out.order), surrogate.freqs, eeg.sample_rate);
    } catch (const StabilityError&) {
      ++out.blocks_skipped;
      continue;
    } catch (const SingularError&) {
      ++out.blocks_skipped;
      continue;
    }
    r.start_time = static_cast<double>(b) * block_len;
    auto it = threshold_cache.find(trials.size());
    if (it == threshold_cache.end())
      it = threshold_cache
               .emplace(trials.size(), significance_threshold(trials.size(), trial_len, out.order, surrogate))
               .first;
    thresholds.push_back(it->second);
    out.blocks.push_back(std::move(r));
  }
  mask_and_normalize(out.blocks, thresholds);

  const double duration = eeg.duration();
  if (duration >= 2.0 * cfg.span) {
    for (const auto& band : cfg.bands) {
      const auto s = band_summary(out.blocks, band, duration, 0.0, cfg.span);
      out.summaries.insert(out.summaries.end(), s.begin(), s.end());
    }
  }
  return out;
}

std::string to_string(Direction d) { return d == Direction::descending ? "descending" : "ascending"; }

std::string to_string(Dominance d) {
  switch (d) {
    case Dominance::descending: return "descending";
    case Dominance::ascending: return "ascending";
    case Dominance::none: return "none";
  }
  return "none";
}

}  // namespace neuroloop::dcmc
