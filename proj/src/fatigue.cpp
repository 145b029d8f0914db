#include "neuroloop/fatigue.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "neuroloop/error.hpp"

namespace neuroloop {

double mpf(const PowerSpectrum& spec, double f_lo, double f_hi) {
  const auto& f = spec.freqs;
  const auto& s = spec.power;
  if (f.size() != s.size() || f.size() < 2) throw ConfigError("malformed power spectrum");
  if (!(f_lo < f_hi)) throw ConfigError("MPF band must satisfy f_lo < f_hi");
  if (f.front() > f_lo || f.back() < f_hi) throw ConfigError("spectrum grid does not cover the MPF band");

  auto interp = [&](double x) {
    const auto it = std::lower_bound(f.begin(), f.end(), x);
    const auto i = static_cast<std::size_t>(it - f.begin());
    if (f[i] == x) return s[i];
    const double w = (x - f[i - 1]) / (f[i] - f[i - 1]);
    return s[i - 1] + w * (s[i] - s[i - 1]);
  };

  std::vector<double> xs{f_lo}, ys{interp(f_lo)};
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] > f_lo && f[i] < f_hi) {
      xs.push_back(f[i]);
      ys.push_back(s[i]);
    }
  }
  xs.push_back(f_hi);
  ys.push_back(interp(f_hi));

  double moment = 0.0, power = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double h = xs[i] - xs[i - 1];
    power += 0.5 * h * (ys[i] + ys[i - 1]);
    moment += 0.5 * h * (xs[i] * ys[i] + xs[i - 1] * ys[i - 1]);
  }
  if (!(power > 0.0)) throw DomainError("MPF undefined: zero power in band");
  return moment / power;
}

double mpf_drop_rate(double baseline, double running) {
  if (!(baseline > 0.0)) throw DomainError("MPF baseline must be positive");
  return 100.0 * (baseline - running) / baseline;
}

MpfTracker::MpfTracker(BaselineConfig baseline, SpectrumConfig spectrum, double f_lo, double f_hi)
    : rule_(baseline), spectrum_(spectrum), f_lo_(f_lo), f_hi_(f_hi) {
  if (rule_.windows < 1) throw ConfigError("baseline needs at least one window");
}

void MpfTracker::start_bout() {
  ++bout_;
  if (rule_.rule == BaselineRule::per_bout) {
    baseline_.reset();
    pending_.clear();
    baseline_windows_seen_ = 0;
  }
}

MpfWindow MpfTracker::push(std::span<const double> window, double sample_rate, double window_start) {
  MpfWindow out;
  out.window_start = window_start;
  try {
    out.mpf = mpf(periodogram(window, sample_rate, spectrum_), f_lo_, f_hi_);
  } catch (const DomainError&) {
    // flagged gap
  }

  const bool collecting = baseline_windows_seen_ < rule_.windows &&
                          (rule_.rule == BaselineRule::per_bout || bout_ == 0);
  if (collecting) {
    out.is_baseline_window = true;
    ++baseline_windows_seen_;
    if (out.mpf) pending_.push_back(*out.mpf);
    if (baseline_windows_seen_ == rule_.windows && !pending_.empty())
      baseline_ = std::accumulate(pending_.begin(), pending_.end(), 0.0) /
                  static_cast<double>(pending_.size());
    return out;
  }
  if (out.mpf && baseline_) out.drop_rate = mpf_drop_rate(*baseline_, *out.mpf);
  return out;
}

std::vector<MpfWindow> stream_mpf(const TimeSeries& ts, double window, BaselineConfig baseline) {
  ts.validate();
  if (!(window > 0.0)) throw ConfigError("MPF window must be positive");
  const auto len = static_cast<std::size_t>(std::llround(window * ts.sample_rate));
  if (len == 0 || ts.samples.size() < len)
    throw InsufficientDataError("series shorter than one MPF window");

  MpfTracker tracker(baseline);
  std::vector<MpfWindow> out;
  const std::span<const double> all(ts.samples);
  for (std::size_t start = 0; start + len <= all.size(); start += len) {
    const double t = ts.t0 + static_cast<double>(start) / ts.sample_rate;
    out.push_back(tracker.push(all.subspan(start, len), ts.sample_rate, t));
  }
  return out;
}

}  // namespace neuroloop
