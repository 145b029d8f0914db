#pragma once

#include <optional>
#include <span>
#include <vector>

#include "neuroloop/signal.hpp"

namespace neuroloop {

enum class BaselineRule {
  per_bout,         // baseline recomputed at the start of each running bout
  first_bout_only,  // baseline fixed by the first bout of the session
};

struct BaselineConfig {
  BaselineRule rule = BaselineRule::per_bout;
  int windows = 3;
};

struct MpfWindow {
  double window_start = 0.0;
  std::optional<double> mpf;        // empty when band power is zero (gap)
  std::optional<double> drop_rate;  // percent; empty for baseline windows and gaps
  bool is_baseline_window = false;
};

/// Mean power frequency: spectral centroid over [f_lo, f_hi] by trapezoidal
/// integration, with band edges interpolated onto the grid.
double mpf(const PowerSpectrum& spec, double f_lo = 60.0, double f_hi = 200.0);

/// 100 * (baseline - running) / baseline. Negative when MPF rose.
double mpf_drop_rate(double baseline, double running);

/// Streaming MPF evaluation, one value per window. Owns the baseline state of
/// the current running bout.
class MpfTracker {
public:
  explicit MpfTracker(BaselineConfig baseline = {}, SpectrumConfig spectrum = {},
                      double f_lo = 60.0, double f_hi = 200.0);

  MpfWindow push(std::span<const double> window, double sample_rate, double window_start);

  /// Called when running resumes after a rest.
  void start_bout();

  std::optional<double> baseline() const { return baseline_; }

private:
  BaselineConfig rule_;
  SpectrumConfig spectrum_;
  double f_lo_, f_hi_;
  int bout_ = 0;
  std::vector<double> pending_;  // baseline MPFs collected so far in this bout
  int baseline_windows_seen_ = 0;
  std::optional<double> baseline_;
};

/// Non-overlapping windows over a single running bout.
std::vector<MpfWindow> stream_mpf(const TimeSeries& ts, double window = 4.0,
                                  BaselineConfig baseline = {});

}  // namespace neuroloop
