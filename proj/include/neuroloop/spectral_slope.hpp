#pragma once

#include <span>

#include "neuroloop/signal.hpp"

namespace neuroloop {

enum class SlopeFit {
  log_log,     // log10 power against log10 frequency
  log_linear,  // log10 power against frequency in Hz
};

struct SlopeConfig {
  double segment_seconds = 5.0;
  double f_lo = 2.0;
  double f_hi = 45.0;
  SlopeFit fit = SlopeFit::log_log;
  bool reject_artifacts = true;
  double mad_factor = 10.0;
  SpectrumConfig spectrum;
};

struct SlopeResult {
  double slope = 0.0;  // mean over segments
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n_segments = 0;  // segments that entered the mean
  std::size_t n_excluded = 0;  // rejected or zero-power segments
  SlopeFit fit = SlopeFit::log_log;
};

/// Straight-line least squares; returns {slope, intercept, r2}.
struct LineFit {
  double slope, intercept, r2;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

SlopeResult psd_slope(const TimeSeries& rest, const SlopeConfig& cfg = {},
                      std::span<const Span> rejected = {});

/// Interhemispheric symmetry index (aff - un) / (aff + un).
double slope_si(double slope_aff, double slope_un);

}  // namespace neuroloop
