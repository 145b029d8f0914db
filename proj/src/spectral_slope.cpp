#include "neuroloop/spectral_slope.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "neuroloop/error.hpp"

namespace neuroloop {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() != y.size() || x.size() < 2) throw InsufficientDataError("line fit needs two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("line fit with constant abscissa");
  const double slope = sxy / sxx;
  const double r2 = syy > 0.0 ? std::min(1.0, sxy * sxy / (sxx * syy)) : 1.0;
  return {slope, my - slope * mx, r2};
}

SlopeResult psd_slope(const TimeSeries& rest, const SlopeConfig& cfg, std::span<const Span> rejected) {
  rest.validate();
  if (rest.duration() < cfg.segment_seconds)
    throw InsufficientDataError("resting recording shorter than one slope segment");
  auto epochs = segment(rest, cfg.segment_seconds, cfg.segment_seconds);
  if (cfg.reject_artifacts) flag_artifacts(epochs, cfg.mad_factor);
  apply_rejections(epochs, rejected);

  SlopeResult out;
  out.fit = cfg.fit;
  for (const auto& ep : epochs) {
    if (!ep.accepted()) {
      ++out.n_excluded;
      continue;
    }
    const auto ps = periodogram(ep, cfg.spectrum);
    std::vector<double> xs, ys;
    bool zero_bin = false;
    for (std::size_t k = 0; k < ps.freqs.size(); ++k) {
      const double f = ps.freqs[k];
      if (f < cfg.f_lo - 1e-9 || f > cfg.f_hi + 1e-9) continue;
      if (!(ps.power[k] > 0.0)) {
        zero_bin = true;
        break;
      }
      xs.push_back(cfg.fit == SlopeFit::log_log ? std::log10(f) : f);
      ys.push_back(std::log10(ps.power[k]));
    }
    if (zero_bin || xs.size() < 2) {
      ++out.n_excluded;
      continue;
    }
    const auto line = fit_line(xs, ys);
    out.slope += line.slope;
    out.intercept += line.intercept;
    out.r2 += line.r2;
    ++out.n_segments;
  }
  if (out.n_segments == 0) throw InsufficientDataError("every slope segment was excluded");
  const auto n = static_cast<double>(out.n_segments);
  out.slope /= n;
  out.intercept /= n;
  out.r2 /= n;
  return out;
}

double slope_si(double slope_aff, double slope_un) {
  const double denom = slope_aff + slope_un;
  if (denom == 0.0) throw DomainError("symmetry index undefined: slopes sum to zero");
  return (slope_aff - slope_un) / denom;
}

}  // namespace neuroloop
