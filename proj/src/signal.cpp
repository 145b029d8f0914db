#include "neuroloop/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "fft.hpp"
#include "neuroloop/error.hpp"

namespace neuroloop {
namespace {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

double prewarp(double f, double fs) { return 2.0 * fs * std::tan(pi * f / fs); }

cplx bilinear(cplx s, double fs) { return (2.0 * fs + s) / (2.0 * fs - s); }

// Upper-half-plane poles of the analog Butterworth low-pass prototype.
std::vector<cplx> prototype_poles(int order) {
  std::vector<cplx> poles;
  for (int k = 1; k <= order / 2; ++k) {
    const double theta = pi * (2.0 * k + order - 1) / (2.0 * order);
    poles.push_back(std::polar(1.0, theta));
  }
  return poles;
}

Biquad section_from_pole(cplx z_pole, double b0, double b1, double b2) {
  return Biquad{b0, b1, b2, -2.0 * z_pole.real(), std::norm(z_pole)};
}

cplx biquad_response(const Biquad& q, cplx z) {
  const cplx zi = 1.0 / z;
  return (q.b0 + q.b1 * zi + q.b2 * zi * zi) / (1.0 + q.a1 * zi + q.a2 * zi * zi);
}

void check_design(int order, double lo, double hi, double fs) {
  if (order < 2 || order % 2 != 0) throw ConfigError("filter order must be even and >= 2");
  if (!(fs > 0.0)) throw ConfigError("sample rate must be positive");
  if (!(lo > 0.0 && lo < hi && hi < fs / 2.0))
    throw ConfigError("filter edges must satisfy 0 < lo < hi < Nyquist");
}

// Continued-fraction approximation of a positive ratio.
std::pair<long, long> rational_approx(double ratio, long max_den = 10000) {
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double x = ratio;
  for (int iter = 0; iter < 64; ++iter) {
    const long a = static_cast<long>(std::floor(x));
    const long h2 = a * h1 + h0;
    const long k2 = a * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - ratio) <= 1e-12 * ratio) break;
    const double frac = x - static_cast<double>(a);
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  return {h1, k1};
}

std::vector<double> kaiser_lowpass(std::size_t half, double cutoff, double gain) {
  // cutoff in cycles/sample
  constexpr double beta = 5.0;
  const std::size_t ntaps = 2 * half + 1;
  std::vector<double> h(ntaps);
  const double denom = std::cyl_bessel_i(0.0, beta);
  for (std::size_t j = 0; j < ntaps; ++j) {
    const double m = static_cast<double>(j) - static_cast<double>(half);
    const double r = m / static_cast<double>(half);
    const double window = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / denom;
    const double arg = 2.0 * cutoff * m;
    const double sinc = m == 0.0 ? 1.0 : std::sin(pi * arg) / (pi * arg);
    h[j] = gain * 2.0 * cutoff * sinc * window;
  }
  return h;
}

std::vector<double> detrended(std::span<const double> x, Detrend mode) {
  std::vector<double> out(x.begin(), x.end());
  const double n = static_cast<double>(out.size());
  if (mode == Detrend::constant) {
    const double mean = std::accumulate(out.begin(), out.end(), 0.0) / n;
    for (double& v : out) v -= mean;
  } else if (mode == Detrend::linear && out.size() > 1) {
    double st = 0, sx = 0, stt = 0, stx = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double t = static_cast<double>(i);
      st += t;
      sx += out[i];
      stt += t * t;
      stx += t * out[i];
    }
    const double slope = (n * stx - st * sx) / (n * stt - st * st);
    const double icpt = (sx - slope * st) / n;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= icpt + slope * static_cast<double>(i);
  }
  return out;
}

}  // namespace

void TimeSeries::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
    throw ConfigError("sample_rate must be positive for channel '" + channel + "'");
  if (samples.empty()) throw DataError("time series '" + channel + "' is empty");
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (!std::isfinite(samples[i]))
      throw DataError("non-finite sample at index " + std::to_string(i) + " in '" + channel + "'");
}

SosFilter butter_bandpass(int order, double lo, double hi, double fs) {
  check_design(order, lo, hi, fs);
  const double wl = prewarp(lo, fs), wh = prewarp(hi, fs);
  const double bw = wh - wl, w0sq = wl * wh;
  const double center = 2.0 * std::atan(std::sqrt(w0sq) / (2.0 * fs));
  const cplx zc = std::polar(1.0, center);

  SosFilter sos;
  for (cplx p : prototype_poles(order)) {
    const cplx half = p * bw / 2.0;
    const cplx root = std::sqrt(half * half - w0sq);
    for (cplx s : {half + root, half - root}) {
      Biquad q = section_from_pole(bilinear(s, fs), 1.0, 0.0, -1.0);
      const double g = 1.0 / std::abs(biquad_response(q, zc));
      q.b0 *= g;
      q.b2 *= g;
      sos.push_back(q);
    }
  }
  return sos;
}

SosFilter butter_bandstop(int order, double lo, double hi, double fs) {
  check_design(order, lo, hi, fs);
  const double wl = prewarp(lo, fs), wh = prewarp(hi, fs);
  const double bw = wh - wl, w0sq = wl * wh;
  const double center = 2.0 * std::atan(std::sqrt(w0sq) / (2.0 * fs));
  const double c = -2.0 * std::cos(center);

  SosFilter sos;
  for (cplx p : prototype_poles(order)) {
    const cplx root = std::sqrt(bw * bw - 4.0 * p * p * w0sq);
    for (cplx s : {(bw + root) / (2.0 * p), (bw - root) / (2.0 * p)}) {
      Biquad q = section_from_pole(bilinear(s, fs), 1.0, c, 1.0);
      const double g = 1.0 / std::abs(biquad_response(q, cplx(1.0, 0.0)));
      q.b0 *= g;
      q.b1 *= g;
      q.b2 *= g;
      sos.push_back(q);
    }
  }
  return sos;
}

std::complex<double> sos_response(const SosFilter& sos, double freq, double fs) {
  const cplx z = std::polar(1.0, 2.0 * pi * freq / fs);
  cplx h = 1.0;
  for (const auto& q : sos) h *= biquad_response(q, z);
  return h;
}

namespace {

void run_sections(const SosFilter& sos, std::vector<double>& x, bool steady_state) {
  double level = x.empty() ? 0.0 : x.front();
  for (const auto& q : sos) {
    double z1 = 0.0, z2 = 0.0;
    if (steady_state) {
      const double g = (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
      z2 = (q.b2 - q.a2 * g) * level;
      z1 = (q.b1 - q.a1 * g) * level + z2;
      level *= g;
    }
    for (double& v : x) {
      const double in = v;
      const double y = q.b0 * in + z1;
      z1 = q.b1 * in - q.a1 * y + z2;
      z2 = q.b2 * in - q.a2 * y;
      v = y;
    }
  }
}

}  // namespace

std::vector<double> sos_filter(const SosFilter& sos, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  run_sections(sos, y, false);
  return y;
}

namespace {

// Burg estimate of prediction coefficients d: x[t] ~ sum_k d[k] x[t-1-k].
std::vector<double> burg(std::span<const double> x, std::size_t order) {
  const std::size_t n = x.size();
  std::vector<double> d, prev;
  if (n < 2) return d;
  std::vector<double> f(x.begin() + 1, x.end()), b(x.begin(), x.end() - 1);
  double energy = 0.0;
  for (double v : x) energy += v * v;
  for (std::size_t k = 0; k < order && k + 1 < n; ++k) {
    const std::size_t m = n - 1 - k;
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      num += f[j] * b[j];
      den += f[j] * f[j] + b[j] * b[j];
    }
    if (!(den > 1e-24 * energy)) break;
    const double refl = 2.0 * num / den;
    prev = d;
    d.push_back(refl);
    for (std::size_t i = 0; i < k; ++i) d[i] = prev[i] - refl * prev[k - 1 - i];
    for (std::size_t j = 0; j + 1 < m; ++j) {
      const double fj = f[j + 1] - refl * b[j + 1];
      const double bj = b[j] - refl * f[j];
      f[j] = fj;
      b[j] = bj;
    }
    f.resize(m - 1);
    b.resize(m - 1);
  }
  return d;
}

// `pad` samples continuing x past its end.
std::vector<double> extrapolate(std::span<const double> x, std::size_t pad) {
  const std::size_t len = std::min<std::size_t>(x.size(), 2000);
  const auto tail = x.subspan(x.size() - len);
  const double mu = std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(len);
  std::vector<double> hist(len);
  for (std::size_t i = 0; i < len; ++i) hist[i] = tail[i] - mu;
  const auto d = burg(hist, std::min<std::size_t>(32, len / 4));
  std::vector<double> out;
  out.reserve(pad);
  for (std::size_t t = 0; t < pad; ++t) {
    double v = 0.0;
    for (std::size_t k = 0; k < d.size() && k < hist.size(); ++k) v += d[k] * hist[hist.size() - 1 - k];
    hist.push_back(v);
    out.push_back(v + mu);
  }
  return out;
}

}  // namespace

std::vector<double> sos_filtfilt(const SosFilter& sos, std::span<const double> x, EdgePadding padding) {
  const std::size_t n = x.size();
  if (n < 2) return {x.begin(), x.end()};
  // Long enough for the narrow notch transients to settle at 1 kHz.
  const std::size_t pad = std::min(n - 1, std::max<std::size_t>(6 * sos.size() + 3, 1000));

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  if (padding == EdgePadding::predictive && n >= 8) {
    std::vector<double> rev(x.rbegin(), x.rend());
    const auto head = extrapolate(rev, pad);
    ext.assign(head.rbegin(), head.rend());
    ext.insert(ext.end(), x.begin(), x.end());
    const auto tail = extrapolate(x, pad);
    ext.insert(ext.end(), tail.begin(), tail.end());
  } else {
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);
  }

  run_sections(sos, ext, true);
  std::reverse(ext.begin(), ext.end());
  run_sections(sos, ext, true);
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
          ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

TimeSeries resample(const TimeSeries& ts, double target_rate) {
  ts.validate();
  if (!(target_rate > 0.0)) throw ConfigError("target rate must be positive");
  if (target_rate == ts.sample_rate) return ts;

  const auto [up, down] = rational_approx(target_rate / ts.sample_rate);
  if (up <= 0 || down <= 0 ||
      std::abs(static_cast<double>(up) / static_cast<double>(down) * ts.sample_rate - target_rate) >
          1e-9 * target_rate)
    throw ConfigError("no rational resampling ratio for the requested rates");

  const std::size_t L = static_cast<std::size_t>(up), M = static_cast<std::size_t>(down);
  const std::size_t half = 10 * std::max(L, M);
  const auto h = kaiser_lowpass(half, 0.5 / static_cast<double>(std::max(L, M)),
                                static_cast<double>(L));

  const std::size_t n = ts.samples.size();
  const std::size_t n_out = (n * L + M - 1) / M;
  TimeSeries out{std::vector<double>(n_out), target_rate, ts.channel, ts.t0};
  const auto& x = ts.samples;
  for (std::size_t k = 0; k < n_out; ++k) {
    // Position in the zero-stuffed stream, advanced by the filter delay.
    const std::size_t t = k * M + half;
    // Input samples i with 0 <= t - i*L <= 2*half.
    const std::size_t i_hi = std::min(n - 1, t / L);
    const std::size_t i_lo = t >= 2 * half ? (t - 2 * half + L - 1) / L : 0;
    double acc = 0.0;
    for (std::size_t i = i_lo; i <= i_hi; ++i) acc += x[i] * h[t - i * L];
    out.samples[k] = acc;
  }
  return out;
}

TimeSeries preprocess(const TimeSeries& ts, const PreprocessConfig& cfg) {
  if (!(cfg.target_rate >= 2.0 * cfg.band_hi))
    throw ConfigError("target rate must be at least twice the upper passband edge");
  if (!(cfg.notch_hi < cfg.target_rate / 2.0))
    throw ConfigError("notch band must lie below the target Nyquist frequency");
  ts.validate();

  TimeSeries out = resample(ts, cfg.target_rate);
  const auto bp = butter_bandpass(cfg.order, cfg.band_lo, cfg.band_hi, cfg.target_rate);
  const auto bs = butter_bandstop(cfg.order, cfg.notch_lo, cfg.notch_hi, cfg.target_rate);
  out.samples = sos_filtfilt(bp, out.samples, EdgePadding::predictive);
  out.samples = sos_filtfilt(bs, out.samples, EdgePadding::predictive);
  return out;
}

std::vector<Epoch> segment(const TimeSeries& ts, double epoch_len, double hop) {
  if (!(epoch_len > 0.0) || !(hop > 0.0)) throw ConfigError("epoch length and hop must be positive");
  const auto len = static_cast<std::size_t>(std::llround(epoch_len * ts.sample_rate));
  const auto step = static_cast<std::size_t>(std::llround(hop * ts.sample_rate));
  if (len == 0 || step == 0) throw ConfigError("epoch length or hop shorter than one sample");
  const std::size_t n = ts.samples.size();
  if (n < len)
    throw InsufficientDataError("series '" + ts.channel + "' is shorter than one epoch");

  std::vector<Epoch> epochs;
  const std::size_t count = (n - len) / step + 1;
  epochs.reserve(count);
  for (std::size_t e = 0; e < count; ++e) {
    const auto first = ts.samples.begin() + static_cast<std::ptrdiff_t>(e * step);
    epochs.push_back(Epoch{ts.channel,
                           ts.t0 + static_cast<double>(e * step) / ts.sample_rate,
                           std::vector<double>(first, first + static_cast<std::ptrdiff_t>(len)),
                           ts.sample_rate, Quality::accepted});
  }
  return epochs;
}

double median(std::vector<double> x) {
  if (x.empty()) throw InsufficientDataError("median of empty sample");
  const auto mid = x.begin() + static_cast<std::ptrdiff_t>(x.size() / 2);
  std::nth_element(x.begin(), mid, x.end());
  if (x.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(x.begin(), mid);
  return 0.5 * (lower + upper);
}

std::size_t flag_artifacts(std::vector<Epoch>& epochs, double mad_factor) {
  std::size_t rejected = 0;
  for (auto& ep : epochs) {
    if (ep.samples.empty()) continue;
    const double med = median(ep.samples);
    std::vector<double> dev(ep.samples.size());
    std::transform(ep.samples.begin(), ep.samples.end(), dev.begin(),
                   [med](double v) { return std::abs(v - med); });
    const double mad = median(dev);
    const double limit = mad_factor * mad;
    const bool bad = std::any_of(dev.begin(), dev.end(), [limit](double d) { return d > limit; });
    if (bad && mad > 0.0) {
      ep.quality = Quality::rejected;
      ++rejected;
    }
  }
  return rejected;
}

std::size_t apply_rejections(std::vector<Epoch>& epochs, std::span<const Span> rejected) {
  std::size_t count = 0;
  for (auto& ep : epochs) {
    const double end = ep.start_time + ep.duration();
    for (const auto& span : rejected) {
      if (span.start < end && span.end > ep.start_time) {
        if (ep.accepted()) ++count;
        ep.quality = Quality::rejected;
        break;
      }
    }
  }
  return count;
}

PowerSpectrum periodogram(const Epoch& epoch, const SpectrumConfig& cfg) {
  if (!epoch.accepted()) throw DataError("periodogram of a rejected epoch");
  return periodogram(epoch.samples, epoch.sample_rate, cfg);
}

PowerSpectrum periodogram(std::span<const double> x, double fs, const SpectrumConfig& cfg) {
  if (!(fs > 0.0)) throw ConfigError("sample rate must be positive");
  if (!(cfg.segment_seconds > 0.0) || !(cfg.overlap >= 0.0 && cfg.overlap < 1.0))
    throw ConfigError("invalid spectrum configuration");
  const auto nseg = static_cast<std::size_t>(std::llround(cfg.segment_seconds * fs));
  if (nseg < 2 || x.size() < nseg)
    throw InsufficientDataError("epoch shorter than the spectral sub-segment");
  const std::size_t step =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(nseg * (1.0 - cfg.overlap))));

  // periodic Hann
  std::vector<double> window(nseg);
  double wss = 0.0;
  for (std::size_t i = 0; i < nseg; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(nseg));
    wss += window[i] * window[i];
  }

  const std::size_t nbins = nseg / 2 + 1;
  PowerSpectrum ps;
  ps.df = fs / static_cast<double>(nseg);
  ps.freqs.resize(nbins);
  ps.power.assign(nbins, 0.0);
  for (std::size_t k = 0; k < nbins; ++k) ps.freqs[k] = static_cast<double>(k) * ps.df;

  std::size_t count = 0;
  for (std::size_t start = 0; start + nseg <= x.size(); start += step, ++count) {
    auto seg = detrended(x.subspan(start, nseg), cfg.detrend);
    for (std::size_t i = 0; i < nseg; ++i) seg[i] *= window[i];
    const auto spec = fft::rfft(seg);
    for (std::size_t k = 0; k < nbins; ++k) ps.power[k] += std::norm(spec[k]);
  }

  const double scale = 1.0 / (fs * wss * static_cast<double>(count));
  for (std::size_t k = 0; k < nbins; ++k) {
    const bool edge = k == 0 || (nseg % 2 == 0 && k == nbins - 1);
    ps.power[k] *= scale * (edge ? 1.0 : 2.0);
  }
  return ps;
}

double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

}  // namespace neuroloop
