#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace neuroloop {

/// Uniformly sampled single-channel signal. Samples are in microvolts.
struct TimeSeries {
  std::vector<double> samples;
  double sample_rate = 0.0;  // Hz
  std::string channel;
  double t0 = 0.0;  // seconds from session start

  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }

  /// Throws DataError / ConfigError if the invariants do not hold.
  void validate() const;
};

enum class Quality { accepted, rejected };

struct Epoch {
  std::string channel;
  double start_time = 0.0;
  std::vector<double> samples;
  double sample_rate = 0.0;
  Quality quality = Quality::accepted;

  bool accepted() const { return quality == Quality::accepted; }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

/// One-sided power spectral density on a uniform grid starting at 0 Hz.
struct PowerSpectrum {
  std::vector<double> freqs;
  std::vector<double> power;  // µV²/Hz
  double df = 0.0;
};

struct PreprocessConfig {
  double target_rate = 1000.0;
  double band_lo = 2.0;
  double band_hi = 200.0;
  double notch_lo = 49.0;
  double notch_hi = 51.0;
  int order = 4;  // Butterworth prototype order, even
};

enum class Detrend { none, constant, linear };

struct SpectrumConfig {
  double segment_seconds = 1.0;
  double overlap = 0.5;
  Detrend detrend = Detrend::constant;
};

// A cascade of second-order sections, each {b0, b1, b2, a1, a2} with a0 = 1.
struct Biquad {
  double b0, b1, b2, a1, a2;
};
using SosFilter = std::vector<Biquad>;

SosFilter butter_bandpass(int order, double lo, double hi, double sample_rate);
SosFilter butter_bandstop(int order, double lo, double hi, double sample_rate);

/// Complex response of the cascade at `freq` Hz.
std::complex<double> sos_response(const SosFilter& sos, double freq, double sample_rate);

/// Causal filtering with zero initial state.
std::vector<double> sos_filter(const SosFilter& sos, std::span<const double> x);

enum class EdgePadding {
  odd,         // 2*x[edge] - mirrored samples
  predictive,  // Burg AR extrapolation; continues narrowband content smoothly
};

/// Zero-phase forward-backward filtering with edge padding and steady-state
/// initial conditions.
std::vector<double> sos_filtfilt(const SosFilter& sos, std::span<const double> x,
                                 EdgePadding padding = EdgePadding::odd);

/// Polyphase rational resampling with a Kaiser-windowed anti-alias low-pass.
TimeSeries resample(const TimeSeries& ts, double target_rate);

/// Resample, band-pass and notch. Output keeps t0 and channel.
TimeSeries preprocess(const TimeSeries& ts, const PreprocessConfig& cfg = {});

/// Fixed-length windows; the trailing partial window is dropped.
std::vector<Epoch> segment(const TimeSeries& ts, double epoch_len, double hop);

/// Marks an epoch rejected when any |x - median| exceeds `mad_factor` times the
/// epoch's median absolute deviation. Returns the number of rejected epochs.
std::size_t flag_artifacts(std::vector<Epoch>& epochs, double mad_factor = 10.0);

struct Span {
  double start = 0.0;
  double end = 0.0;
};

/// Marks epochs overlapping any annotated span as rejected.
std::size_t apply_rejections(std::vector<Epoch>& epochs, std::span<const Span> rejected);

/// Averaged tapered periodogram (Hann window, overlapping sub-segments).
PowerSpectrum periodogram(const Epoch& epoch, const SpectrumConfig& cfg = {});
PowerSpectrum periodogram(std::span<const double> x, double sample_rate,
                          const SpectrumConfig& cfg = {});

double rms(std::span<const double> x);
double median(std::vector<double> x);

}  // namespace neuroloop
