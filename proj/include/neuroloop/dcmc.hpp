#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "neuroloop/signal.hpp"

namespace neuroloop::dcmc {

/// One EEG/EMG segment pair (typically 1 s). Channel 1 is EEG, channel 2 EMG.
struct TrialPair {
  std::vector<double> eeg;
  std::vector<double> emg;
  double start_time = 0.0;
};

/// Fitted bivariate AR model. coeffs[k-1](i, j) is the influence of channel j
/// at lag k on channel i.
struct MvarModel {
  std::vector<Eigen::Matrix2d> coeffs;
  double var1 = 0.0;  // EEG innovation variance
  double var2 = 0.0;  // EMG innovation variance
  double cov12 = 0.0;
  std::size_t n_trials = 0;
  std::size_t n_samples = 0;  // regression rows

  int order() const { return static_cast<int>(coeffs.size()); }
  double spectral_radius() const;
};

MvarModel fit_mvar(std::span<const TrialPair> trials, int order, bool center = true);

/// Order minimizing N*ln(det residual covariance) + 2*(4p) over [p_min, p_max].
int select_order(std::span<const TrialPair> trials, int p_min = 2, int p_max = 20);

/// Transfer function H(f) = A(f)^-1 with A(f) = I - sum_k A_k e^{-i 2 pi f k / fs}.
Eigen::Matrix2cd transfer_function(std::span<const Eigen::Matrix2d> coeffs, double freq,
                                   double sample_rate);

/// |DC_ij(f)|^2 for both rows; each row sums to one.
Eigen::Matrix2d directed_coherence_matrix(const MvarModel& model, double freq, double sample_rate);

struct DcmcResult {
  double start_time = 0.0;
  std::vector<double> freqs;
  std::vector<double> dc_desc;  // |DC|^2 EEG -> EMG
  std::vector<double> dc_asc;   // |DC|^2 EMG -> EEG
  std::optional<double> sig_threshold;
  std::vector<double> masked_desc, masked_asc;
  std::vector<double> norm_desc, norm_asc;
};

std::vector<double> default_freqs();  // 1..100 Hz, 1 Hz spacing

/// Raw spectra only. Throws StabilityError for an unstable model and
/// SingularError naming the frequency if A(f) cannot be inverted.
DcmcResult directed_coherence(const MvarModel& model, std::span<const double> freqs,
                              double sample_rate);

struct SurrogateConfig {
  int n_sim = 50;
  std::uint64_t seed = 0;
  double sample_rate = 1000.0;
  double percentile = 95.0;
  std::vector<double> freqs = default_freqs();
};

/// 95th percentile of |DC|^2 over all frequencies, both directions and all
/// simulations of independent unit-variance Gaussian trial sets.
double significance_threshold(std::size_t n_trials, std::size_t trial_len, int order,
                              const SurrogateConfig& cfg = {});

/// Masks sub-threshold bins to zero and divides the survivors by the largest
/// surviving value across both directions of this result.
DcmcResult mask_and_normalize(DcmcResult raw, double threshold);

/// Same, with masks taken per result and the normalization scale shared by
/// the whole trial set.
void mask_and_normalize(std::vector<DcmcResult>& results, std::span<const double> thresholds);

struct Band {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
};

inline Band beta_band() { return {"beta", 15.0, 30.0}; }
inline Band gamma_band() { return {"gamma", 30.0, 100.0}; }

enum class Direction { descending, ascending };

struct BandSummary {
  Band band;
  Direction direction = Direction::descending;
  double early_mean = 0.0;
  double late_mean = 0.0;
  std::size_t early_count = 0;
  std::size_t late_count = 0;
};

/// Early/late means of normalized in-band values. Results must be
/// time-ordered; start times are relative to the running trial.
std::array<BandSummary, 2> band_summary(std::span<const DcmcResult> results, const Band& band,
                                        double trial_duration, double trial_start = 0.0,
                                        double span = 120.0);

double band_mean(const DcmcResult& r, const Band& band, Direction dir);

enum class Dominance { descending, ascending, none };

struct DominanceResult {
  Dominance label = Dominance::none;
  double p_value = 1.0;
  double statistic = 0.0;
};

DominanceResult dominance(std::span<const double> desc_means, std::span<const double> asc_means,
                          double alpha = 0.05);

struct SessionConfig {
  std::optional<int> order = 10;  // empty: information-criterion selection
  int order_min = 2;
  int order_max = 20;
  double trial_seconds = 1.0;
  int trials_per_block = 10;
  bool rectify_emg = false;
  bool reject_artifacts = true;
  double mad_factor = 10.0;
  double span = 120.0;
  SurrogateConfig surrogate;
  std::vector<Band> bands{beta_band(), gamma_band()};
};

struct SessionResult {
  int order = 0;
  std::vector<DcmcResult> blocks;
  std::vector<BandSummary> summaries;
  std::size_t trials_total = 0;
  std::size_t trials_rejected = 0;
  std::size_t blocks_skipped = 0;  // empty or unstable
};

/// Full per-session pipeline: 1-s trials, block-wise fits, surrogate
/// thresholds, session-wide normalization and early/late band summaries.
SessionResult analyze_session(const TimeSeries& eeg, const TimeSeries& emg,
                              const SessionConfig& cfg, std::span<const Span> rejected = {});

std::vector<TrialPair> make_trials(const TimeSeries& eeg, const TimeSeries& emg, double trial_seconds);

std::string to_string(Direction d);
std::string to_string(Dominance d);

}  // namespace neuroloop::dcmc
