#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "neuroloop/signal.hpp"

namespace neuroloop {

/// Fatiguing-muscle EMG plant. The spectrum is a Gaussian bump whose centroid
/// over the MPF analysis band moves affinely from baseline_centroid (rested)
/// to min_centroid (fully fatigued).
struct PlantConfig {
  double baseline_centroid = 150.0;  // Hz
  double min_centroid = 90.0;        // Hz
  double fatigue_gain = 0.002;       // level per second of running
  double recovery_rate = 0.01;       // 1/s, exponential decay while resting
  std::array<double, 2> noise_bandwidth{20.0, 450.0};
  double amplitude = 50.0;  // µV RMS
  double sample_rate = 1000.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct FatigueState {
  double level = 0.0;  // [0, 1]
};

// Spectral bump width and the band over which the plant's centroid is defined.
inline constexpr double kPlantBumpStd = 25.0;
inline constexpr double kCentroidBandLo = 60.0;
inline constexpr double kCentroidBandHi = 200.0;

FatigueState plant_step(FatigueState s, const PlantConfig& cfg, bool running, double dt);

double plant_centroid(const FatigueState& s, const PlantConfig& cfg);

/// Band-limited Gaussian EMG for one call. Deterministic in (cfg.seed, call_index).
TimeSeries gen_emg(const FatigueState& s, const PlantConfig& cfg, double duration,
                   std::uint64_t call_index = 0);

/// Bivariate AR process X(t) = sum_k A_k X(t-k) + E(t). Channel 1 is EEG,
/// channel 2 is EMG; A_k(i, j) is the influence of channel j on channel i.
struct MvarSpec {
  std::vector<Eigen::Matrix2d> coeffs;
  double var1 = 1.0;
  double var2 = 1.0;

  int order() const { return static_cast<int>(coeffs.size()); }
  double spectral_radius() const;
  void validate() const;
};

std::pair<TimeSeries, TimeSeries> gen_mvar(const MvarSpec& spec, std::size_t n_samples,
                                           std::uint64_t seed, double sample_rate = 1000.0);

}  // namespace neuroloop
