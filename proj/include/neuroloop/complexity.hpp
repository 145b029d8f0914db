#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "neuroloop/signal.hpp"

namespace neuroloop {

struct LzcResult {
  double epoch_start = 0.0;
  std::size_t c_raw = 0;  // number of LZ76 phrases
  double c_norm = 0.0;    // c_raw * log2(n) / n
};

/// LZ76 phrase count with exhaustive history (Kaspar-Schuster scan).
std::size_t lz76_phrases(std::span<const std::uint8_t> bits);

/// 1 where sample > median, else 0.
std::vector<std::uint8_t> binarize_median(std::span<const double> x);

LzcResult lzc(const Epoch& epoch);

struct LzcDropConfig {
  double span = 120.0;  // seconds at each end of the trial
  bool normalized = true;
};

/// 100 * (begin - end) / begin where begin/end are the mean complexities of the
/// epochs lying in the first and last `span` seconds of the trial.
double lzc_drop_rate(std::span<const LzcResult> trial_epochs, double trial_duration,
                     double trial_start = 0.0, const LzcDropConfig& cfg = {});

}  // namespace neuroloop
