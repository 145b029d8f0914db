#include "neuroloop/complexity.hpp"

#include <algorithm>
#include <cmath>

#include "neuroloop/error.hpp"

namespace neuroloop {

std::size_t lz76_phrases(std::span<const std::uint8_t> s) {
  const std::size_t n = s.size();
  if (n == 0) return 0;
  if (n == 1) return 1;

  // l: start of the current phrase; i: candidate start in the history;
  // k: current match length; kmax: longest match found for this phrase.
  std::size_t c = 1, l = 1, i = 0, k = 1, kmax = 1;
  while (true) {
    if (s[i + k - 1] == s[l + k - 1]) {
      ++k;
      if (l + k > n) {
        ++c;
        break;
      }
    } else {
      kmax = std::max(k, kmax);
      ++i;
      if (i == l) {
        ++c;
        l += kmax;
        if (l + 1 > n) break;
        i = 0;
        k = 1;
        kmax = 1;
      } else {
        k = 1;
      }
    }
  }
  return c;
}

std::vector<std::uint8_t> binarize_median(std::span<const double> x) {
  const double m = median(std::vector<double>(x.begin(), x.end()));
  std::vector<std::uint8_t> bits(x.size());
  std::transform(x.begin(), x.end(), bits.begin(), [m](double v) { return v > m ? 1 : 0; });
  return bits;
}

LzcResult lzc(const Epoch& epoch) {
  if (!epoch.accepted()) throw DataError("LZC of a rejected epoch");
  const std::size_t n = epoch.samples.size();
  if (n < 2) throw DomainError("LZC needs at least two samples");
  const auto bits = binarize_median(epoch.samples);
  LzcResult r;
  r.epoch_start = epoch.start_time;
  r.c_raw = lz76_phrases(bits);
  const double dn = static_cast<double>(n);
  r.c_norm = static_cast<double>(r.c_raw) * std::log2(dn) / dn;
  return r;
}

double lzc_drop_rate(std::span<const LzcResult> epochs, double trial_duration, double trial_start,
                     const LzcDropConfig& cfg) {
  if (!(trial_duration >= 2.0 * cfg.span))
    throw InsufficientDataError("trial shorter than the two comparison spans");
  const double late_start = trial_start + trial_duration - cfg.span;
  double begin = 0.0, end = 0.0;
  std::size_t nb = 0, ne = 0;
  for (const auto& e : epochs) {
    const double v = cfg.normalized ? e.c_norm : static_cast<double>(e.c_raw);
    if (e.epoch_start >= trial_start && e.epoch_start < trial_start + cfg.span) {
      begin += v;
      ++nb;
    }
    if (e.epoch_start >= late_start && e.epoch_start < trial_start + trial_duration) {
      end += v;
      ++ne;
    }
  }
  if (nb == 0 || ne == 0) throw InsufficientDataError("no accepted epochs in the first or last span");
  begin /= static_cast<double>(nb);
  end /= static_cast<double>(ne);
  return 100.0 * (begin - end) / begin;
}

}  // namespace neuroloop
