#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "neuroloop/random.hpp"
#include "neuroloop/signal.hpp"
#include "../src/fft.hpp"

#ifndef NEUROLOOP_GOLDEN_DIR
#error "NEUROLOOP_GOLDEN_DIR must be defined"
#endif

namespace testing {

using Golden = std::map<std::string, std::vector<double>>;

inline std::filesystem::path golden_path(const std::string& name) {
  return std::filesystem::path(NEUROLOOP_GOLDEN_DIR) / name;
}

inline Golden load_golden(const std::string& name) {
  std::ifstream in(golden_path(name));
  if (!in) throw std::runtime_error("missing golden file " + name);
  Golden g;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    double v;
    while (ls >> v) g[key].push_back(v);
  }
  return g;
}

// Exhaustive LZ76 parse: each phrase is the shortest substring starting at i
// that does not occur anywhere earlier (occurrence may overlap the phrase).
inline std::size_t lz76_bruteforce(const std::vector<std::uint8_t>& s) {
  const std::size_t n = s.size();
  std::size_t count = 0, i = 0;
  while (i < n) {
    std::size_t len = 1;
    for (;;) {
      if (i + len > n) break;
      bool seen = false;
      for (std::size_t j = 0; j < i && !seen; ++j) {
        bool eq = true;
        for (std::size_t k = 0; k < len && eq; ++k) eq = s[j + k] == s[i + k];
        seen = eq;
      }
      if (!seen) break;
      ++len;
    }
    ++count;
    i += len;
  }
  return count;
}

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  neuroloop::GaussianSource g(seed);
  std::vector<double> x(n);
  for (double& v : x) v = sd * g();
  return x;
}

inline std::vector<double> tone(std::size_t n, double freq, double fs, double amp = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / fs + phase);
  return x;
}

// Noise with power ~ 1/f^exponent, synthesized in the frequency domain with
// Gaussian complex coefficients (DC removed).
inline std::vector<double> power_law_noise(std::size_t n, double fs, double exponent, std::uint64_t seed) {
  neuroloop::GaussianSource g(seed);
  std::vector<std::complex<double>> spec(n / 2 + 1);
  for (std::size_t k = 1; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    const double amp = std::pow(f, -exponent / 2.0);
    const double re = g(), im = g();
    spec[k] = {amp * re, amp * im};
  }
  if (n % 2 == 0) spec.back() = {spec.back().real(), 0.0};
  return neuroloop::fft::irfft(spec, n);
}

inline neuroloop::TimeSeries series(std::vector<double> x, double fs, std::string channel = "X") {
  neuroloop::TimeSeries ts;
  ts.samples = std::move(x);
  ts.sample_rate = fs;
  ts.channel = std::move(channel);
  return ts;
}

inline neuroloop::PowerSpectrum grid_spectrum(double df, double f_max, double (*shape)(double)) {
  neuroloop::PowerSpectrum s;
  s.df = df;
  for (double f = 0.0; f <= f_max + 1e-9; f += df) {
    s.freqs.push_back(f);
    s.power.push_back(shape(f));
  }
  return s;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& x) {
    std::vector<std::size_t> idx(x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j);
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) ma += ra[i], mb += rb[i];
  ma /= static_cast<double>(ra.size());
  mb /= static_cast<double>(rb.size());
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace testing
