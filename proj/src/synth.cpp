#include "neuroloop/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <boost/math/tools/toms748_solve.hpp>

#include "fft.hpp"
#include "neuroloop/error.hpp"
#include "neuroloop/random.hpp"

namespace neuroloop {

void PlantConfig::validate() const {
  if (!(kCentroidBandLo <= min_centroid && min_centroid < baseline_centroid &&
        baseline_centroid <= kCentroidBandHi))
    throw ConfigError("plant centroids must satisfy 60 <= min < baseline <= 200");
  if (!(fatigue_gain >= 0.0) || !(recovery_rate >= 0.0))
    throw ConfigError("plant rates must be non-negative");
  if (!(noise_bandwidth[0] >= 0.0 && noise_bandwidth[0] < kCentroidBandLo &&
        noise_bandwidth[1] > kCentroidBandHi && noise_bandwidth[1] <= sample_rate / 2.0))
    throw ConfigError("plant noise bandwidth must enclose the 60-200 Hz band and stay below Nyquist");
  if (!(amplitude > 0.0)) throw ConfigError("plant amplitude must be positive");
}

FatigueState plant_step(FatigueState s, const PlantConfig& cfg, bool running, double dt) {
  if (!(dt > 0.0)) throw DomainError("plant step needs dt > 0");
  if (running)
    s.level = std::min(1.0, s.level + cfg.fatigue_gain * dt);
  else
    s.level = s.level * std::exp(-cfg.recovery_rate * dt);
  s.level = std::clamp(s.level, 0.0, 1.0);
  return s;
}

double plant_centroid(const FatigueState& s, const PlantConfig& cfg) {
  const double level = std::clamp(s.level, 0.0, 1.0);
  return cfg.baseline_centroid - level * (cfg.baseline_centroid - cfg.min_centroid);
}

namespace {

double bump(double f, double center) {
  const double z = (f - center) / kPlantBumpStd;
  return std::exp(-0.5 * z * z);
}

// Centroid over the analysis band of the bump sampled on the FFT grid.
double grid_centroid(double center, double df, std::size_t nbins) {
  double m = 0.0, p = 0.0;
  for (std::size_t k = 0; k < nbins; ++k) {
    const double f = static_cast<double>(k) * df;
    if (f < kCentroidBandLo || f > kCentroidBandHi) continue;
    const double w = bump(f, center);
    m += f * w;
    p += w;
  }
  return m / p;
}

// Bump center whose truncated centroid equals the target.
double solve_center(double target, double df, std::size_t nbins) {
  auto f = [&](double c) { return grid_centroid(c, df, nbins) - target; };
  double lo = target - 150.0, hi = target + 150.0;
  const double flo = f(lo), fhi = f(hi);
  if (flo >= 0.0) return lo;
  if (fhi <= 0.0) return hi;
  std::uintmax_t iters = 100;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50),
                                                   iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

TimeSeries gen_emg(const FatigueState& s, const PlantConfig& cfg, double duration,
                   std::uint64_t call_index) {
  cfg.validate();
  if (!(duration > 0.0)) throw DomainError("EMG duration must be positive");
  const auto n = static_cast<std::size_t>(std::llround(duration * cfg.sample_rate));
  if (n < 2) throw DomainError("EMG duration shorter than two samples");

  GaussianSource gauss(derive_seed(cfg.seed, call_index));
  std::vector<double> white(n);
  for (double& v : white) v = gauss();

  auto spec = fft::rfft(white);
  const double df = cfg.sample_rate / static_cast<double>(n);
  const double center = solve_center(plant_centroid(s, cfg), df, spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * df;
    const bool inside = f >= cfg.noise_bandwidth[0] && f <= cfg.noise_bandwidth[1];
    spec[k] *= inside ? std::sqrt(bump(f, center)) : 0.0;
  }
  auto x = fft::irfft(spec, n);
  const double r = rms(x);
  if (r > 0.0)
    for (double& v : x) v *= cfg.amplitude / r;
  return TimeSeries{std::move(x), cfg.sample_rate, "EMG_AFF", 0.0};
}

double MvarSpec::spectral_radius() const {
  const int p = order();
  if (p == 0) return 0.0;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(2 * p, 2 * p);
  for (int k = 0; k < p; ++k) companion.block<2, 2>(0, 2 * k) = coeffs[static_cast<std::size_t>(k)];
  if (p > 1) companion.block(2, 0, 2 * (p - 1), 2 * (p - 1)).setIdentity();
  return Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues().cwiseAbs().maxCoeff();
}

void MvarSpec::validate() const {
  if (!(var1 > 0.0) || !(var2 > 0.0)) throw ConfigError("innovation variances must be positive");
  if (!(spectral_radius() < 1.0)) throw StabilityError("MVAR spec is unstable (spectral radius >= 1)");
}

std::pair<TimeSeries, TimeSeries> gen_mvar(const MvarSpec& spec, std::size_t n_samples,
                                           std::uint64_t seed, double sample_rate) {
  spec.validate();
  const auto p = static_cast<std::size_t>(spec.order());
  if (n_samples <= 10 * p || n_samples == 0)
    throw ConfigError("gen_mvar needs more than 10*order samples");

  const std::size_t burn = 10 * p;
  const std::size_t total = n_samples + burn;
  std::vector<Eigen::Vector2d> x(total, Eigen::Vector2d::Zero());
  GaussianSource gauss(derive_seed(seed, 0));
  const double s1 = std::sqrt(spec.var1), s2 = std::sqrt(spec.var2);
  for (std::size_t t = 0; t < total; ++t) {
    Eigen::Vector2d v(s1 * gauss(), s2 * gauss());
    for (std::size_t k = 1; k <= p && k <= t; ++k) v += spec.coeffs[k - 1] * x[t - k];
    x[t] = v;
  }

  TimeSeries eeg{std::vector<double>(n_samples), sample_rate, "EEG_AFF", 0.0};
  TimeSeries emg{std::vector<double>(n_samples), sample_rate, "EMG_AFF", 0.0};
  for (std::size_t i = 0; i < n_samples; ++i) {
    eeg.samples[i] = x[burn + i](0);
    emg.samples[i] = x[burn + i](1);
  }
  return {std::move(eeg), std::move(emg)};
}

}  // namespace neuroloop
