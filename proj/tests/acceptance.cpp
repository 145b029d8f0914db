// Acceptance suite. Usage: neuroloop_acceptance <criterion 1-10> [...]
// Prints one PASS/FAIL line per criterion; exit status is non-zero if any fail.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <unistd.h>

#include "neuroloop/cli.hpp"
#include "neuroloop/complexity.hpp"
#include "neuroloop/controller.hpp"
#include "neuroloop/dcmc.hpp"
#include "neuroloop/fatigue.hpp"
#include "neuroloop/io.hpp"
#include "neuroloop/spectral_slope.hpp"
#include "neuroloop/stats.hpp"
#include "neuroloop/synth.hpp"
#include "support.hpp"

using namespace neuroloop;
namespace fs = std::filesystem;

namespace {

// ---- pinned tolerances ------------------------------------------------------
constexpr double kFlatTol = 1e-6;
constexpr double kRampTol = 0.5;
constexpr double kC1Seconds = 1.0;

constexpr int kC2Sessions = 200;
constexpr double kC2RunLo = 1800.0, kC2RunHi = 1804.0;
constexpr double kC2Seconds = 30.0;

constexpr int kC3Seeds = 100;
constexpr double kC3MinFraction = 0.99;

constexpr std::size_t kC4MaxLen = 16;
constexpr double kC4Seconds = 60.0;

constexpr int kC5Specs = 1000;
constexpr double kC5Tol = 1e-9;

constexpr int kC6Seeds = 100;
constexpr int kC6MinPass = 95;
constexpr std::size_t kC6Trials = 120;
constexpr int kC6Order = 10;
constexpr double kC6Seconds = 300.0;

constexpr int kC7Replicates = 200;
constexpr int kC7Sims = 50;
constexpr std::size_t kC7Trials = 10;  // one analysis block
constexpr double kC7Target = 0.05, kC7Tol = 0.03;

constexpr int kC8Seeds = 50;
constexpr double kC8BrownTol = 0.15, kC8WhiteTol = 0.1;

constexpr double kC9Tol = 1e-8;
constexpr double kC9FtTol = 1e-9;
// -----------------------------------------------------------------------------

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// EEG AR(2) resonant at 20 Hz driving EMG at lag 2; nothing flows back.
MvarSpec unidirectional(double gain) {
  const double r = 0.95, theta = 2.0 * std::numbers::pi * 20.0 / 1000.0;
  Eigen::Matrix2d a1, a2;
  a1 << 2.0 * r * std::cos(theta), 0.0, 0.0, 0.3;
  a2 << -r * r, 0.0, gain, 0.0;
  MvarSpec s;
  s.coeffs = {a1, a2};
  return s;
}

// 1. analytic centroids
Outcome c1() {
  const auto t0 = Clock::now();
  const auto flat = testing::grid_spectrum(0.25, 500.0, [](double) { return 1.0; });
  const auto ramp = testing::grid_spectrum(1.0, 500.0, [](double f) { return f; });
  const double oracle = ((200.0 * 200.0 * 200.0 - 60.0 * 60.0 * 60.0) / 3.0) / ((200.0 * 200.0 - 60.0 * 60.0) / 2.0);
  const double m_flat = mpf(flat), m_ramp = mpf(ramp);
  const double dt = seconds_since(t0);
  return {std::abs(m_flat - 130.0) <= kFlatTol && std::abs(m_ramp - oracle) <= kRampTol && dt < kC1Seconds,
          fmt("flat %.9f Hz (want 130 +/- %g), ramp %.4f Hz (oracle %.4f +/- %g), %.3f s", m_flat, kFlatTol, m_ramp,
              oracle, kRampTol, dt)};
}

// 2. controller protocol conformance
Outcome c2() {
  const auto t0 = Clock::now();
  SessionConfig cfg;
  PlantConfig plant;
  int bad_rest = 0, bad_gate = 0, bad_total = 0, rests = 0;
  for (int s = 0; s < kC2Sessions; ++s) {
    const auto log = run_session(cfg, plant, static_cast<std::uint64_t>(s));
    std::optional<double> rest_at;
    bool must_rest = false;
    for (const auto& e : log.events) {
      switch (e.kind) {
        case EventKind::rest_start:
          rest_at = e.t;
          must_rest = false;
          ++rests;
          break;
        case EventKind::rest_end:
          if (!rest_at || e.t - *rest_at != cfg.rest_duration) ++bad_rest;
          rest_at.reset();
          break;
        case EventKind::window_evaluated:
          if (must_rest) ++bad_gate;
          if (e.drop_rate && *e.drop_rate >= cfg.threshold) must_rest = true;
          break;
        default:
          break;
      }
    }
    if (log.timed_out || log.accumulated_running < kC2RunLo || log.accumulated_running > kC2RunHi) ++bad_total;
  }
  const double dt = seconds_since(t0);
  return {bad_rest == 0 && bad_gate == 0 && bad_total == 0 && rests > 0 && dt < kC2Seconds,
          fmt("%d sessions, %d rests; bad rest lengths %d, ungated windows %d, running outside [%g, %g] %d; %.1f s",
              kC2Sessions, rests, bad_rest, bad_gate, kC2RunLo, kC2RunHi, bad_total, dt)};
}

// 3. fatigue bounding
Outcome c3() {
  SessionConfig fat_c, for_t;
  for_t.mode = TrainingMode::for_t;
  PlantConfig plant;
  int ok = 0;
  for (int s = 0; s < kC3Seeds; ++s) {
    const auto a = run_session(fat_c, plant, static_cast<std::uint64_t>(s)).max_drop_rate();
    const auto b = run_session(for_t, plant, static_cast<std::uint64_t>(s)).max_drop_rate();
    ok += a && b && *a <= *b;
  }
  const double frac = static_cast<double>(ok) / kC3Seeds;
  return {frac >= kC3MinFraction, fmt("FAT-C max drop <= FOR-T max drop in %d/%d seeds (need >= %.0f%%)", ok,
                                      kC3Seeds, 100.0 * kC3MinFraction)};
}

// 4. LZ76 oracle equivalence
Outcome c4() {
  const auto t0 = Clock::now();
  std::size_t checked = 0, mismatched = 0;
  for (std::size_t n = 1; n <= kC4MaxLen; ++n)
    for (std::uint32_t code = 0; code < (1u << n); ++code) {
      std::vector<std::uint8_t> b(n);
      for (std::size_t i = 0; i < n; ++i) b[i] = (code >> i) & 1u;
      mismatched += lz76_phrases(b) != testing::lz76_bruteforce(b);
      ++checked;
    }
  const double dt = seconds_since(t0);
  return {mismatched == 0 && dt < kC4Seconds,
          fmt("%zu strings of length 1..%zu, %zu mismatches, %.1f s", checked, kC4MaxLen, mismatched, dt)};
}

// 5. directed coherence row normalization
Outcome c5() {
  GaussianSource rng(derive_seed(5, 5));
  double worst = 0.0;
  int specs = 0;
  while (specs < kC5Specs) {
    dcmc::MvarModel m;
    const int p = 1 + static_cast<int>(rng.uniform() * 12);
    for (int k = 0; k < p; ++k) {
      Eigen::Matrix2d a;
      a << rng(), rng(), rng(), rng();
      m.coeffs.push_back(a * (0.6 / p));
    }
    m.var1 = 0.1 + 3.0 * rng.uniform();
    m.var2 = 0.1 + 3.0 * rng.uniform();
    if (m.spectral_radius() >= 0.99) continue;
    ++specs;
    for (int f = 1; f <= 100; ++f) {
      const auto dc = dcmc::directed_coherence_matrix(m, f, 1000.0);
      worst = std::max({worst, std::abs(dc.row(0).sum() - 1.0), std::abs(dc.row(1).sum() - 1.0)});
    }
  }
  return {worst <= kC5Tol, fmt("%d stable specs x 100 frequencies, max |row sum - 1| = %.3g (tol %g)", specs, worst, kC5Tol)};
}

// 6. direction specificity
Outcome c6() {
  const auto t0 = Clock::now();
  const auto spec = unidirectional(1.0);
  const auto beta = dcmc::beta_band();
  int desc_ok = 0, asc_ok = 0;
  for (int s = 0; s < kC6Seeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    const auto [eeg, emg] = gen_mvar(spec, kC6Trials * 1000, derive_seed(seed, 1));
    const auto trials = dcmc::make_trials(eeg, emg, 1.0);
    const auto model = dcmc::fit_mvar(trials, kC6Order);
    dcmc::SurrogateConfig sc;
    sc.seed = derive_seed(seed, 2);
    const double thr = dcmc::significance_threshold(kC6Trials, 1000, kC6Order, sc);
    const auto r = dcmc::mask_and_normalize(dcmc::directed_coherence(model, sc.freqs, 1000.0), thr);
    bool desc = false, asc_zero = true;
    for (std::size_t i = 0; i < r.freqs.size(); ++i) {
      if (r.freqs[i] >= beta.lo && r.freqs[i] <= beta.hi && r.masked_desc[i] > 0.0) desc = true;
      if (r.masked_asc[i] != 0.0) asc_zero = false;
    }
    desc_ok += desc;
    asc_ok += asc_zero;
  }
  const double dt = seconds_since(t0);
  return {desc_ok >= kC6MinPass && asc_ok >= kC6MinPass && dt < kC6Seconds,
          fmt("descending significant in beta %d/%d, ascending all-zero %d/%d (need >= %d each), %.0f s", desc_ok,
              kC6Seeds, asc_ok, kC6Seeds, kC6MinPass, dt)};
}

// 7. surrogate calibration
Outcome c7() {
  std::size_t above = 0, total = 0;
  for (int rep = 0; rep < kC7Replicates; ++rep) {
    const auto seed = static_cast<std::uint64_t>(rep);
    dcmc::SurrogateConfig sc;
    sc.n_sim = kC7Sims;
    sc.seed = derive_seed(seed, 7);
    const double thr = dcmc::significance_threshold(kC7Trials, 1000, kC6Order, sc);
    MvarSpec white;
    white.coeffs = {Eigen::Matrix2d::Zero()};
    const auto [a, b] = gen_mvar(white, kC7Trials * 1000, derive_seed(seed, 70));
    const auto r = dcmc::directed_coherence(dcmc::fit_mvar(dcmc::make_trials(a, b, 1.0), kC6Order), sc.freqs, 1000.0);
    for (std::size_t i = 0; i < r.freqs.size(); ++i) {
      above += (r.dc_desc[i] >= thr) + (r.dc_asc[i] >= thr);
      total += 2;
    }
  }
  const double frac = static_cast<double>(above) / static_cast<double>(total);
  return {std::abs(frac - kC7Target) <= kC7Tol,
          fmt("%.2f%% of %zu fresh null bins at or above threshold (want %.0f%% +/- %.0f%%)", 100.0 * frac, total,
              100.0 * kC7Target, 100.0 * kC7Tol)};
}

// 8. PSD slope recovery
Outcome c8() {
  double brown = 0.0, white = 0.0;
  for (int s = 0; s < kC8Seeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    brown += psd_slope(testing::series(testing::power_law_noise(60000, 1000.0, 2.0, derive_seed(seed, 1)), 1000.0)).slope;
    white += psd_slope(testing::series(testing::white_noise(60000, derive_seed(seed, 2)), 1000.0)).slope;
  }
  brown /= kC8Seeds;
  white /= kC8Seeds;
  GaussianSource rng(8);
  bool antisym = true;
  for (int i = 0; i < 10000; ++i) {
    const double a = rng() - 2.0, b = rng() - 2.0;
    if (std::abs(a + b) > 1e-6) antisym = antisym && slope_si(a, b) == -slope_si(b, a);
  }
  return {std::abs(brown + 2.0) <= kC8BrownTol && std::abs(white) <= kC8WhiteTol && antisym,
          fmt("1/f^2 mean slope %.4f (want -2 +/- %g), white %.4f (want 0 +/- %g), SI antisymmetry %s", brown,
              kC8BrownTol, white, kC8WhiteTol, antisym ? "exact" : "broken")};
}

// 9. statistics oracle parity
Outcome c9() {
  const auto g = testing::load_golden("stats.txt");
  double worst = 0.0;
  auto cmp = [&](double got, double want) { worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want))); };

  const auto u = stats::t_test(g.at("data.a"), g.at("data.b"), false);
  cmp(u.statistic, g.at("ttest_unpaired")[0]);
  cmp(u.p_value, g.at("ttest_unpaired")[1]);
  const auto p = stats::t_test(g.at("data.a"), g.at("data.b"), true);
  cmp(p.statistic, g.at("ttest_paired")[0]);
  cmp(p.p_value, g.at("ttest_paired")[1]);

  const auto one = stats::anova_oneway({g.at("data.g0"), g.at("data.g1"), g.at("data.g2")}, true);
  cmp(one.anova.statistic, g.at("anova1")[0]);
  cmp(one.anova.p_value, g.at("anova1")[1]);
  cmp(one.posthoc[0][1], g.at("bonferroni.01")[0]);
  cmp(one.posthoc[0][2], g.at("bonferroni.02")[0]);
  cmp(one.posthoc[1][2], g.at("bonferroni.12")[0]);

  stats::TwoWayTable t(2, std::vector<std::vector<double>>(3));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 3; ++b) t[a][b] = g.at("data.cell" + std::to_string(a) + std::to_string(b));
  const auto two = stats::anova_twoway(t);
  cmp(two.factor_a.statistic, g.at("anova2.A")[0]);
  cmp(two.factor_a.p_value, g.at("anova2.A")[1]);
  cmp(two.factor_b->statistic, g.at("anova2.B")[0]);
  cmp(two.factor_b->p_value, g.at("anova2.B")[1]);
  cmp(two.interaction->statistic, g.at("anova2.AB")[0]);
  cmp(two.interaction->p_value, g.at("anova2.AB")[1]);

  const auto f = stats::anova_oneway({g.at("data.a"), g.at("data.b")}).anova.statistic;
  const double ft = std::abs(f - u.statistic * u.statistic) / f;
  return {worst <= kC9Tol && ft <= kC9FtTol,
          fmt("max relative deviation from golden %.3g (tol %g); |F - t^2|/F = %.3g (tol %g)", worst, kC9Tol, ft, kC9FtTol)};
}

// 10. end-to-end determinism through the CLI
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "neuroloop");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (rc != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return rc;
}

Outcome c10() {
  const auto root = fs::temp_directory_path() / ("neuroloop_accept_" + std::to_string(::getpid()));
  fs::create_directories(root);
  const auto cfg = (root / "pipeline.ini").string();
  {
    std::ofstream out(cfg);
    out << "[format]\nversion = 1\n[session]\ntarget_running = 300\nrest_duration = 60\n[dcmc]\nn_sim = 10\n";
  }
  const char* files[] = {"session.jsonl", "rec.sig", "mpf.csv", "dcmc.csv", "spectra.csv", "stats.csv"};
  std::string first[6];
  bool ok = true;
  for (int run = 0; run < 2 && ok; ++run) {
    const auto d = root / ("run" + std::to_string(run));
    fs::create_directories(d);
    auto p = [&](const char* f) { return (d / f).string(); };
    ok = cli({"simulate", "--config", cfg, "--seed", "11", "--log", p("session.jsonl"), "--recording", p("rec.sig")}) == 0 &&
         cli({"mpf", "--config", cfg, "--seed", "11", "--input", p("rec.sig"), "--output", p("mpf.csv")}) == 0 &&
         cli({"dcmc", "--config", cfg, "--seed", "11", "--order", "10", "--input", p("rec.sig"), "--output",
              p("dcmc.csv"), "--spectra", p("spectra.csv")}) == 0 &&
         cli({"stats", "--config", cfg, "--seed", "11", "--input", p("dcmc.csv"), "--metric", "dcmc_block", "--factor",
              "qualifier:direction", "--band", "beta", "--test", "dominance", "--output", p("stats.csv")}) == 0;
    for (int i = 0; i < 6 && ok; ++i) {
      const auto bytes = slurp(d / files[i]);
      if (run == 0)
        first[i] = bytes;
      else if (bytes != first[i])
        ok = false;
    }
  }
  std::size_t total = 0;
  for (const auto& s : first) total += s.size();
  fs::remove_all(root);
  return {ok && total > 0, fmt("simulate -> mpf -> dcmc -> stats twice with seed 11: %s (%zu bytes compared)",
                               ok ? "byte-identical" : "outputs differ or a stage failed", total)};
}

const std::function<Outcome()> kCriteria[] = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (int i = 1; i <= 10; ++i) which.push_back(i);
  int failed = 0;
  for (int c : which) {
    if (c < 1 || c > 10) {
      std::fprintf(stderr, "unknown criterion %d\n", c);
      return 2;
    }
    Outcome o;
    try {
      o = kCriteria[c - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s - %s\n", c, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
