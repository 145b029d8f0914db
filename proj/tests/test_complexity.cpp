#include <doctest.h>

#include <cmath>

#include "neuroloop/complexity.hpp"
#include "neuroloop/error.hpp"
#include "support.hpp"

using namespace neuroloop;

namespace {

std::vector<std::uint8_t> bits(const std::string& s) {
  std::vector<std::uint8_t> b;
  for (char c : s) b.push_back(c == '1');
  return b;
}

Epoch epoch(std::vector<double> x, double start = 0.0) {
  Epoch e;
  e.samples = std::move(x);
  e.sample_rate = 1000.0;
  e.start_time = start;
  return e;
}

std::vector<LzcResult> constant_epochs(double duration, double value, double late_value) {
  std::vector<LzcResult> out;
  for (double t = 0.0; t + 5.0 <= duration; t += 5.0) out.push_back({t, 10, t < duration / 2 ? value : late_value});
  return out;
}

}  // namespace

TEST_CASE("hand-traceable parse") {
  const auto b = bits("0001101001000101");
  CHECK(lz76_phrases(b) == 6);
  CHECK(testing::lz76_bruteforce(b) == 6);
}

TEST_CASE("degenerate lengths") {
  CHECK(lz76_phrases(std::vector<std::uint8_t>{}) == 0);
  CHECK(lz76_phrases(bits("1")) == 1);
  CHECK_THROWS_AS(lzc(epoch({1.0})), DomainError);
}

TEST_CASE("constant epoch matches the oracle for the all-zero string") {
  const auto r = lzc(epoch(std::vector<double>(64, 2.5)));
  CHECK(r.c_raw == testing::lz76_bruteforce(std::vector<std::uint8_t>(64, 0)));
  CHECK(binarize_median(std::vector<double>{1, 2, 2, 3}) == std::vector<std::uint8_t>{0, 0, 0, 1});
}

TEST_CASE("random strings agree with the brute-force parser") {
  neuroloop::GaussianSource g(5);
  for (int t = 0; t < 300; ++t) {
    std::vector<std::uint8_t> b(17 + static_cast<std::size_t>(g.uniform() * 200));
    for (auto& v : b) v = g.uniform() < 0.5;
    CHECK(lz76_phrases(b) == testing::lz76_bruteforce(b));
  }
}

TEST_CASE("random sequences normalize near one") {
  // A two-valued epoch has its median on one of the values, which the tie
  // rule maps to 0, so the +/-1 case is parsed on its sign bits directly.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x = testing::white_noise(5000, 21 + seed);
    std::vector<std::uint8_t> sign;
    for (double v : x) sign.push_back(v > 0.0);
    const double c = static_cast<double>(lz76_phrases(sign)) * std::log2(5000.0) / 5000.0;
    CHECK(c >= 0.8);
    CHECK(c <= 1.2);

    const auto r = lzc(epoch(x));
    CHECK(r.c_norm >= 0.8);
    CHECK(r.c_norm <= 1.2);
    CHECK(r.c_norm == doctest::Approx(static_cast<double>(r.c_raw) * std::log2(5000.0) / 5000.0));
  }
}

TEST_CASE("affine invariance") {
  const auto x = testing::white_noise(3000, 4);
  auto y = x;
  for (double& v : y) v = 3.7 * v - 12.0;
  CHECK(lzc(epoch(x)).c_raw == lzc(epoch(y)).c_raw);
}

TEST_CASE("more repetitions of a prefix never add phrases") {
  neuroloop::GaussianSource g(9);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::uint8_t> r(256);
    for (auto& v : r) v = g.uniform() < 0.5;
    std::size_t prev = SIZE_MAX;
    for (std::size_t p = 128; p >= 1; p /= 2) {
      std::vector<std::uint8_t> s;
      while (s.size() < 256) s.insert(s.end(), r.begin(), r.begin() + static_cast<std::ptrdiff_t>(p));
      const auto c = lz76_phrases(s);
      CHECK(c <= prev);
      prev = c;
    }
  }
}

TEST_CASE("rejected epochs are refused") {
  auto e = epoch(testing::white_noise(100, 1));
  e.quality = Quality::rejected;
  CHECK_THROWS_AS(lzc(e), DataError);
}

TEST_CASE("lzc drop rate") {
  CHECK(lzc_drop_rate(constant_epochs(1800, 0.9, 0.9), 1800) == 0.0);
  CHECK(lzc_drop_rate(constant_epochs(1800, 1.0, 0.8), 1800) == doctest::Approx(20.0));
  CHECK(lzc_drop_rate(constant_epochs(1800, 0.8, 1.0), 1800) < 0.0);

  auto gap = constant_epochs(1800, 1.0, 0.8);
  std::erase_if(gap, [](const LzcResult& r) { return r.epoch_start < 120.0; });
  CHECK_THROWS_AS(lzc_drop_rate(gap, 1800), InsufficientDataError);

  LzcDropConfig raw;
  raw.normalized = false;
  CHECK(lzc_drop_rate(constant_epochs(1800, 1.0, 0.8), 1800, 0.0, raw) == 0.0);
}
