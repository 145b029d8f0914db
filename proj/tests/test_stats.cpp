#include <doctest.h>

#include <cmath>

#include "neuroloop/error.hpp"
#include "neuroloop/stats.hpp"
#include "support.hpp"

using namespace neuroloop;
using namespace neuroloop::stats;

namespace {

const testing::Golden& golden() {
  static const auto g = testing::load_golden("stats.txt");
  return g;
}

void check_close(double got, double want, double tol = 1e-8) {
  CHECK(std::abs(got - want) <= tol * std::max(1.0, std::abs(want)));
}

std::vector<double> shifted(std::vector<double> x, double c) {
  for (double& v : x) v += c;
  return x;
}

}  // namespace

TEST_CASE("change rate") {
  CHECK(change_rate(2.0, 1.0) == 0.5);
  CHECK(change_rate(3.3, 3.3) == 0.0);
  CHECK(change_rate(1.0, 1.5) == -0.5);
  CHECK_THROWS_AS(change_rate(0.0, 1.0), DomainError);
}

TEST_CASE("t tests against the golden oracle") {
  const auto& g = golden();
  const auto u = t_test(g.at("data.a"), g.at("data.b"), false);
  check_close(u.statistic, g.at("ttest_unpaired")[0]);
  check_close(u.p_value, g.at("ttest_unpaired")[1]);
  CHECK(u.df1 == g.at("ttest_unpaired")[2]);
  const auto p = t_test(g.at("data.a"), g.at("data.b"), true);
  check_close(p.statistic, g.at("ttest_paired")[0]);
  check_close(p.p_value, g.at("ttest_paired")[1]);
  CHECK(p.df1 == g.at("ttest_paired")[2]);
}

TEST_CASE("t test conventions") {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 3, 4, 5, 6};
  const auto same = t_test(a, a, true);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);
  // differences are the constant -1: zero variance, non-zero mean
  CHECK_THROWS_AS(t_test(a, b, true), DataError);
  const std::vector<double> c{1, 2, 3};
  const auto u = t_test(c, c, false);
  CHECK(u.statistic == 0.0);
  CHECK(u.p_value == 1.0);
  CHECK_THROWS_AS(t_test(std::vector<double>{1, 1}, std::vector<double>{2, 2}, false), DataError);
}

TEST_CASE("t test symmetry and location invariance") {
  const auto& g = golden();
  const auto ab = t_test(g.at("data.a"), g.at("data.b"), false);
  const auto ba = t_test(g.at("data.b"), g.at("data.a"), false);
  CHECK(ab.p_value == ba.p_value);
  CHECK(ab.statistic == -ba.statistic);
  const auto moved = t_test(shifted(g.at("data.a"), 1234.5), shifted(g.at("data.b"), 1234.5), false);
  CHECK(moved.statistic == doctest::Approx(ab.statistic).epsilon(1e-9));
}

TEST_CASE("one-way ANOVA and Bonferroni against the golden oracle") {
  const auto& g = golden();
  const std::vector<std::vector<double>> groups{g.at("data.g0"), g.at("data.g1"), g.at("data.g2")};
  const auto r = anova_oneway(groups, true);
  check_close(r.anova.statistic, g.at("anova1")[0]);
  check_close(r.anova.p_value, g.at("anova1")[1]);
  check_close(*r.anova.effect_size, g.at("anova1")[2]);
  CHECK(r.anova.df1 == g.at("anova1")[3]);
  CHECK(r.anova.df2 == g.at("anova1")[4]);
  check_close(r.posthoc[0][1], g.at("bonferroni.01")[0]);
  check_close(r.posthoc[0][2], g.at("bonferroni.02")[0]);
  check_close(r.posthoc[1][2], g.at("bonferroni.12")[0]);
  CHECK(r.posthoc[2][1] == r.posthoc[1][2]);

  std::vector<std::vector<double>> moved;
  for (const auto& x : groups) moved.push_back(shifted(x, -77.0));
  CHECK(anova_oneway(moved).anova.statistic == doctest::Approx(r.anova.statistic).epsilon(1e-9));
}

TEST_CASE("two groups: F equals t squared") {
  const auto& g = golden();
  const auto f = anova_oneway({g.at("data.a"), g.at("data.b")}).anova;
  const auto t = t_test(g.at("data.a"), g.at("data.b"), false);
  CHECK(std::abs(f.statistic - t.statistic * t.statistic) <= 1e-9 * f.statistic);
  CHECK(f.p_value == doctest::Approx(t.p_value).epsilon(1e-9));
}

TEST_CASE("one-way ANOVA degenerate cases and effect size bounds") {
  CHECK_THROWS_AS(anova_oneway({{2, 2}, {2, 2, 2}}), DataError);
  const auto perfect = anova_oneway({{1, 1}, {3, 3}}).anova;
  CHECK(*perfect.effect_size == 1.0);
  CHECK(std::isinf(perfect.statistic));
  CHECK(perfect.p_value == 0.0);
  neuroloop::GaussianSource rng(4);
  for (int i = 0; i < 50; ++i) {
    std::vector<std::vector<double>> groups(3);
    for (auto& gr : groups)
      for (int k = 0; k < 6; ++k) gr.push_back(rng());
    const auto r = anova_oneway(groups, true);
    CHECK(*r.anova.effect_size >= 0.0);
    CHECK(*r.anova.effect_size < 1.0);
    CHECK(r.anova.p_value >= 0.0);
    CHECK(r.anova.p_value <= 1.0);
  }
}

TEST_CASE("Bonferroni clamps and keeps order") {
  const std::vector<double> p{0.01, 0.2, 0.5, 0.04};
  const auto adj = bonferroni(p);
  CHECK(adj == std::vector<double>{0.04, 0.8, 1.0, 0.16});
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j)
      if (p[i] < p[j]) CHECK(adj[i] <= adj[j]);
}

TEST_CASE("two-way ANOVA against the golden oracle") {
  const auto& g = golden();
  TwoWayTable t(2, std::vector<std::vector<double>>(3));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 3; ++b) t[a][b] = g.at("data.cell" + std::to_string(a) + std::to_string(b));
  const auto r = anova_twoway(t);
  const std::pair<const StatResult*, const char*> effects[] = {
      {&r.factor_a, "anova2.A"}, {&*r.factor_b, "anova2.B"}, {&*r.interaction, "anova2.AB"}};
  for (const auto& [res, key] : effects) {
    const auto& want = g.at(key);
    check_close(res->statistic, want[0]);
    check_close(res->p_value, want[1]);
    check_close(*res->effect_size, want[2]);
    CHECK(res->df1 == want[3]);
    CHECK(res->df2 == want[4]);
  }
}

TEST_CASE("two-way ANOVA reduction, additivity and limits") {
  const auto& g = golden();
  TwoWayTable one_b{{g.at("data.g0")}, {g.at("data.g1")}, {g.at("data.g2")}};
  const auto r = anova_twoway(one_b);
  CHECK_FALSE(r.factor_b);
  CHECK_FALSE(r.interaction);
  const auto f1 = anova_oneway({g.at("data.g0"), g.at("data.g1"), g.at("data.g2")}).anova;
  CHECK(std::abs(r.factor_a.statistic - f1.statistic) <= 1e-9 * f1.statistic);

  int quiet = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    neuroloop::GaussianSource rng(seed);
    TwoWayTable t(3, std::vector<std::vector<double>>(4));
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 4; ++b)
        for (int k = 0; k < 5; ++k) t[a][b].push_back(0.7 * a - 0.4 * b + rng());
    quiet += anova_twoway(t).interaction->p_value > 0.05;
  }
  CHECK(quiet >= 90);

  TwoWayTable unbalanced{{{1, 2}, {3, 4}}, {{1, 2, 3}, {4, 5}}};
  CHECK_THROWS_AS(anova_twoway(unbalanced), UnsupportedError);
}

TEST_CASE("KS normality") {
  const auto& g = golden();
  const auto r = ks_normality(g.at("data.ks"));
  check_close(r.statistic, g.at("ks")[0]);
  check_close(r.p_value, g.at("ks")[1]);

  CHECK_THROWS_AS(ks_normality(std::vector<double>{1.0, 2.0}), InsufficientDataError);
  CHECK_THROWS_AS(ks_normality(std::vector<double>{1.0, 1.0, 1.0}), InsufficientDataError);

  int normal_pass = 0, uniform_reject = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    neuroloop::GaussianSource rng(seed);
    std::vector<double> n(10000), u(10000);
    for (double& v : n) v = rng();
    for (double& v : u) v = rng.uniform();
    normal_pass += ks_normality(n).p_value > 0.05;
    uniform_reject += ks_normality(u).p_value < 0.01;
  }
  CHECK(normal_pass >= 90);
  CHECK(uniform_reject >= 99);
}

TEST_CASE("distribution tails") {
  CHECK(t_sf_two_sided(0.0, 5.0) == 1.0);
  CHECK(f_sf(0.0, 2.0, 10.0) == 1.0);
  CHECK(kolmogorov_sf(0.0) == 1.0);
  // continuity across the two series branches
  CHECK(kolmogorov_sf(1.18 - 1e-9) == doctest::Approx(kolmogorov_sf(1.18 + 1e-9)).epsilon(1e-7));
}
