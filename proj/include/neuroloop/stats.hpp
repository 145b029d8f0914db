#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace neuroloop::stats {

struct StatResult {
  std::string test;
  std::string effect;  // e.g. "group", "A", "B", "AxB"
  double statistic = 0.0;
  double p_value = 1.0;
  std::optional<double> effect_size;  // eta² (one-way) or partial eta² (two-way)
  double df1 = 0.0;
  double df2 = 0.0;  // denominator df for F tests, 0 otherwise
  std::string note;
};

/// (before - after) / before.
double change_rate(double before, double after);

/// One-sample KS against a normal with the sample's mean and standard
/// deviation. The p-value is the asymptotic Kolmogorov one, which is
/// conservative when parameters are estimated (the Lilliefors situation).
StatResult ks_normality(std::span<const double> sample);

/// Two-sided t-test; unpaired uses the pooled-variance form.
StatResult t_test(std::span<const double> a, std::span<const double> b, bool paired);

struct OnewayResult {
  StatResult anova;
  // Bonferroni-adjusted pairwise p-values; empty when posthoc was not requested.
  std::vector<std::vector<double>> posthoc;
};

OnewayResult anova_oneway(const std::vector<std::vector<double>>& groups, bool posthoc = false);

/// cells[a][b] holds the observations at level a of factor A and b of factor B.
using TwoWayTable = std::vector<std::vector<std::vector<double>>>;

struct TwowayResult {
  StatResult factor_a;
  std::optional<StatResult> factor_b;     // absent when B has a single level
  std::optional<StatResult> interaction;  // absent without replication or with one B level
};

TwowayResult anova_twoway(const TwoWayTable& table);

/// Multiplies by the number of comparisons and clamps at 1.
std::vector<double> bonferroni(std::span<const double> p);

double t_sf_two_sided(double t, double df);
double f_sf(double f, double df1, double df2);
double kolmogorov_sf(double lambda);

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased

}  // namespace neuroloop::stats
