#include "neuroloop/stats.hpp"

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "neuroloop/error.hpp"

namespace neuroloop::stats {

double mean(std::span<const double> x) {
  if (x.empty()) throw InsufficientDataError("mean of empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw InsufficientDataError("variance needs two observations");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

double t_sf_two_sided(double t, double df) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t dist(df);
  return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
}

double f_sf(double f, double df1, double df2) {
  if (std::isinf(f)) return 0.0;
  if (f <= 0.0) return 1.0;
  const boost::math::fisher_f dist(df1, df2);
  return std::clamp(boost::math::cdf(boost::math::complement(dist, f)), 0.0, 1.0);
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (lambda < 1.18) {
    // Jacobi theta form, converges fast for small lambda.
    double sum = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double j = 2.0 * k - 1.0;
      sum += std::exp(-j * j * pi * pi / (8.0 * lambda * lambda));
    }
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double change_rate(double before, double after) {
  if (before == 0.0) throw DomainError("change rate undefined for a zero baseline ratio");
  return (before - after) / before;
}

StatResult ks_normality(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 3) throw InsufficientDataError("KS normality test needs n >= 3");
  const double m = mean(sample);
  const double var = variance(sample);
  if (!(var > 0.0)) throw InsufficientDataError("KS normality test on a zero-variance sample");

  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const boost::math::normal_distribution<double> dist(m, std::sqrt(var));
  const double dn = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cdf = boost::math::cdf(dist, x[i]);
    d = std::max({d, static_cast<double>(i + 1) / dn - cdf, cdf - static_cast<double>(i) / dn});
  }
  StatResult r;
  r.test = "ks_normality";
  r.effect = "sample";
  r.statistic = d;
  r.p_value = kolmogorov_sf(std::sqrt(dn) * d);
  r.df1 = dn;
  r.note = "parameters estimated from sample (Lilliefors null); asymptotic p";
  return r;
}

StatResult t_test(std::span<const double> a, std::span<const double> b, bool paired) {
  StatResult r;
  r.test = paired ? "t_paired" : "t_unpaired";
  r.effect = "a-b";
  double diff = 0.0, se2 = 0.0;
  if (paired) {
    if (a.size() != b.size()) throw DataError("paired t-test needs equal sample sizes");
    if (a.size() < 2) throw InsufficientDataError("paired t-test needs n >= 2");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    diff = mean(d);
    se2 = variance(d) / static_cast<double>(d.size());
    r.df1 = static_cast<double>(d.size() - 1);
  } else {
    if (a.size() < 2 || b.size() < 2) throw InsufficientDataError("unpaired t-test needs n >= 2 per group");
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    diff = mean(a) - mean(b);
    const double pooled = ((na - 1.0) * variance(a) + (nb - 1.0) * variance(b)) / (na + nb - 2.0);
    se2 = pooled * (1.0 / na + 1.0 / nb);
    r.df1 = na + nb - 2.0;
  }
  if (se2 == 0.0) {
    if (diff == 0.0) {
      r.statistic = 0.0;
      r.p_value = 1.0;
      r.note = "zero variance with equal means";
      return r;
    }
    throw DataError("degenerate sample: zero variance with unequal means");
  }
  r.statistic = diff / std::sqrt(se2);
  r.p_value = t_sf_two_sided(r.statistic, r.df1);
  return r;
}

std::vector<double> bonferroni(std::span<const double> p) {
  std::vector<double> out(p.size());
  const auto m = static_cast<double>(p.size());
  std::transform(p.begin(), p.end(), out.begin(), [m](double v) { return std::min(1.0, v * m); });
  return out;
}

OnewayResult anova_oneway(const std::vector<std::vector<double>>& groups, bool posthoc) {
  if (groups.size() < 2) throw InsufficientDataError("one-way ANOVA needs at least two groups");
  std::size_t n = 0;
  double grand = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw InsufficientDataError("one-way ANOVA needs n >= 2 per group");
    for (double v : g) grand += v;
    n += g.size();
  }
  grand /= static_cast<double>(n);

  double ss_between = 0.0, ss_within = 0.0;
  for (const auto& g : groups) {
    const double m = mean(g);
    ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double v : g) ss_within += (v - m) * (v - m);
  }
  const double ss_total = ss_between + ss_within;
  if (!(ss_total > 0.0)) throw DataError("degenerate data: all observations equal");

  const double k = static_cast<double>(groups.size());
  const double df_b = k - 1.0, df_w = static_cast<double>(n) - k;
  OnewayResult out;
  auto& r = out.anova;
  r.test = "anova_oneway";
  r.effect = "group";
  r.df1 = df_b;
  r.df2 = df_w;
  r.statistic = ss_within == 0.0 ? std::numeric_limits<double>::infinity()
                                 : (ss_between / df_b) / (ss_within / df_w);
  r.p_value = f_sf(r.statistic, df_b, df_w);
  r.effect_size = ss_between / ss_total;

  if (posthoc) {
    const std::size_t g = groups.size();
    std::vector<double> raw;
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = i + 1; j < g; ++j) {
        double p = 1.0;
        try {
          p = t_test(groups[i], groups[j], false).p_value;
        } catch (const DataError&) {
          p = 0.0;  // zero pooled variance, unequal means
        }
        raw.push_back(p);
      }
    const auto adj = bonferroni(raw);
    out.posthoc.assign(g, std::vector<double>(g, 1.0));
    std::size_t idx = 0;
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = i + 1; j < g; ++j) {
        out.posthoc[i][j] = out.posthoc[j][i] = adj[idx++];
      }
  }
  return out;
}

TwowayResult anova_twoway(const TwoWayTable& table) {
  const std::size_t a = table.size();
  if (a < 2) throw InsufficientDataError("two-way ANOVA needs at least two levels of factor A");
  const std::size_t b = table.front().size();
  if (b < 1) throw InsufficientDataError("two-way ANOVA needs at least one level of factor B");
  const std::size_t reps = table.front().front().size();
  for (const auto& row : table) {
    if (row.size() != b) throw UnsupportedError("unbalanced design: ragged factor B levels");
    for (const auto& cell : row)
      if (cell.size() != reps || reps == 0)
        throw UnsupportedError("unbalanced design: unequal cell counts are not supported");
  }

  const double da = static_cast<double>(a), db = static_cast<double>(b), dr = static_cast<double>(reps);
  double grand = 0.0;
  for (const auto& row : table)
    for (const auto& cell : row)
      for (double v : cell) grand += v;
  grand /= da * db * dr;

  std::vector<double> mean_a(a, 0.0), mean_b(b, 0.0);
  std::vector<std::vector<double>> cell_mean(a, std::vector<double>(b, 0.0));
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j) {
      cell_mean[i][j] = mean(table[i][j]);
      mean_a[i] += cell_mean[i][j] / db;
      mean_b[j] += cell_mean[i][j] / da;
    }

  double ss_a = 0, ss_b = 0, ss_ab = 0, ss_e = 0;
  for (std::size_t i = 0; i < a; ++i) ss_a += db * dr * (mean_a[i] - grand) * (mean_a[i] - grand);
  for (std::size_t j = 0; j < b; ++j) ss_b += da * dr * (mean_b[j] - grand) * (mean_b[j] - grand);
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j) {
      const double inter = cell_mean[i][j] - mean_a[i] - mean_b[j] + grand;
      ss_ab += dr * inter * inter;
      for (double v : table[i][j]) ss_e += (v - cell_mean[i][j]) * (v - cell_mean[i][j]);
    }

  double df_a = da - 1.0, df_b = db - 1.0, df_ab = (da - 1.0) * (db - 1.0), df_e = da * db * (dr - 1.0);
  bool has_interaction = df_ab > 0.0 && df_e > 0.0;
  if (df_e == 0.0) {
    // no replication: the interaction is the error term
    ss_e = ss_ab;
    df_e = df_ab;
    has_interaction = false;
  }
  if (df_e <= 0.0) throw InsufficientDataError("two-way ANOVA has no error degrees of freedom");
  if (!(ss_a + ss_b + ss_ab + ss_e > 0.0)) throw DataError("degenerate data: all observations equal");

  const double ms_e = ss_e / df_e;
  auto effect = [&](const char* name, double ss, double df) {
    StatResult r;
    r.test = "anova_twoway";
    r.effect = name;
    r.df1 = df;
    r.df2 = df_e;
    r.statistic = ms_e == 0.0 ? (ss > 0.0 ? std::numeric_limits<double>::infinity() : 0.0)
                              : (ss / df) / ms_e;
    r.p_value = f_sf(r.statistic, df, df_e);
    r.effect_size = ss + ss_e > 0.0 ? ss / (ss + ss_e) : 0.0;
    return r;
  };

  TwowayResult out{effect("A", ss_a, df_a), std::nullopt, std::nullopt};
  if (df_b > 0.0) out.factor_b = effect("B", ss_b, df_b);
  if (has_interaction) out.interaction = effect("AxB", ss_ab, df_ab);
  return out;
}

}  // namespace neuroloop::stats
