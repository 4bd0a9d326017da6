#include "sgclt/gof.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sgclt {

namespace {

void require_nonempty(std::span<const double> s, const char* who) {
  if (s.empty()) throw std::invalid_argument(std::string(who) + ": samples must be nonempty");
}

std::vector<double> sorted_copy(std::span<const double> s) {
  std::vector<double> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return v;
}

// Upper-tail percentiles of the limiting Anderson-Darling distribution
// (mean 1, variance 2 (pi^2 - 9) / 3), which is the k = 2 limit of A^2_kN.
struct Percentile {
  double p;
  double a2;
};
constexpr std::array<Percentile, 15> kAdPercentiles{{
    {0.999, 0.1437},
    {0.995, 0.1795},
    {0.99, 0.2015},
    {0.975, 0.2409},
    {0.95, 0.2835},
    {0.9, 0.3461},
    {0.75, 0.4969},
    {0.5, 0.7742},
    {0.25, 1.2479},
    {0.1, 1.9330},
    {0.05, 2.4922},
    {0.025, 3.0775},
    {0.01, 3.8784},
    {0.005, 4.4971},
    {0.001, 5.9671},
}};

double ad_limit_sd() { return std::sqrt(2.0 * (std::numbers::pi * std::numbers::pi - 9.0) / 3.0); }

}  // namespace

double ecdf_eval(std::span<const double> samples, double x) {
  require_nonempty(samples, "ecdf_eval");
  const auto below = std::count_if(samples.begin(), samples.end(), [x](double v) { return v <= x; });
  return static_cast<double>(below) / static_cast<double>(samples.size());
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (lambda < 1.0) {
    // same function via the Jacobi theta transformation; the alternating series
    // loses all precision as lambda -> 0
    double s = 0.0;
    for (int k = 1;; ++k) {
      const double m = 2.0 * k - 1.0;
      const double term = std::exp(-m * m * pi * pi / (8.0 * lambda * lambda));
      s += term;
      if (term < 1e-16) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * s, 0.0, 1.0);
  }
  double q = 0.0;
  for (int k = 1;; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-12) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, "ks_two_sample");
  require_nonempty(b, "ks_two_sample");
  const auto x = sorted_copy(a);
  const auto y = sorted_copy(b);
  const std::size_t n1 = x.size();
  const std::size_t n2 = y.size();

  // |F_a - F_b| = |i n2 - j n1| / (n1 n2); keep the numerator integral
  std::size_t i = 0, j = 0, best = 0;
  while (i < n1 && j < n2) {
    const double v = std::min(x[i], y[j]);
    while (i < n1 && x[i] == v) ++i;
    while (j < n2 && y[j] == v) ++j;
    const std::size_t lhs = i * n2, rhs = j * n1;
    best = std::max(best, lhs > rhs ? lhs - rhs : rhs - lhs);
  }
  const double d = static_cast<double>(best) / (static_cast<double>(n1) * static_cast<double>(n2));
  const double en = std::sqrt(static_cast<double>(n1) * static_cast<double>(n2) / static_cast<double>(n1 + n2));
  return {d, kolmogorov_tail(d * en)};
}

double ad_null_variance(std::span<const std::size_t> sizes) {
  std::size_t total = 0;
  double big_h = 0.0;
  for (const auto n : sizes) {
    total += n;
    big_h += 1.0 / static_cast<double>(n);
  }
  if (total < 4) throw std::domain_error("ad_null_variance: at least 4 pooled observations required");
  const double n = static_cast<double>(total);
  const double k = static_cast<double>(sizes.size());

  double h = 0.0;
  for (std::size_t i = 1; i < total; ++i) h += 1.0 / static_cast<double>(i);
  // g = sum_{i=1}^{N-2} sum_{j=i+1}^{N-1} 1/((N-i) j), regrouped by j
  double g = 0.0;
  double inner = 0.0;  // sum_{i=1}^{j-1} 1/(N-i)
  for (std::size_t j = 2; j + 1 <= total; ++j) {
    inner += 1.0 / (n - static_cast<double>(j - 1));
    g += inner / static_cast<double>(j);
  }

  const double a = (4 * g - 6) * (k - 1) + (10 - 6 * g) * big_h;
  const double b = (2 * g - 4) * k * k + 8 * h * k + (2 * g - 14 * h - 4) * big_h - 8 * h + 4 * g - 6;
  const double c = (6 * h + 2 * g - 2) * k * k + (4 * h - 4 * g + 6) * k + (2 * h - 6) * big_h + 4 * h;
  const double d = (2 * h + 6) * k * k - 4 * h * k;
  return (a * n * n * n + b * n * n + c * n + d) / ((n - 1) * (n - 2) * (n - 3));
}

double ad_p_value(double standardized, bool* out_of_table) {
  const double sd = ad_limit_sd();
  const auto t_of = [sd](const Percentile& q) { return (q.a2 - 1.0) / sd; };
  bool clamped = false;
  double p;
  if (standardized <= t_of(kAdPercentiles.front())) {
    p = kAdPercentiles.front().p;
    clamped = standardized < t_of(kAdPercentiles.front());
  } else if (standardized >= t_of(kAdPercentiles.back())) {
    p = kAdPercentiles.back().p;
    clamped = standardized > t_of(kAdPercentiles.back());
  } else {
    std::size_t k = 1;
    while (t_of(kAdPercentiles[k]) < standardized) ++k;
    const Percentile& lo = kAdPercentiles[k - 1];
    const Percentile& hi = kAdPercentiles[k];
    const double w = (standardized - t_of(lo)) / (t_of(hi) - t_of(lo));
    p = std::exp((1.0 - w) * std::log(lo.p) + w * std::log(hi.p));
  }
  if (out_of_table) *out_of_table = clamped;
  return p;
}

AdResult ad_two_sample(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, "ad_two_sample");
  require_nonempty(b, "ad_two_sample");
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  const std::size_t total = n1 + n2;
  if (total < 4) throw std::domain_error("ad_two_sample: at least 4 pooled observations required");

  std::vector<std::pair<double, int>> pooled;
  pooled.reserve(total);
  for (const double v : a) pooled.emplace_back(v, 0);
  for (const double v : b) pooled.emplace_back(v, 1);
  std::sort(pooled.begin(), pooled.end());
  if (pooled.front().first == pooled.back().first) {
    throw std::domain_error("ad_two_sample: all pooled values are equal; the test is undefined");
  }

  const double n = static_cast<double>(total);
  const std::array<double, 2> sizes{static_cast<double>(n1), static_cast<double>(n2)};
  std::array<double, 2> sums{0.0, 0.0};
  std::array<double, 2> below{0.0, 0.0};  // M_ij: sample i at or below the current value
  double pooled_below = 0.0;               // B_j
  for (std::size_t s = 0; s < total;) {
    std::size_t e = s;
    std::array<double, 2> tied{0.0, 0.0};
    while (e < total && pooled[e].first == pooled[s].first) {
      tied[static_cast<std::size_t>(pooled[e].second)] += 1.0;
      ++e;
    }
    const double l = static_cast<double>(e - s);
    pooled_below += l;
    const double b_mid = pooled_below - l / 2.0;
    const double denom = b_mid * (n - b_mid) - n * l / 4.0;
    for (std::size_t i = 0; i < 2; ++i) {
      below[i] += tied[i];
      const double m_mid = below[i] - tied[i] / 2.0;
      const double num = n * m_mid - sizes[i] * b_mid;
      sums[i] += l * num * num / denom;
    }
    s = e;
  }
  const double a2 = (n - 1.0) / (n * n) * (sums[0] / sizes[0] + sums[1] / sizes[1]);
  const std::array<std::size_t, 2> counts{n1, n2};
  const double sigma = std::sqrt(ad_null_variance(counts));
  const double t = (a2 - 1.0) / sigma;
  bool clamped = false;
  const double p = ad_p_value(t, &clamped);
  return {a2, t, p, clamped};
}

TestReport two_sample_report(std::span<const double> a, std::span<const double> b) {
  const KsResult ks = ks_two_sample(a, b);
  const AdResult ad = ad_two_sample(a, b);
  TestReport r;
  r.ks_statistic = ks.statistic;
  r.ks_p = ks.p_value;
  r.ad_statistic = ad.statistic;
  r.ad_standardized = ad.standardized;
  r.ad_p = ad.p_value;
  r.ks_reject = decide(ks.p_value);
  r.ad_reject = decide(ad.p_value);
  r.ad_out_of_table = ad.out_of_table;
  r.n1 = a.size();
  r.n2 = b.size();
  return r;
}

}  // namespace sgclt
