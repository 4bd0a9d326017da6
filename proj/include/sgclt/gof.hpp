#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>

namespace sgclt {

inline constexpr double kSignificance = 0.05;

struct KsResult {
  double statistic;
  double p_value;
};

struct AdResult {
  /// Midrank two-sample statistic A^2_akN.
  double statistic;
  /// (A^2 - 1) / sigma_N.
  double standardized;
  double p_value;
  /// The standardized statistic fell outside the percentile table and p was clamped.
  bool out_of_table;
};

struct TestReport {
  double ks_statistic = 0.0;
  double ks_p = 1.0;
  double ad_statistic = 0.0;
  double ad_standardized = 0.0;
  double ad_p = 1.0;
  bool ks_reject = false;
  bool ad_reject = false;
  bool ad_out_of_table = false;
  std::size_t n1 = 0;
  std::size_t n2 = 0;

  bool both_fail_to_reject() const { return !ks_reject && !ad_reject; }
};

/// Fraction of samples <= x.
double ecdf_eval(std::span<const double> samples, double x);

/// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_tail(double lambda);

/// sup_x |F_a(x) - F_b(x)| with the asymptotic Kolmogorov p-value at
/// lambda = D sqrt(n1 n2 / (n1 + n2)). Tied values are swept together.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Variance of A^2_kN under the null for k samples of the given sizes.
double ad_null_variance(std::span<const std::size_t> sizes);

/// Upper-tail p-value of the standardized two-sample AD statistic, interpolated in
/// log p over the asymptotic percentile table and clamped to [0.001, 0.999].
double ad_p_value(double standardized, bool* out_of_table = nullptr);

/// Two-sample Anderson-Darling test with midranks for ties. Needs n1 + n2 >= 4
/// and at least two distinct pooled values (std::domain_error otherwise).
AdResult ad_two_sample(std::span<const double> a, std::span<const double> b);

/// Reject iff p < 0.05 (strictly).
constexpr bool decide(double p) { return p < kSignificance; }

TestReport two_sample_report(std::span<const double> a, std::span<const double> b);

inline std::span<const double> as_span(const Eigen::ArrayXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace sgclt
