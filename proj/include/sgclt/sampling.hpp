#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>

#include "sgclt/random.hpp"
#include "sgclt/stable.hpp"

namespace sgclt {

/// One Chambers-Mallows-Stuck draw: uniform angle, unit exponential and the
/// resulting S(alpha, beta, 1, 0) variate.
struct StandardStableDraw {
  double theta;
  double omega;
  double value;
};

/// Deterministic CMS map (theta, omega) -> S(alpha, beta, 1, 0) variate.
///
/// alpha != 1:  theta0 = arctan(beta tan(pi alpha/2)) / alpha,
///   R = sin(alpha (theta0 + theta)) / (cos(alpha theta0) cos theta)^{1/alpha}
///       * [cos(alpha theta0 + (alpha - 1) theta) / omega]^{(1 - alpha)/alpha}
/// alpha == 1:
///   R = (2/pi) [(pi/2 + beta theta) tan theta
///               - beta log((pi/2) omega cos theta / (pi/2 + beta theta))]
double cms_transform(double theta, double omega, double alpha, double beta);

StandardStableDraw draw_standard(double alpha, double beta, RandomSource& rng);

/// Draw from S(alpha, beta, 1, 0). Degenerate intermediates are redrawn.
double sample_standard(double alpha, double beta, RandomSource& rng);

/// Draw from S(alpha, beta, gamma, mu): sample_standard followed by scale_shift_transform.
double sample_stable(const StableParamsd& params, RandomSource& rng);

/// Standard Cauchy, i.e. sample_standard(1, 0).
double sample_cauchy_std(RandomSource& rng);

Eigen::ArrayXd sample_stable_n(const StableParamsd& params, std::size_t n, RandomSource& rng);

/// (1/n) sum_k exp(i t x_k).
ComplexValue empirical_cf(std::span<const double> samples, double t);

inline ComplexValue empirical_cf(const Eigen::ArrayXd& samples, double t) {
  return empirical_cf(std::span<const double>(samples.data(), static_cast<std::size_t>(samples.size())), t);
}

}  // namespace sgclt
