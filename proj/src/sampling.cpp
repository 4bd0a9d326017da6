#include "sgclt/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sgclt {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;
}  // namespace

double cms_transform(double theta, double omega, double alpha, double beta) {
  if (alpha == 1.0) {
    const double lever = kHalfPi + beta * theta;
    return 2.0 / kPi * (lever * std::tan(theta) - beta * std::log(kHalfPi * omega * std::cos(theta) / lever));
  }
  const double theta0 = std::atan(beta * std::tan(kPi * alpha / 2.0)) / alpha;
  const double lead = std::sin(alpha * (theta0 + theta)) / std::pow(std::cos(alpha * theta0) * std::cos(theta), 1.0 / alpha);
  return lead * std::pow(std::cos(alpha * theta0 + (alpha - 1.0) * theta) / omega, (1.0 - alpha) / alpha);
}

StandardStableDraw draw_standard(double alpha, double beta, RandomSource& rng) {
  if (!(alpha > 0.0 && alpha <= 2.0) || !(beta >= -1.0 && beta <= 1.0)) {
    throw std::invalid_argument("sample_standard: alpha in (0,2] and beta in [-1,1] required");
  }
  for (;;) {
    const double theta = kPi * (rng.uniform_open() - 0.5);
    const double omega = -std::log(rng.uniform_open());
    if (std::cos(theta) <= 0.0 || omega <= 0.0) continue;
    const double value = cms_transform(theta, omega, alpha, beta);
    if (std::isfinite(value)) return {theta, omega, value};
  }
}

double sample_standard(double alpha, double beta, RandomSource& rng) { return draw_standard(alpha, beta, rng).value; }

double sample_stable(const StableParamsd& params, RandomSource& rng) {
  params.validate();
  return scale_shift_transform(sample_standard(params.alpha, params.beta, rng), params);
}

double sample_cauchy_std(RandomSource& rng) { return sample_standard(1.0, 0.0, rng); }

Eigen::ArrayXd sample_stable_n(const StableParamsd& params, std::size_t n, RandomSource& rng) {
  params.validate();
  Eigen::ArrayXd out(static_cast<Eigen::Index>(n));
  for (auto& x : out) x = scale_shift_transform(sample_standard(params.alpha, params.beta, rng), params);
  return out;
}

ComplexValue empirical_cf(std::span<const double> samples, double t) {
  if (samples.empty()) throw std::invalid_argument("empirical_cf: samples must be nonempty");
  if (t == 0.0) return {1.0, 0.0};
  double re = 0.0;
  double im = 0.0;
  for (const double x : samples) {
    re += std::cos(t * x);
    im += std::sin(t * x);
  }
  const auto n = static_cast<double>(samples.size());
  return {re / n, im / n};
}

}  // namespace sgclt
