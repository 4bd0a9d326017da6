#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "sgclt/random.hpp"

namespace sgclt {

/// Configuration of the asymmetric power-law map: tail index alpha in (0, 2),
/// delta1 scales the positive half line, delta2 the negative one.
template <typename Scalar>
struct MapParams {
  Scalar alpha{1};
  Scalar delta1{1};
  Scalar delta2{1};

  bool valid() const {
    return alpha > Scalar(0) && alpha < Scalar(2) && delta1 > Scalar(0) && delta2 > Scalar(0) && std::isfinite(delta1) &&
           std::isfinite(delta2);
  }
  void validate() const {
    if (!valid()) throw std::invalid_argument("invalid map parameters: alpha in (0,2), delta1 > 0, delta2 > 0 required");
  }
};

using MapParamsd = MapParams<double>;

/// Tail amplitudes of a density f(x) ~ c_plus x^{-(alpha+1)} (x -> +inf),
/// f(x) ~ c_minus |x|^{-(alpha+1)} (x -> -inf).
struct TailCoefficients {
  double c_plus;
  double c_minus;
};

/// Skewness and scale of the stable law attracting a process with given tails.
struct GcltParams {
  double beta;
  double gamma;
};

/// One step of the map
///
///   g(x) =  (1/(d1^2 |x|))   ((|d1 x|^{2a} - 1)/2)^{1/a}   x > 1/d1
///          -(1/(d1 d2 |x|))  ((1 - |d1 x|^{2a})/2)^{1/a}   0 < x < 1/d1
///           (1/(d1 d2 |x|))  ((1 - |d2 x|^{2a})/2)^{1/a}   -1/d2 < x < 0
///          -(1/(d2^2 |x|))   ((|d2 x|^{2a} - 1)/2)^{1/a}   x < -1/d2
///
/// Returns nullopt on the exceptional set {0, 1/d1, -1/d2} and whenever the
/// image is zero or not finite (a degenerate orbit point).
template <typename Scalar>
std::optional<Scalar> map_step(Scalar x, const MapParams<Scalar>& p) {
  using std::abs;
  using std::pow;
  const Scalar a = p.alpha;
  const auto root = [a](Scalar v) { return a == Scalar(1) ? v : pow(v, Scalar(1) / a); };
  const auto power2a = [a](Scalar v) { return a == Scalar(1) ? v * v : pow(v, Scalar(2) * a); };
  Scalar y;
  if (x > Scalar(0)) {
    const Scalar s = p.delta1 * x;
    if (s == Scalar(1)) return std::nullopt;
    const Scalar q = power2a(s);
    y = s > Scalar(1) ? root((q - Scalar(1)) / Scalar(2)) / (p.delta1 * p.delta1 * x)
                      : -root((Scalar(1) - q) / Scalar(2)) / (p.delta1 * p.delta2 * x);
  } else if (x < Scalar(0)) {
    const Scalar s = p.delta2 * -x;
    if (s == Scalar(1)) return std::nullopt;
    const Scalar q = power2a(s);
    y = s < Scalar(1) ? root((Scalar(1) - q) / Scalar(2)) / (p.delta1 * p.delta2 * -x)
                      : -root((q - Scalar(1)) / Scalar(2)) / (p.delta2 * p.delta2 * -x);
  } else {
    return std::nullopt;
  }
  if (y == Scalar(0) || !std::isfinite(y)) return std::nullopt;
  return y;
}

/// Closed-form invariant density of map_step,
///   rho(x) = alpha d^alpha |x|^{alpha-1} / (pi (1 + d^{2 alpha} |x|^{2 alpha})),
/// with d = delta1 for x >= 0 and d = delta2 for x < 0. Each half line carries
/// mass 1/2. At x = 0 the density has a pole for alpha < 1, equals alpha d/pi at
/// alpha == 1 (d = delta1), and vanishes for alpha > 1; the pole is rejected.
template <typename Scalar>
Scalar invariant_density(Scalar x, const MapParams<Scalar>& p) {
  using std::abs;
  using std::pow;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  if (x == Scalar(0)) {
    if (p.alpha < Scalar(1)) throw std::domain_error("invariant_density: pole at x = 0 for alpha < 1");
    if (p.alpha > Scalar(1)) return Scalar(0);
  }
  const Scalar d = x >= Scalar(0) ? p.delta1 : p.delta2;
  const Scalar u = pow(d * abs(x), p.alpha);
  return p.alpha * pow(d, p.alpha) * pow(abs(x), p.alpha - Scalar(1)) / (pi * (Scalar(1) + u * u));
}

/// Distribution function of the invariant density: 1/2 + arctan((d1 x)^alpha)/pi
/// for x >= 0, 1/2 - arctan((d2 |x|)^alpha)/pi for x < 0.
template <typename Scalar>
Scalar invariant_cdf(Scalar x, const MapParams<Scalar>& p) {
  using std::atan;
  using std::pow;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  if (x >= Scalar(0)) return Scalar(0.5) + atan(pow(p.delta1 * x, p.alpha)) / pi;
  return Scalar(0.5) - atan(pow(-p.delta2 * x, p.alpha)) / pi;
}

/// Inverse of invariant_cdf on (0, 1); the median is 0.
template <typename Scalar>
Scalar invariant_inverse_cdf(Scalar u, const MapParams<Scalar>& p) {
  using std::pow;
  using std::tan;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  if (!(u > Scalar(0) && u < Scalar(1))) throw std::domain_error("invariant_inverse_cdf: u must lie in (0, 1)");
  if (u > Scalar(0.5)) return pow(tan(pi * (u - Scalar(0.5))), Scalar(1) / p.alpha) / p.delta1;
  if (u < Scalar(0.5)) return -pow(tan(pi * (Scalar(0.5) - u)), Scalar(1) / p.alpha) / p.delta2;
  return Scalar(0);
}

/// c_plus = alpha / (pi delta1^alpha), c_minus = alpha / (pi delta2^alpha).
template <typename Scalar>
TailCoefficients tail_coefficients(const MapParams<Scalar>& p) {
  p.validate();
  const double pi = std::numbers::pi;
  return {static_cast<double>(p.alpha / (pi * std::pow(p.delta1, p.alpha))),
          static_cast<double>(p.alpha / (pi * std::pow(p.delta2, p.alpha)))};
}

/// pi / (2 alpha sin(pi alpha / 2) Gamma(alpha)): the factor turning c_plus + c_minus into gamma^alpha.
double tail_to_scale_factor(double alpha);

/// beta = (c+ - c-)/(c+ + c-), gamma = {pi (c+ + c-) / (2 alpha sin(pi alpha/2) Gamma(alpha))}^{1/alpha}.
/// alpha must lie in (0, 2); the Gaussian case alpha = 2 is rejected.
GcltParams gclt_params_from_tails(const TailCoefficients& tails, double alpha);

enum class GenerationMode { chaotic, iid };

std::string to_string(GenerationMode mode);
GenerationMode parse_generation_mode(const std::string& text);

struct Trajectory {
  Eigen::ArrayXd values;
  MapParamsd params;
  GenerationMode mode = GenerationMode::chaotic;
  /// Orbit restarts forced by degenerate points.
  std::size_t reseeds = 0;
};

/// Exact draw from the invariant density by inversion; never returns 0.
double sample_invariant(const MapParamsd& params, RandomSource& rng);

/// Chaotic mode: x0 from the invariant law, then iterate map_step (after an
/// optional burn-in), recording every `stride`-th iterate. iid mode:
/// independent invariant draws, stride ignored. Every entry is marginally
/// distributed by the invariant density in both modes.
Trajectory generate_trajectory(const MapParamsd& params, std::size_t length, GenerationMode mode, RandomSource& rng,
                               std::size_t burn_in = 0, std::size_t stride = 1);

/// Fills `out` in place; same contract as generate_trajectory, returns the reseed count.
std::size_t fill_trajectory(const MapParamsd& params, GenerationMode mode, RandomSource& rng, Eigen::Ref<Eigen::ArrayXd> out,
                            std::size_t burn_in = 0, std::size_t stride = 1);

}  // namespace sgclt
