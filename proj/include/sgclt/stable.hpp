#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

namespace sgclt {

/// Four-parameter stable law S(alpha, beta, gamma, mu) in the 1-parameterization,
///
///   phi(t) = exp{ i mu t - gamma^alpha |t|^alpha (1 - i beta sgn(t) w(alpha, t)) }
///   w(alpha, t) = tan(pi alpha / 2)   (alpha != 1)
///               = -(2/pi) log|t|      (alpha == 1)
///
/// which is discontinuous in alpha at 1. Templated on the scalar so the closed
/// forms can be evaluated in extended precision.
template <typename Scalar>
struct StableParams {
  Scalar alpha{1};
  Scalar beta{0};
  Scalar gamma{1};
  Scalar mu{0};

  bool valid() const {
    using std::isfinite;
    return alpha > Scalar(0) && alpha <= Scalar(2) && beta >= Scalar(-1) && beta <= Scalar(1) &&
           gamma > Scalar(0) && isfinite(gamma) && isfinite(mu);
  }

  void validate() const {
    if (!valid()) {
      throw std::invalid_argument("invalid stable parameters: alpha in (0,2], beta in [-1,1], gamma > 0, mu finite required");
    }
  }

  friend bool operator==(const StableParams&, const StableParams&) = default;
};

using StableParamsd = StableParams<double>;
using ComplexValue = std::complex<double>;

namespace detail {

template <typename Scalar>
Scalar pi() {
  return std::numbers::pi_v<Scalar>;
}

template <typename Scalar>
bool is_cauchy_branch(Scalar alpha) {
  return alpha == Scalar(1);
}

}  // namespace detail

/// Characteristic function phi(t). phi(0) is defined as exactly 1, which also
/// removes the |t| log|t| singularity of the alpha == 1 branch.
template <typename Scalar>
std::complex<Scalar> cf_eval(const StableParams<Scalar>& p, Scalar t) {
  using std::abs;
  using std::exp;
  using std::log;
  using std::pow;
  using std::tan;
  if (t == Scalar(0)) return {Scalar(1), Scalar(0)};

  const Scalar abs_t = abs(t);
  const Scalar sgn = t > Scalar(0) ? Scalar(1) : Scalar(-1);
  const Scalar w = detail::is_cauchy_branch(p.alpha) ? -Scalar(2) / detail::pi<Scalar>() * log(abs_t)
                                                     : tan(detail::pi<Scalar>() * p.alpha / Scalar(2));
  const Scalar mag = pow(p.gamma, p.alpha) * pow(abs_t, p.alpha);
  // exponent = -mag + i (mu t + mag beta sgn w)
  const Scalar modulus = exp(-mag);
  const Scalar phase = p.mu * t + mag * p.beta * sgn * w;
  return std::polar(modulus, phase);
}

/// Maps a draw x0 ~ S(alpha, beta, 1, 0) to a draw from S(alpha, beta, gamma, mu).
template <typename Scalar>
Scalar scale_shift_transform(Scalar x0, const StableParams<Scalar>& p) {
  using std::log;
  Scalar x = p.gamma * x0 + p.mu;
  if (detail::is_cauchy_branch(p.alpha)) {
    x += Scalar(2) / detail::pi<Scalar>() * p.beta * p.gamma * log(p.gamma);
  }
  return x;
}

/// Law of Z_n = (X_1 + ... + X_n) / n^{1/alpha} for independent
/// X_j ~ S(alpha, beta_j, gamma_j, 0) sharing alpha.
///
/// For alpha == 1 the location is (2 ln n)/(n pi) * sum beta_j gamma_j, the sign
/// implied by the product of the component characteristic functions.
template <typename Scalar>
StableParams<Scalar> combine_stable(std::span<const StableParams<Scalar>> components) {
  using std::log;
  using std::pow;
  if (components.empty()) throw std::invalid_argument("combine_stable: at least one component required");
  const Scalar alpha = components.front().alpha;
  Scalar sum_scale_pow{0};
  Scalar sum_skew_scale_pow{0};
  Scalar sum_skew_scale{0};
  for (const auto& c : components) {
    c.validate();
    if (c.alpha != alpha) throw std::invalid_argument("combine_stable: components must share alpha");
    if (c.mu != Scalar(0)) throw std::invalid_argument("combine_stable: components must have mu = 0");
    const Scalar gpow = pow(c.gamma, alpha);
    sum_scale_pow += gpow;
    sum_skew_scale_pow += c.beta * gpow;
    sum_skew_scale += c.beta * c.gamma;
  }
  const auto n = static_cast<Scalar>(components.size());
  StableParams<Scalar> out;
  out.alpha = alpha;
  out.beta = sum_skew_scale_pow / sum_scale_pow;
  out.gamma = pow(sum_scale_pow / n, Scalar(1) / alpha);
  out.mu = detail::is_cauchy_branch(alpha) ? Scalar(2) * log(n) / (n * detail::pi<Scalar>()) * sum_skew_scale : Scalar(0);
  return out;
}

/// Raised when numerical inversion cannot reach the requested accuracy.
class NumericalAccuracyError : public std::runtime_error {
 public:
  NumericalAccuracyError(const std::string& what, double achieved_error)
      : std::runtime_error(what + " (achieved error estimate " + format_error(achieved_error) + ")"),
        achieved_error_(achieved_error) {}
  double achieved_error() const { return achieved_error_; }

 private:
  static std::string format_error(double e) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", e);
    return buf;
  }

  double achieved_error_;
};

/// Density by Fourier inversion, (1/pi) * int_0^T Re[phi(t) e^{-ixt}] dt, with T
/// chosen so the neglected tail is below tol/10. Absolute error <= tol; small
/// negative residue is clamped to zero.
double stable_pdf(const StableParamsd& params, double x, double tol = 1e-9);

/// Distribution function by the Gil-Pelaez inversion formula.
double stable_cdf(const StableParamsd& params, double x, double tol = 1e-9);

/// Integration cutoff T with int_T^inf exp(-(gamma t)^alpha) dt / pi <= bound.
double cf_truncation_point(double alpha, double gamma, double bound);

}  // namespace sgclt
