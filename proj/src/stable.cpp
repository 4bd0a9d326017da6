#include "sgclt/stable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace sgclt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr unsigned kMaxDepth = 12;
constexpr std::size_t kMaxPanels = 200000;

// Phase of phi(t) for t > 0 together with its modulus.
struct CfPolar {
  double modulus;
  double phase;
};

CfPolar cf_polar(const StableParamsd& p, double t) {
  const double mag = std::pow(p.gamma * t, p.alpha);
  const double w = p.alpha == 1.0 ? -2.0 / kPi * std::log(t) : std::tan(kPi * p.alpha / 2.0);
  return {std::exp(-mag), p.mu * t + mag * p.beta * w};
}

// Rough upper bound on the angular frequency of t -> phase(t) - x t on [0, T].
double phase_frequency(const StableParamsd& p, double x, double upper) {
  double freq = std::abs(x - p.mu) + 1.0 / p.gamma;
  const double gpow = std::pow(p.gamma, p.alpha);
  if (p.alpha == 1.0) {
    freq += 2.0 / kPi * p.gamma * std::abs(p.beta) * (std::abs(std::log(upper)) + 2.0);
  } else if (p.alpha > 1.0) {
    freq += p.alpha * gpow * std::abs(p.beta * std::tan(kPi * p.alpha / 2.0)) * std::pow(upper, p.alpha - 1.0);
  } else {
    freq += gpow * std::abs(p.beta * std::tan(kPi * p.alpha / 2.0));
  }
  return freq;
}

std::size_t panel_count(double upper, double freq) {
  const double n = std::ceil(upper * freq / kPi);
  return static_cast<std::size_t>(std::clamp(n, 8.0, static_cast<double>(kMaxPanels)));
}

struct Integral {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive bisection with an absolute error target; relative targets stall on
// oscillatory panels whose integral is close to zero.
template <typename F>
Integral integrate_adaptive(const F& f, double a, double b, double abs_tol, unsigned depth) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  const double value = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err);
  if (err <= abs_tol || depth == 0) return {value, err};
  const double mid = 0.5 * (a + b);
  const Integral left = integrate_adaptive(f, a, mid, abs_tol / 2.0, depth - 1);
  const Integral right = integrate_adaptive(f, mid, b, abs_tol / 2.0, depth - 1);
  return {left.value + right.value, left.error + right.error};
}

template <typename F>
Integral integrate_panels(const F& f, double lo, double hi, std::size_t panels, double abs_tol) {
  Integral out;
  const double h = (hi - lo) / static_cast<double>(panels);
  const double panel_tol = abs_tol / static_cast<double>(panels);
  for (std::size_t k = 0; k < panels; ++k) {
    const double a = lo + h * static_cast<double>(k);
    const double b = k + 1 == panels ? hi : a + h;
    const Integral r = integrate_adaptive(f, a, b, panel_tol, kMaxDepth);
    out.value += r.value;
    out.error += r.error;
  }
  return out;
}

}  // namespace

double cf_truncation_point(double alpha, double gamma, double bound) {
  if (!(bound > 0.0)) throw std::invalid_argument("cf_truncation_point: bound must be positive");
  // int_T^inf exp(-(gamma t)^alpha) dt = Gamma(1/alpha, z) / (alpha gamma), z = (gamma T)^alpha
  const double a = 1.0 / alpha;
  const auto tail = [&](double z) { return boost::math::tgamma(a, z) / (alpha * gamma * kPi); };
  double lo = 0.0;
  double hi = 1.0;
  while (tail(hi) > bound) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > bound ? lo : hi) = mid;
  }
  return std::pow(hi, 1.0 / alpha) / gamma;
}

double stable_pdf(const StableParamsd& params, double x, double tol) {
  params.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("stable_pdf: tol must be positive");
  if (!std::isfinite(x)) return 0.0;

  const double upper = cf_truncation_point(params.alpha, params.gamma, tol / 10.0);
  const auto integrand = [&](double t) {
    if (t <= 0.0) return 1.0;
    const CfPolar c = cf_polar(params, t);
    return c.modulus * std::cos(c.phase - x * t);
  };
  const std::size_t panels = panel_count(upper, phase_frequency(params, x, upper));
  const double first = upper / static_cast<double>(panels);
  // the phase has an unbounded derivative at 0 when alpha < 1
  thread_local boost::math::quadrature::tanh_sinh<double> head_rule;
  double head_err = 0.0;
  Integral r{head_rule.integrate(integrand, 0.0, first, 1e-13, &head_err), 0.0};
  r.error = head_err;
  if (panels > 1) {
    const Integral rest = integrate_panels(integrand, first, upper, panels - 1, kPi * tol / 20.0);
    r.value += rest.value;
    r.error += rest.error;
  }
  const double err = r.error / kPi + tol / 10.0;
  if (err > tol) throw NumericalAccuracyError("stable_pdf: quadrature did not converge", err);
  // clamped residue is within the error budget
  return std::max(r.value / kPi, 0.0);
}

double stable_cdf(const StableParamsd& params, double x, double tol) {
  params.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("stable_cdf: tol must be positive");
  if (x == std::numeric_limits<double>::infinity()) return 1.0;
  if (x == -std::numeric_limits<double>::infinity()) return 0.0;

  // 1/t <= 1 beyond a cutoff >= 1, so the tail bound carries over
  const double upper = std::max(cf_truncation_point(params.alpha, params.gamma, tol / 10.0), 1.0);
  const auto integrand = [&](double t) {
    const CfPolar c = cf_polar(params, t);
    return c.modulus * std::sin(c.phase - x * t) / t;
  };

  const std::size_t panels = panel_count(upper, phase_frequency(params, x, upper));
  const double first = upper / static_cast<double>(panels);
  // integrable singularity at 0 (t^{alpha-1}, or log t when alpha == 1)
  thread_local boost::math::quadrature::tanh_sinh<double> head_rule;
  double head_err = 0.0;
  const double head = head_rule.integrate(integrand, 0.0, first, 1e-13, &head_err);
  const Integral rest = panels > 1 ? integrate_panels(integrand, first, upper, panels - 1, kPi * tol / 20.0) : Integral{};

  const double err = (head_err + rest.error) / kPi + tol / 10.0;
  if (err > tol) throw NumericalAccuracyError("stable_cdf: quadrature did not converge", err);
  return std::clamp(0.5 - (head + rest.value) / kPi, 0.0, 1.0);
}

}  // namespace sgclt
