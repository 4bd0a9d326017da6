#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "generators.hpp"
#include "sgclt/stable.hpp"

using namespace sgclt;
using sgclt::testing::for_cases;
using sgclt::testing::random_stable;
using sgclt::testing::uniform_in;

namespace {

constexpr double kPi = std::numbers::pi;

// C_alpha with P(X > x) ~ C_alpha (1 + beta) gamma^alpha x^{-alpha}
double tail_constant(double alpha) { return std::sin(kPi * alpha / 2) * std::tgamma(alpha) / kPi; }

// Composite Simpson on (1/pi) int_0^T Re[phi(t) e^{-ixt}] dt, written independently of the library.
double simpson_density(double alpha, double beta, double x, double upper, std::size_t intervals) {
  const auto f = [&](double t) {
    if (t == 0.0) return 1.0;
    const double mag = std::pow(t, alpha);
    const double phase = mag * beta * std::tan(kPi * alpha / 2) - x * t;
    return std::exp(-mag) * std::cos(phase);
  };
  const double h = upper / static_cast<double>(intervals);
  double s = f(0.0) + f(upper);
  for (std::size_t k = 1; k < intervals; ++k) s += (k % 2 == 1 ? 4.0 : 2.0) * f(h * static_cast<double>(k));
  return s * h / 3.0 / kPi;
}

}  // namespace

TEST_SUITE("stable_core") {
  TEST_CASE("characteristic function closed forms") {
    const auto c1 = cf_eval(StableParamsd{1, 0, 1, 0}, 2.0);
    CHECK(c1.real() == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(std::abs(c1.imag()) < 1e-16);
    const auto c2 = cf_eval(StableParamsd{2, 0, 1, 0}, 1.0);
    CHECK(c2.real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(std::abs(c2.imag()) < 1e-16);
    CHECK(cf_eval(StableParamsd{1, 1, 2, 3}, 0.0) == ComplexValue(1.0, 0.0));
  }

  TEST_CASE("characteristic function against a 50-digit evaluation") {
    using Big = boost::multiprecision::cpp_bin_float_50;
    const Big alpha("1.5"), beta("0.5"), gamma("2"), mu("1"), t("0.3");
    const Big pi = boost::math::constants::pi<Big>();
    const Big mag = pow(gamma * t, alpha);
    const Big phase = mu * t + mag * beta * tan(pi * alpha / 2);
    const Big re = exp(-mag) * cos(phase);
    const Big im = exp(-mag) * sin(phase);
    const auto v = cf_eval(StableParamsd{1.5, 0.5, 2, 1}, 0.3);
    CHECK(std::abs(v.real() - static_cast<double>(re)) < 1e-12);
    CHECK(std::abs(v.imag() - static_cast<double>(im)) < 1e-12);
  }

  TEST_CASE("alpha = 1 branch against a 50-digit evaluation") {
    using Big = boost::multiprecision::cpp_bin_float_50;
    const Big beta("-0.7"), gamma("1.3"), mu("0.4"), t("2.5");
    const Big pi = boost::math::constants::pi<Big>();
    const Big mag = gamma * t;
    const Big phase = mu * t + mag * beta * (-2 / pi * log(t));
    const auto v = cf_eval(StableParamsd{1, -0.7, 1.3, 0.4}, 2.5);
    CHECK(std::abs(v.real() - static_cast<double>(exp(-mag) * cos(phase))) < 1e-12);
    CHECK(std::abs(v.imag() - static_cast<double>(exp(-mag) * sin(phase))) < 1e-12);
  }

  TEST_CASE("Hermitian symmetry and modulus law") {
    for_cases(1, 200, [](RandomSource& rng, int) {
      const StableParamsd p = random_stable(rng);
      const double t = uniform_in(rng, -5, 5);
      const auto a = cf_eval(p, t);
      const auto b = cf_eval(p, -t);
      CHECK(std::abs(b - std::conj(a)) < 1e-13);
      CHECK(std::abs(std::abs(a) - std::exp(-std::pow(p.gamma * std::abs(t), p.alpha))) < 1e-14);
      CHECK(std::abs(a) <= 1.0);
    });
  }

  TEST_CASE("scale and shift law") {
    CHECK(scale_shift_transform(5.0, StableParamsd{1.5, 0, 1, 0}) == 5.0);
    CHECK(scale_shift_transform(0.0, StableParamsd{1, 1, std::exp(1.0), 0}) ==
          doctest::Approx(2 * std::exp(1.0) / kPi).epsilon(1e-15));
    CHECK(scale_shift_transform(1.0, StableParamsd{0.5, -1, 3, 2}) == 5.0);
  }

  TEST_CASE("scale and shift law matches the characteristic function") {
    // if X0 ~ S(a, b, 1, 0) then gamma X0 + mu (+ alpha = 1 term) has the cf of S(a, b, gamma, mu)
    for_cases(2, 100, [](RandomSource& rng, int) {
      StableParamsd p = random_stable(rng);
      const double t = uniform_in(rng, 0.05, 3);
      const StableParamsd unit{p.alpha, p.beta, 1, 0};
      const double shift = scale_shift_transform(0.0, p);
      const auto predicted = cf_eval(unit, p.gamma * t) * std::polar(1.0, shift * t);
      CHECK(std::abs(predicted - cf_eval(p, t)) < 1e-12);
    });
  }

  TEST_CASE("combine_stable examples") {
    const std::vector<StableParamsd> same(3, StableParamsd{1.5, 0, 1, 0});
    CHECK(combine_stable<double>(same) == StableParamsd{1.5, 0, 1, 0});

    const std::array<StableParamsd, 2> mixed{StableParamsd{1, 1, 1, 0}, StableParamsd{1, 0, 1, 0}};
    const auto r = combine_stable<double>(mixed);
    CHECK(r.alpha == 1.0);
    CHECK(r.beta == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.gamma == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.mu == doctest::Approx(std::log(2.0) / kPi).epsilon(1e-15));

    const std::array<StableParamsd, 2> opposite{StableParamsd{0.5, 1, 1, 0}, StableParamsd{0.5, -1, 1, 0}};
    const auto o = combine_stable<double>(opposite);
    CHECK(o.beta == 0.0);
    CHECK(o.gamma == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(o.mu == 0.0);
  }

  TEST_CASE("combine_stable equals the product of component characteristic functions") {
    for_cases(3, 100, [](RandomSource& rng, int k) {
      const double alpha = k % 3 == 0 ? 1.0 : uniform_in(rng, 0.3, 1.9);
      const int n = 2 + k % 5;
      std::vector<StableParamsd> comps;
      for (int j = 0; j < n; ++j) comps.push_back({alpha, uniform_in(rng, -1, 1), uniform_in(rng, 0.3, 2.0), 0});
      const StableParamsd z = combine_stable<double>(comps);
      const double t = uniform_in(rng, -3, 3);
      const double scale = std::pow(static_cast<double>(n), 1.0 / alpha);
      ComplexValue prod(1, 0);
      for (const auto& c : comps) prod *= cf_eval(c, t / scale);
      CHECK(std::abs(prod - cf_eval(z, t)) < 1e-12);
    });
  }

  TEST_CASE("combine_stable rejects mixed alpha and nonzero location") {
    const std::array<StableParamsd, 2> bad_alpha{StableParamsd{1, 0, 1, 0}, StableParamsd{1.5, 0, 1, 0}};
    CHECK_THROWS_AS(combine_stable<double>(bad_alpha), std::invalid_argument);
    const std::array<StableParamsd, 1> bad_mu{StableParamsd{1, 0, 1, 1}};
    CHECK_THROWS_AS(combine_stable<double>(bad_mu), std::invalid_argument);
  }

  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(StableParamsd({0, 0, 1, 0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(StableParamsd({2.1, 0, 1, 0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(StableParamsd({1, 1.5, 1, 0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(StableParamsd({1, 0, 0, 0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(stable_pdf({1, 0, -1, 0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(stable_pdf({1, 0, 1, 0}, 0.0, 0.0), std::invalid_argument);
  }

  TEST_CASE("density matches Cauchy and Gaussian closed forms on [-10, 10]") {
    double worst = 0;
    for (int k = -100; k <= 100; ++k) {
      const double x = 0.1 * k;
      worst = std::max(worst, std::abs(stable_pdf({1, 0, 1, 0}, x) - 1 / (kPi * (1 + x * x))));
      worst = std::max(worst, std::abs(stable_pdf({2, 0, 1, 0}, x) - std::exp(-x * x / 4) / (2 * std::sqrt(kPi))));
    }
    CHECK(worst <= 1e-6);
    CHECK(stable_pdf({1, 0, 1, 0}, 0.0) == doctest::Approx(1 / kPi).epsilon(1e-9));
    CHECK(stable_pdf({2, 0, 1, 0}, 0.0) == doctest::Approx(1 / (2 * std::sqrt(kPi))).epsilon(1e-9));
  }

  TEST_CASE("density of the one-sided alpha = 1/2 law") {
    // S(1/2, 1, 1, 0) is the Levy law with unit scale
    for (const double x : {0.2, 1.0, 3.0, 40.0}) {
      const double levy = std::exp(-1 / (2 * x)) / std::sqrt(2 * kPi * x * x * x);
      CHECK(std::abs(stable_pdf({0.5, 1, 1, 0}, x) - levy) < 1e-8);
    }
    CHECK(stable_pdf({0.5, 1, 1, 0}, -1.0) < 1e-9);
  }

  TEST_CASE("density agrees with a finer independent quadrature") {
    const double fine = simpson_density(1.5, 0.3, 1.0, 40.0, 400000);
    CHECK(std::abs(stable_pdf({1.5, 0.3, 1, 0}, 1.0, 1e-10) - fine) < 1e-8);
  }

  TEST_CASE("density location-scale covariance") {
    for_cases(4, 20, [](RandomSource& rng, int) {
      StableParamsd p = random_stable(rng, false);
      if (p.alpha < 0.5) p.alpha = 0.5 + p.alpha;
      const double x = uniform_in(rng, -4, 4);
      const StableParamsd unit{p.alpha, p.beta, 1, 0};
      const double expected = stable_pdf(unit, (x - p.mu) / p.gamma) / p.gamma;
      CHECK(std::abs(stable_pdf(p, x) - expected) < 1e-8);
    });
  }

  TEST_CASE("density reflection: f(x; beta) = f(-x; -beta)") {
    for (const double x : {-3.0, -0.5, 0.7, 2.0}) {
      CHECK(std::abs(stable_pdf({1.3, 0.6, 1, 0}, x) - stable_pdf({1.3, -0.6, 1, 0}, -x)) < 1e-9);
      CHECK(std::abs(stable_pdf({1.0, 0.6, 1, 0}, x) - stable_pdf({1.0, -0.6, 1, 0}, -x)) < 1e-9);
    }
  }

  TEST_CASE("density tail follows alpha C_alpha (1 + beta) x^{-alpha-1}") {
    const double alpha = 1.5, beta = 0.3, x = 200.0;
    const double predicted = alpha * tail_constant(alpha) * (1 + beta) * std::pow(x, -alpha - 1);
    CHECK(stable_pdf({alpha, beta, 1, 0}, x, 1e-10) == doctest::Approx(predicted).epsilon(0.01));
  }

  TEST_CASE("density integrates to one") {
    const StableParamsd p{1.5, 0.3, 1, 0};
    const double bound = 1000.0;
    // Simpson in u with x = 5 sinh(u), then the analytic tails beyond +-bound
    const double umax = std::asinh(bound / 5);
    const std::size_t n = 6000;
    const double h = 2 * umax / static_cast<double>(n);
    const auto f = [&](double u) { return stable_pdf(p, 5 * std::sinh(u)) * 5 * std::cosh(u); };
    double s = f(-umax) + f(umax);
    for (std::size_t k = 1; k < n; ++k) s += (k % 2 == 1 ? 4.0 : 2.0) * f(-umax + h * static_cast<double>(k));
    const double tails = tail_constant(p.alpha) * 2 * std::pow(bound, -p.alpha);
    CHECK(std::abs(s * h / 3 + tails - 1.0) < 1e-6);
  }

  TEST_CASE("distribution function") {
    CHECK(stable_cdf({1, 0, 1, 0}, 0.0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(stable_cdf({1, 0, 1, 0}, 1.0) == doctest::Approx(0.75).epsilon(1e-8));
    CHECK(stable_cdf({1.5, 0, 1, 0}, 0.0) == doctest::Approx(0.5).epsilon(1e-9));
    for (const double x : {-4.0, -1.0, 0.3, 2.5}) {
      CHECK(std::abs(stable_cdf({1, 0, 1, 0}, x) - (0.5 + std::atan(x) / kPi)) < 1e-8);
      CHECK(std::abs(stable_cdf({2, 0, 1, 0}, x) - 0.5 * std::erfc(-x / 2)) < 1e-8);
    }
    CHECK(stable_cdf({1.2, 0.4, 1, 0}, -INFINITY) == 0.0);
    CHECK(stable_cdf({1.2, 0.4, 1, 0}, INFINITY) == 1.0);
  }

  TEST_CASE("distribution function is monotone and differentiates to the density") {
    const StableParamsd p{1.2, 0.4, 1.5, -0.5};
    double prev = 0.0;
    for (double x = -6; x <= 6; x += 0.5) {
      const double f = stable_cdf(p, x);
      CHECK(f >= prev - 1e-9);
      prev = f;
      const double h = 1e-3;
      const double slope = (stable_cdf(p, x + h, 1e-11) - stable_cdf(p, x - h, 1e-11)) / (2 * h);
      CHECK(std::abs(slope - stable_pdf(p, x)) < 1e-6);
    }
  }

  TEST_CASE("truncation point bounds the neglected tail") {
    for (const double alpha : {0.5, 1.0, 1.5, 2.0}) {
      const double t = cf_truncation_point(alpha, 1.3, 1e-10);
      const double z = std::pow(1.3 * t, alpha);
      CHECK(boost::math::tgamma(1 / alpha, z) / (alpha * 1.3 * kPi) <= 1e-10 * (1 + 1e-9));
    }
    CHECK_THROWS_AS(cf_truncation_point(1.0, 1.0, 0.0), std::invalid_argument);
  }
}
