#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "generators.hpp"
#include "sgclt/chaos.hpp"
#include "sgclt/gof.hpp"

using namespace sgclt;
using sgclt::testing::for_cases;
using sgclt::testing::random_map;
using sgclt::testing::uniform_in;

namespace {

constexpr double kPi = std::numbers::pi;

// The map conjugates to angle doubling: with x = F^{-1}(u) and u = F(x),
// F(g(x)) = 2 F(x) mod 1 (up to the branch convention at the jumps).
double doubled(double u) { return std::fmod(2.0 * u, 1.0); }

}  // namespace

TEST_SUITE("power_law_chaos") {
  TEST_CASE("map examples") {
    const MapParamsd unit{1, 1, 1};
    CHECK(map_step(std::sqrt(3.0), unit).value() == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(map_step(0.5, unit).value() == doctest::Approx(-0.75).epsilon(1e-14));
    CHECK(map_step(4.0, MapParamsd{0.5, 1, 1}).value() == doctest::Approx(9.0 / 16).epsilon(1e-14));
  }

  TEST_CASE("alpha = 1, unit deltas is x -> (x - 1/x) / 2") {
    for_cases(20, 200, [](RandomSource& rng, int) {
      double x = uniform_in(rng, -20, 20);
      if (std::abs(x) < 1e-3 || std::abs(std::abs(x) - 1) < 1e-9) return;
      CHECK(map_step(x, MapParamsd{1, 1, 1}).value() == doctest::Approx((x - 1 / x) / 2).epsilon(1e-13));
    });
  }

  TEST_CASE("exceptional points yield no image") {
    const MapParamsd p{1.3, 2, 0.5};
    CHECK_FALSE(map_step(0.0, p).has_value());
    CHECK_FALSE(map_step(1 / p.delta1, p).has_value());
    CHECK_FALSE(map_step(-1 / p.delta2, p).has_value());
  }

  TEST_CASE("map is conjugate to angle doubling through the invariant CDF") {
    for_cases(21, 300, [](RandomSource& rng, int) {
      const MapParamsd p = random_map(rng);
      const double u = uniform_in(rng, 0.01, 0.99);
      if (std::abs(u - 0.5) < 1e-3 || std::abs(u - 0.25) < 1e-3 || std::abs(u - 0.75) < 1e-3) return;
      const double x = invariant_inverse_cdf(u, p);
      const auto y = map_step(x, p);
      REQUIRE(y.has_value());
      CHECK(std::abs(invariant_cdf(*y, p) - doubled(u)) < 1e-9);
    });
  }

  TEST_CASE("invariant density examples") {
    for (const double x : {-7.0, -1.0, 0.3, 2.0, 50.0}) {
      CHECK(invariant_density(x, MapParamsd{1, 1, 1}) == doctest::Approx(1 / (kPi * (1 + x * x))).epsilon(1e-14));
    }
    CHECK(invariant_density(0.0, MapParamsd{1.5, 2, 3}) == 0.0);
    CHECK_THROWS_AS(invariant_density(0.0, MapParamsd{0.5, 1, 1}), std::domain_error);
  }

  TEST_CASE("invariant density is the derivative of the CDF") {
    for_cases(22, 200, [](RandomSource& rng, int) {
      const MapParamsd p = random_map(rng);
      double x = uniform_in(rng, -5, 5);
      if (std::abs(x) < 0.05) return;
      const double h = 1e-6 * std::max(1.0, std::abs(x));
      const double slope = (invariant_cdf(x + h, p) - invariant_cdf(x - h, p)) / (2 * h);
      CHECK(slope == doctest::Approx(invariant_density(x, p)).epsilon(1e-5));
    });
  }

  TEST_CASE("invariant density has unit mass") {
    // midpoint rule in v with x = sgn(v) |sinh v|^{1/alpha}, which removes the |x|^{alpha-1} cusp at 0
    for (const MapParamsd& p : {MapParamsd{1, 1, 1}, MapParamsd{0.7, 1, 2}, MapParamsd{1.5, 3, 1}}) {
      const double bound = 1e4;
      const double a = p.alpha;
      const auto f = [&](double v) {
        const double s = std::abs(std::sinh(v));
        const double x = std::copysign(std::pow(s, 1 / a), v);
        return invariant_density(x, p) * std::pow(s, 1 / a - 1) * std::cosh(v) / a;
      };
      const double vmax = std::asinh(std::pow(bound, a));
      const std::size_t n = 200000;
      const double h = 2 * vmax / n;
      double s = 0;
      for (std::size_t k = 0; k < n; ++k) s += f(-vmax + h * (static_cast<double>(k) + 0.5));
      const TailCoefficients c = tail_coefficients(p);
      const double tails = (c.c_plus + c.c_minus) / a * std::pow(bound, -a);
      CAPTURE(a);
      CHECK(std::abs(s * h + tails - 1.0) < 1e-6);
    }
  }

  TEST_CASE("inverse CDF") {
    const MapParamsd p{1.2, 2, 0.7};
    CHECK(invariant_inverse_cdf(0.5, p) == 0.0);
    CHECK(invariant_inverse_cdf(0.75, MapParamsd{1, 1, 1}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(invariant_inverse_cdf(0.6, p) > 0);
    CHECK(invariant_inverse_cdf(0.4, p) < 0);
    CHECK_THROWS(invariant_inverse_cdf(0.0, p));
    CHECK_THROWS(invariant_inverse_cdf(1.0, p));
    for_cases(23, 300, [](RandomSource& rng, int) {
      const MapParamsd q = random_map(rng);
      const double u = uniform_in(rng, 1e-6, 1 - 1e-6);
      CHECK(std::abs(invariant_cdf(invariant_inverse_cdf(u, q), q) - u) < 1e-12);
    });
  }

  TEST_CASE("tail coefficients") {
    const auto sym = tail_coefficients(MapParamsd{1.3, 2, 2});
    CHECK(sym.c_plus == sym.c_minus);
    const auto t = tail_coefficients(MapParamsd{1, 3, 1});
    CHECK(t.c_plus == doctest::Approx(1 / (3 * kPi)).epsilon(1e-15));
    CHECK(t.c_minus == doctest::Approx(1 / kPi).epsilon(1e-15));
    CHECK(tail_coefficients(MapParamsd{0.5, 1, 5}).c_plus == doctest::Approx(1 / (2 * kPi)).epsilon(1e-15));
  }

  TEST_CASE("tail coefficients describe the density tails") {
    for_cases(24, 50, [](RandomSource& rng, int) {
      const MapParamsd p = random_map(rng);
      const TailCoefficients c = tail_coefficients(p);
      const double x = 1e5 / std::min(p.delta1, p.delta2);
      CHECK(invariant_density(x, p) * std::pow(x, p.alpha + 1) == doctest::Approx(c.c_plus).epsilon(1e-4));
      CHECK(invariant_density(-x, p) * std::pow(x, p.alpha + 1) == doctest::Approx(c.c_minus).epsilon(1e-4));
    });
  }

  TEST_CASE("stable parameters from tails") {
    const auto g = gclt_params_from_tails(tail_coefficients(MapParamsd{1, 3, 1}), 1.0);
    CHECK(std::abs(g.beta + 0.5) < 1e-12);
    CHECK(std::abs(g.gamma - 2.0 / 3) < 1e-12);

    const auto sym = gclt_params_from_tails({0.2, 0.2}, 1.4);
    CHECK(sym.beta == 0.0);

    // alpha = 1/2: Gamma(1/2) = sqrt(pi), sin(pi/4) = sqrt(2)/2, so k = sqrt(2 pi)
    const auto h = gclt_params_from_tails(tail_coefficients(MapParamsd{0.5, 3, 1}), 0.5);
    const double cp = 0.5 / (kPi * std::sqrt(3.0)), cm = 0.5 / kPi;
    CHECK(h.beta == doctest::Approx((cp - cm) / (cp + cm)).epsilon(1e-14));
    CHECK(h.beta == doctest::Approx(-0.2679491924).epsilon(1e-9));
    CHECK(h.gamma == doctest::Approx(std::pow(std::sqrt(2 * kPi) * (cp + cm), 2.0)).epsilon(1e-14));
    CHECK(h.gamma == doctest::Approx(0.3959828893).epsilon(1e-9));

    CHECK_THROWS(gclt_params_from_tails({0.1, 0.1}, 2.0));
    CHECK_THROWS(gclt_params_from_tails({0.1, 0.1}, 0.0));
  }

  TEST_CASE("trajectory of length one is a single invariant draw") {
    const MapParamsd p{0.8, 1.5, 0.5};
    for (const auto mode : {GenerationMode::chaotic, GenerationMode::iid}) {
      RandomSource a(30), b(30);
      const Trajectory t = generate_trajectory(p, 1, mode, a);
      REQUIRE(t.values.size() == 1);
      CHECK(t.values[0] == sample_invariant(p, b));
    }
    RandomSource r(31);
    CHECK_THROWS(generate_trajectory(p, 0, GenerationMode::iid, r));
  }

  TEST_CASE("chaotic orbit spends half its time in [-1, 1] for the Cauchy map") {
    RandomSource rng(32);
    const Trajectory t = generate_trajectory(MapParamsd{1, 1, 1}, 100000, GenerationMode::chaotic, rng);
    const double inside = (t.values.abs() <= 1.0).cast<double>().mean();
    CHECK(std::abs(inside - 0.5) < 0.01);
  }

  TEST_CASE("chaotic and iid trajectories share the invariant marginal") {
    const MapParamsd p{1.5, 3, 1};
    int accepted = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      RandomSource rng = RandomSource(33).derive_child(seed);
      const Trajectory c = generate_trajectory(p, 100000, GenerationMode::chaotic, rng);
      const Trajectory i = generate_trajectory(p, 100000, GenerationMode::iid, rng);
      accepted += decide(ks_two_sample(as_span(c.values), as_span(i.values)).p_value) ? 0 : 1;
    }
    CHECK(accepted >= 6);
  }

  TEST_CASE("chaotic stride records every k-th iterate") {
    const MapParamsd p{1.2, 1.4, 0.9};
    RandomSource a(34), b(34);
    const Trajectory dense = generate_trajectory(p, 3000, GenerationMode::chaotic, a);
    const Trajectory sparse = generate_trajectory(p, 1000, GenerationMode::chaotic, b, 0, 3);
    REQUIRE(dense.reseeds == 0);
    for (Eigen::Index k = 0; k < 1000; ++k) CHECK(sparse.values[k] == dense.values[3 * k]);
  }

  TEST_CASE("burn-in discards the leading iterates") {
    const MapParamsd p{0.9, 1, 1};
    RandomSource a(35), b(35);
    const Trajectory full = generate_trajectory(p, 50, GenerationMode::chaotic, a);
    const Trajectory late = generate_trajectory(p, 40, GenerationMode::chaotic, b, 10);
    for (Eigen::Index k = 0; k < 40; ++k) CHECK(late.values[k] == full.values[k + 10]);
  }

  TEST_CASE("one map step preserves the invariant law") {
    const MapParamsd p{0.7, 2, 1};
    RandomSource rng(36);
    const std::size_t n = 200000;
    std::vector<double> pushed;
    pushed.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto y = map_step(sample_invariant(p, rng), p);
      if (y) pushed.push_back(*y);
    }
    // DKW: sup |F_n - F| <= sqrt(ln(2/0.001) / (2n)) with probability 0.999
    const double bound = std::sqrt(std::log(2 / 0.001) / (2.0 * static_cast<double>(pushed.size())));
    std::sort(pushed.begin(), pushed.end());
    double worst = 0;
    for (std::size_t k = 0; k < pushed.size(); k += 97) {
      const double f = invariant_cdf(pushed[k], p);
      worst = std::max(worst, std::abs(f - static_cast<double>(k + 1) / static_cast<double>(pushed.size())));
    }
    CHECK(worst < bound);
  }

  TEST_CASE("generation modes round-trip through text") {
    CHECK(parse_generation_mode(to_string(GenerationMode::chaotic)) == GenerationMode::chaotic);
    CHECK(parse_generation_mode(to_string(GenerationMode::iid)) == GenerationMode::iid);
    CHECK_THROWS(parse_generation_mode("ergodic"));
  }

  TEST_CASE("parameter validation") {
    RandomSource rng(37);
    CHECK_THROWS_AS(MapParamsd({2.0, 1, 1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(MapParamsd({1.0, 0, 1}).validate(), std::invalid_argument);
    CHECK_THROWS(generate_trajectory(MapParamsd{1, -1, 1}, 10, GenerationMode::chaotic, rng));
  }
}
