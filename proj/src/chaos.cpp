#include "sgclt/chaos.hpp"

#include <cmath>
#include <numbers>

namespace sgclt {

double tail_to_scale_factor(double alpha) {
  constexpr double pi = std::numbers::pi;
  return pi / (2.0 * alpha * std::sin(pi * alpha / 2.0) * std::tgamma(alpha));
}

GcltParams gclt_params_from_tails(const TailCoefficients& tails, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("gclt_params_from_tails: alpha must lie in (0, 2)");
  if (!(tails.c_plus > 0.0 && tails.c_minus > 0.0)) throw std::invalid_argument("gclt_params_from_tails: tails must be positive");
  const double total = tails.c_plus + tails.c_minus;
  return {(tails.c_plus - tails.c_minus) / total, std::pow(tail_to_scale_factor(alpha) * total, 1.0 / alpha)};
}

std::string to_string(GenerationMode mode) { return mode == GenerationMode::chaotic ? "chaotic" : "iid"; }

GenerationMode parse_generation_mode(const std::string& text) {
  if (text == "chaotic") return GenerationMode::chaotic;
  if (text == "iid") return GenerationMode::iid;
  throw std::invalid_argument("unknown generation mode '" + text + "' (expected chaotic or iid)");
}

double sample_invariant(const MapParamsd& params, RandomSource& rng) {
  for (;;) {
    const double x = invariant_inverse_cdf(rng.uniform_open(), params);
    if (x != 0.0 && std::isfinite(x)) return x;
  }
}

std::size_t fill_trajectory(const MapParamsd& params, GenerationMode mode, RandomSource& rng, Eigen::Ref<Eigen::ArrayXd> out,
                            std::size_t burn_in, std::size_t stride) {
  params.validate();
  if (out.size() == 0) throw std::invalid_argument("generate_trajectory: length must be at least 1");
  if (stride == 0) throw std::invalid_argument("generate_trajectory: stride must be at least 1");
  if (mode == GenerationMode::iid) {
    for (auto& v : out) v = sample_invariant(params, rng);
    return 0;
  }

  std::size_t reseeds = 0;
  double x = sample_invariant(params, rng);
  const auto advance = [&](std::size_t steps) {
    for (std::size_t k = 0; k < steps; ++k) {
      const auto next = map_step(x, params);
      if (next) {
        x = *next;
      } else {
        x = sample_invariant(params, rng);
        ++reseeds;
      }
    }
  };
  advance(burn_in);
  out[0] = x;
  for (Eigen::Index k = 1; k < out.size(); ++k) {
    advance(stride);
    out[k] = x;
  }
  return reseeds;
}

Trajectory generate_trajectory(const MapParamsd& params, std::size_t length, GenerationMode mode, RandomSource& rng,
                               std::size_t burn_in, std::size_t stride) {
  Trajectory t;
  t.params = params;
  t.mode = mode;
  t.values.resize(static_cast<Eigen::Index>(length));
  t.reseeds = fill_trajectory(params, mode, rng, t.values, burn_in, stride);
  return t;
}

}  // namespace sgclt
