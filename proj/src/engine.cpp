#include "sgclt/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <numbers>
#include <regex>
#include <vector>

#include "sgclt/sampling.hpp"

namespace sgclt {

namespace {

constexpr double kPi = std::numbers::pi;
// Processes summed sequentially at the leaves of the reduction tree.
constexpr std::size_t kLeafBlock = 16;

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Fills `out` with the sum over processes [lo, hi) of leaf(i, buffer), using a
// tree whose shape depends only on (lo, hi).
template <typename Leaf>
Eigen::ArrayXd tree_sum(std::size_t lo, std::size_t hi, Eigen::Index length, const Leaf& leaf, unsigned threads) {
  if (hi - lo <= kLeafBlock) {
    Eigen::ArrayXd acc(length);
    Eigen::ArrayXd buf(length);
    leaf(lo, acc);
    for (std::size_t i = lo + 1; i < hi; ++i) {
      leaf(i, buf);
      acc += buf;
    }
    return acc;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  if (threads > 1) {
    const unsigned left_threads = threads / 2;
    auto left = std::async(std::launch::async, [&] { return tree_sum(lo, mid, length, leaf, left_threads); });
    Eigen::ArrayXd right = tree_sum(mid, hi, length, leaf, threads - left_threads);
    return left.get() + right;
  }
  Eigen::ArrayXd left = tree_sum(lo, mid, length, leaf, 1);
  Eigen::ArrayXd right = tree_sum(mid, hi, length, leaf, 1);
  return left + right;
}

double sequential_sum(const std::vector<double>& values) {
  double s = 0.0;
  for (const double v : values) s += v;
  return s;
}

std::span<const double> column_span(const Ensemble& e, Eigen::Index i) {
  return {e.col(i).data(), static_cast<std::size_t>(e.rows())};
}

void require_ensemble(const Ensemble& e, double alpha) {
  if (e.cols() < 1 || e.rows() < 1) throw std::invalid_argument("ensemble must hold at least one trajectory of length >= 1");
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("superposition requires alpha in (0, 2)");
}

}  // namespace

// ---------------------------------------------------------------------------
// parameter laws and enums

ParameterLaw ParameterLaw::constant(double value) {
  ParameterLaw law{Kind::constant, value, value};
  law.validate();
  return law;
}

ParameterLaw ParameterLaw::uniform(double lower, double upper) {
  ParameterLaw law{Kind::uniform, lower, upper};
  law.validate();
  return law;
}

ParameterLaw ParameterLaw::parse(const std::string& text) {
  static const std::regex number(R"(\s*([0-9eE.+-]+)\s*)");
  static const std::regex constant_form(R"(\s*(?:const|constant)\s*\(\s*([0-9eE.+-]+)\s*\)\s*)");
  static const std::regex uniform_form(R"(\s*(?:U|uniform)\s*\(\s*([0-9eE.+-]+)\s*,\s*([0-9eE.+-]+)\s*\)\s*)");
  std::smatch m;
  try {
    if (std::regex_match(text, m, number) || std::regex_match(text, m, constant_form)) {
      return constant(std::stod(m[1].str()));
    }
    if (std::regex_match(text, m, uniform_form)) return uniform(std::stod(m[1].str()), std::stod(m[2].str()));
  } catch (const std::logic_error&) {
  }
  throw std::invalid_argument("cannot parse parameter law '" + text + "' (expected e.g. 1, const(1) or U(0.5,1))");
}

void ParameterLaw::validate() const {
  if (kind == Kind::constant) {
    if (!(lower > 0.0) || !std::isfinite(lower)) throw std::invalid_argument("constant law value must be positive");
  } else if (!(lower > 0.0 && lower < upper && std::isfinite(upper))) {
    throw std::invalid_argument("uniform law requires 0 < lower < upper");
  }
}

double ParameterLaw::sample(RandomSource& rng) const {
  if (kind == Kind::constant) return lower;
  return lower + (upper - lower) * rng.uniform_open();
}

double ParameterLaw::mean_inverse_power(double alpha) const {
  if (kind == Kind::constant) return std::pow(lower, -alpha);
  if (alpha == 1.0) return std::log(upper / lower) / (upper - lower);
  return (std::pow(upper, 1.0 - alpha) - std::pow(lower, 1.0 - alpha)) / ((1.0 - alpha) * (upper - lower));
}

std::string ParameterLaw::describe() const {
  if (kind == Kind::constant) return "const(" + format_number(lower) + ")";
  return "U(" + format_number(lower) + "," + format_number(upper) + ")";
}

std::string to_string(ShiftKind kind) {
  switch (kind) {
    case ShiftKind::none: return "none";
    case ShiftKind::linear: return "linear";
    case ShiftKind::cauchy: return "cauchy";
  }
  return "none";
}

ShiftKind parse_shift_kind(const std::string& text) {
  if (text == "none") return ShiftKind::none;
  if (text == "linear") return ShiftKind::linear;
  if (text == "cauchy") return ShiftKind::cauchy;
  throw std::invalid_argument("unknown shift kind '" + text + "' (expected none, linear or cauchy)");
}

std::string to_string(MeanCentering kind) { return kind == MeanCentering::closed_form ? "closed_form" : "sample_mean"; }

MeanCentering parse_mean_centering(const std::string& text) {
  if (text == "closed_form") return MeanCentering::closed_form;
  if (text == "sample_mean") return MeanCentering::sample_mean;
  throw std::invalid_argument("unknown mean centering '" + text + "' (expected closed_form or sample_mean)");
}

void EnsembleSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("ensemble alpha must lie in (0, 2)");
  if (n_processes < 1) throw std::invalid_argument("ensemble needs N >= 1");
  if (seq_length < 1) throw std::invalid_argument("ensemble needs L >= 1");
  if (stride < 1) throw std::invalid_argument("ensemble stride must be at least 1");
  delta1_law.validate();
  delta2_law.validate();
}

// ---------------------------------------------------------------------------
// centering and superposition

double cauchy_regime_centering(std::span<const double> trajectory, std::size_t n_processes) {
  if (trajectory.empty()) throw std::invalid_argument("centering: empty trajectory");
  std::vector<double> work(trajectory.begin(), trajectory.end());
  const auto mid = work.begin() + static_cast<std::ptrdiff_t>(work.size() / 2);
  std::nth_element(work.begin(), mid, work.end());
  const double anchor = *mid;

  const double t = 1.0 / static_cast<double>(n_processes);
  double re = 0.0;
  double im = 0.0;
  for (const double x : trajectory) {
    const double arg = t * (x - anchor);
    re += std::cos(arg);
    im += std::sin(arg);
  }
  const double n = static_cast<double>(trajectory.size());
  re /= n;
  im /= n;
  if (std::hypot(re, im) < kMinCfModulus) {
    throw CenteringError("centering unreliable: |phi_i(1/N)| = " + format_number(std::hypot(re, im)) +
                         " < 0.1; increase N or L");
  }
  return anchor + static_cast<double>(n_processes) * std::atan2(im, re);
}

double invariant_mean(const MapParamsd& params) {
  if (!(params.alpha > 1.0 && params.alpha < 2.0)) throw std::domain_error("invariant_mean: finite only for 1 < alpha < 2");
  return (1.0 / params.delta1 - 1.0 / params.delta2) / (2.0 * std::sin(kPi * (params.alpha + 1.0) / (2.0 * params.alpha)));
}

namespace {

double empirical_contribution(std::span<const double> trajectory, double alpha, std::size_t n_processes) {
  if (alpha < 1.0) return 0.0;
  if (alpha == 1.0) return cauchy_regime_centering(trajectory, n_processes);
  double s = 0.0;
  for (const double x : trajectory) s += x;
  return s / static_cast<double>(trajectory.size());
}

}  // namespace

double centering(const Ensemble& trajectories, double alpha) {
  require_ensemble(trajectories, alpha);
  const auto n = static_cast<std::size_t>(trajectories.cols());
  std::vector<double> parts(n);
  for (std::size_t i = 0; i < n; ++i) {
    parts[i] = empirical_contribution(column_span(trajectories, static_cast<Eigen::Index>(i)), alpha, n);
  }
  return sequential_sum(parts);
}

Eigen::ArrayXd superpose(const Ensemble& trajectories, double alpha, unsigned threads) {
  require_ensemble(trajectories, alpha);
  const double a_n = centering(trajectories, alpha);
  const auto n = static_cast<std::size_t>(trajectories.cols());
  const auto leaf = [&](std::size_t i, Eigen::ArrayXd& out) { out = trajectories.col(static_cast<Eigen::Index>(i)); };
  Eigen::ArrayXd sum = tree_sum(0, n, trajectories.rows(), leaf, std::max(threads, 1u));
  return (sum - a_n) / std::pow(static_cast<double>(n), 1.0 / alpha);
}

double shift_value(ShiftKind kind, std::size_t index_one_based, std::size_t n_processes, RandomSource& rng) {
  switch (kind) {
    case ShiftKind::none: return 0.0;
    case ShiftKind::linear: return static_cast<double>(index_one_based) / static_cast<double>(n_processes);
    case ShiftKind::cauchy: return sample_cauchy_std(rng);
  }
  return 0.0;
}

ShiftedEnsemble apply_shifts(const Ensemble& trajectories, ShiftKind kind, RandomSource& rng) {
  ShiftedEnsemble out{trajectories, Eigen::ArrayXd::Zero(trajectories.cols())};
  const auto n = static_cast<std::size_t>(trajectories.cols());
  for (Eigen::Index i = 0; i < trajectories.cols(); ++i) {
    const double s = shift_value(kind, static_cast<std::size_t>(i) + 1, n, rng);
    out.shifts[i] = s;
    if (s != 0.0) out.trajectories.col(i) -= s;
  }
  return out;
}

// ---------------------------------------------------------------------------
// limit law

GcltParams limit_params(const EnsembleSpec& spec) {
  spec.validate();
  const double alpha = spec.alpha;
  // gamma_i^alpha = k (alpha/pi) (d1^-a + d2^-a), beta_i gamma_i^alpha = k (alpha/pi) (d1^-a - d2^-a)
  const double weight = tail_to_scale_factor(alpha) * alpha / kPi;
  const double plus = spec.delta1_law.mean_inverse_power(alpha);
  const double minus = spec.delta2_law.mean_inverse_power(alpha);
  return {(plus - minus) / (plus + minus), std::pow(weight * (plus + minus), 1.0 / alpha)};
}

GcltParams limit_params_monte_carlo(const EnsembleSpec& spec, std::size_t draws, RandomSource& rng) {
  spec.validate();
  if (draws == 0) throw std::invalid_argument("limit_params_monte_carlo: draws must be positive");
  double skew_weighted = 0.0;
  double scale_pow = 0.0;
  for (std::size_t k = 0; k < draws; ++k) {
    const MapParamsd p{spec.alpha, spec.delta1_law.sample(rng), spec.delta2_law.sample(rng)};
    const GcltParams g = gclt_params_from_tails(tail_coefficients(p), spec.alpha);
    const double gpow = std::pow(g.gamma, spec.alpha);
    skew_weighted += g.beta * gpow;
    scale_pow += gpow;
  }
  const double m = static_cast<double>(draws);
  return {skew_weighted / scale_pow, std::pow(scale_pow / m, 1.0 / spec.alpha)};
}

StableParamsd predicted_limit(const EnsembleSpec& spec) {
  const GcltParams g = limit_params(spec);
  return {spec.alpha, g.beta, g.gamma, 0.0};
}

// ---------------------------------------------------------------------------
// ensembles

namespace {

// Generates process i into `out` and returns its record; the centering
// contribution is filled in by the caller's regime rule.
ProcessRecord generate_process(const EnsembleSpec& spec, std::size_t i, Eigen::ArrayXd& out) {
  RandomSource rng = RandomSource(spec.seed).derive_child(i);
  const MapParamsd params{spec.alpha, spec.delta1_law.sample(rng), spec.delta2_law.sample(rng)};
  const double shift = shift_value(spec.shift, i + 1, spec.n_processes, rng);
  out.resize(static_cast<Eigen::Index>(spec.seq_length));
  const std::size_t reseeds = fill_trajectory(params, spec.mode, rng, out, 0, spec.stride);
  if (shift != 0.0) out -= shift;
  const GcltParams g = gclt_params_from_tails(tail_coefficients(params), spec.alpha);
  return {params.delta1, params.delta2, g.beta, g.gamma, shift, 0.0, reseeds};
}

double process_contribution(const EnsembleSpec& spec, const ProcessRecord& rec, const Eigen::ArrayXd& trajectory) {
  if (spec.alpha > 1.0 && spec.mean_centering == MeanCentering::closed_form) {
    return invariant_mean({spec.alpha, rec.delta1, rec.delta2}) - rec.shift;
  }
  return empirical_contribution(as_span(trajectory), spec.alpha, spec.n_processes);
}

}  // namespace

BuiltEnsemble build_ensemble(const EnsembleSpec& spec) {
  spec.validate();
  BuiltEnsemble out;
  out.trajectories.resize(static_cast<Eigen::Index>(spec.seq_length), static_cast<Eigen::Index>(spec.n_processes));
  out.processes.reserve(spec.n_processes);
  Eigen::ArrayXd buf;
  for (std::size_t i = 0; i < spec.n_processes; ++i) {
    ProcessRecord rec = generate_process(spec, i, buf);
    rec.centering = process_contribution(spec, rec, buf);
    out.trajectories.col(static_cast<Eigen::Index>(i)) = buf;
    out.processes.push_back(rec);
  }
  return out;
}

SuperpositionResult run_superposition(const EnsembleSpec& spec, const EngineOptions& options) {
  spec.validate();
  SuperpositionResult result;
  result.processes.resize(spec.n_processes);
  result.predicted_limit = predicted_limit(spec);

  const auto leaf = [&](std::size_t i, Eigen::ArrayXd& out) {
    ProcessRecord rec = generate_process(spec, i, out);
    rec.centering = process_contribution(spec, rec, out);
    result.processes[i] = rec;  // distinct slot per process
  };
  const Eigen::ArrayXd sum =
      tree_sum(0, spec.n_processes, static_cast<Eigen::Index>(spec.seq_length), leaf, std::max(options.threads, 1u));

  std::vector<double> parts(spec.n_processes);
  for (std::size_t i = 0; i < spec.n_processes; ++i) {
    parts[i] = result.processes[i].centering;
    result.reseeds += result.processes[i].reseeds;
  }
  result.a_n = sequential_sum(parts);
  result.samples = (sum - result.a_n) / std::pow(static_cast<double>(spec.n_processes), 1.0 / spec.alpha);
  return result;
}

ConvergenceRun run_convergence_experiment(const EnsembleSpec& spec, const ExperimentOptions& options) {
  const SuperpositionResult sup = run_superposition(spec, options.engine);
  ConvergenceRun run;
  run.predicted_limit = sup.predicted_limit;
  run.reference = options.reference_override.value_or(sup.predicted_limit);
  run.a_n = sup.a_n;
  run.reseeds = sup.reseeds;

  RandomSource ref_rng = RandomSource(spec.seed).derive_child(kReferenceStream);
  const Eigen::ArrayXd reference = sample_stable_n(run.reference, spec.seq_length, ref_rng);
  run.report = two_sample_report(as_span(sup.samples), as_span(reference));
  return run;
}

}  // namespace sgclt
