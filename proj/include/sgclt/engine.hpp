#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sgclt/chaos.hpp"
#include "sgclt/gof.hpp"
#include "sgclt/random.hpp"
#include "sgclt/stable.hpp"

namespace sgclt {

/// Law of a per-process scale parameter delta: a constant or U(lower, upper).
struct ParameterLaw {
  enum class Kind { constant, uniform };

  Kind kind = Kind::constant;
  double lower = 1.0;  // the constant value when kind == constant
  double upper = 1.0;

  static ParameterLaw constant(double value);
  static ParameterLaw uniform(double lower, double upper);
  /// Accepts "1", "const(1)", "U(0.5,1)" and "uniform(0.5,1)".
  static ParameterLaw parse(const std::string& text);

  void validate() const;
  double sample(RandomSource& rng) const;
  /// E[delta^{-alpha}] in closed form.
  double mean_inverse_power(double alpha) const;
  /// "const(1)" or "U(0.5,1)".
  std::string describe() const;
};

enum class ShiftKind {
  none,
  linear,  // process i (1-based) shifted by -i/N
  cauchy,  // one standard-Cauchy location per process, fixed along the trajectory
};

/// How E[X_i] enters the centering for 1 < alpha < 2.
enum class MeanCentering {
  closed_form,  // mean of the invariant law given the realized (delta1, delta2, shift)
  sample_mean,  // trajectory average
};

std::string to_string(ShiftKind kind);
ShiftKind parse_shift_kind(const std::string& text);
std::string to_string(MeanCentering kind);
MeanCentering parse_mean_centering(const std::string& text);

struct EnsembleSpec {
  double alpha = 1.0;
  std::size_t n_processes = 1;
  std::size_t seq_length = 1;
  ParameterLaw delta1_law = ParameterLaw::constant(1.0);
  ParameterLaw delta2_law = ParameterLaw::constant(1.0);
  ShiftKind shift = ShiftKind::none;
  GenerationMode mode = GenerationMode::chaotic;
  std::uint64_t seed = 0;
  MeanCentering mean_centering = MeanCentering::closed_form;
  /// Map iterations between recorded samples in chaotic mode.
  std::size_t stride = 1;

  void validate() const;
};

/// Realized parameters of one process of an ensemble.
struct ProcessRecord {
  double delta1;
  double delta2;
  double beta;
  double gamma;
  double shift;
  /// This process's contribution to A_N.
  double centering;
  std::size_t reseeds;
};

/// L x N: column i is the trajectory of process i.
using Ensemble = Eigen::ArrayXXd;

struct SuperpositionResult {
  Eigen::ArrayXd samples;
  double a_n = 0.0;
  std::vector<ProcessRecord> processes;
  StableParamsd predicted_limit;
  std::size_t reseeds = 0;
};

class CenteringError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Below this modulus of phi_i(1/N) the alpha == 1 centering is refused.
inline constexpr double kMinCfModulus = 0.1;

/// A_N = N * Im ln phi_i(1/N) for one trajectory, with phi_i the empirical CF.
///
/// The logarithm is the continuous branch along [0, 1/N]: the trajectory is
/// anchored at its median m, so Im ln phi(1/N) = m/N + Arg phi_centered(1/N).
/// This equals the principal branch whenever that is unambiguous and stays
/// exact under arbitrarily large location shifts.
double cauchy_regime_centering(std::span<const double> trajectory, std::size_t n_processes);

/// Mean of the invariant density for 1 < alpha < 2:
/// (1/delta1 - 1/delta2) / (2 sin(pi (alpha + 1) / (2 alpha))).
double invariant_mean(const MapParamsd& params);

/// A_N from the trajectories: 0 (alpha < 1), N sum_i Im ln phi_i(1/N)
/// (alpha == 1), sum_i of trajectory means (1 < alpha < 2).
double centering(const Ensemble& trajectories, double alpha);

/// S_N(t) = (sum_i X_i(t) - A_N) / N^{1/alpha} for every time index t. The sum
/// over processes uses a fixed pairwise tree, so results do not depend on threads.
Eigen::ArrayXd superpose(const Ensemble& trajectories, double alpha, unsigned threads = 1);

double shift_value(ShiftKind kind, std::size_t index_one_based, std::size_t n_processes, RandomSource& rng);

struct ShiftedEnsemble {
  Ensemble trajectories;
  Eigen::ArrayXd shifts;
};

/// Subtracts shift_value(kind, i, N, rng) from every entry of trajectory i.
ShiftedEnsemble apply_shifts(const Ensemble& trajectories, ShiftKind kind, RandomSource& rng);

/// (beta*, gamma*) from closed-form E[delta^{-alpha}] of the two laws.
GcltParams limit_params(const EnsembleSpec& spec);

/// Same quantity by averaging beta_i gamma_i^alpha and gamma_i^alpha over sampled deltas.
GcltParams limit_params_monte_carlo(const EnsembleSpec& spec, std::size_t draws, RandomSource& rng);

/// S(alpha, beta*, gamma*, 0).
StableParamsd predicted_limit(const EnsembleSpec& spec);

struct BuiltEnsemble {
  Ensemble trajectories;
  std::vector<ProcessRecord> processes;
};

/// Materializes all N trajectories (shifted). Process i draws delta1, delta2,
/// its shift and its trajectory, in that order, from child stream i of the seed.
BuiltEnsemble build_ensemble(const EnsembleSpec& spec);

struct EngineOptions {
  unsigned threads = 1;
};

/// build_ensemble followed by superposition, without holding the N x L ensemble.
SuperpositionResult run_superposition(const EnsembleSpec& spec, const EngineOptions& options = {});

/// Child-stream index reserved for the reference stable draws.
inline constexpr std::uint64_t kReferenceStream = ~std::uint64_t{0};

struct ConvergenceRun {
  TestReport report;
  StableParamsd predicted_limit;
  StableParamsd reference;
  double a_n = 0.0;
  std::size_t reseeds = 0;
};

struct ExperimentOptions {
  EngineOptions engine;
  /// Replaces the predicted limit as the reference law (negative controls).
  std::optional<StableParamsd> reference_override;
};

/// Superposition vs L reference draws of S(alpha, beta*, gamma*, 0), compared by
/// two-sample KS and AD at the 5% level.
ConvergenceRun run_convergence_experiment(const EnsembleSpec& spec, const ExperimentOptions& options = {});

}  // namespace sgclt
