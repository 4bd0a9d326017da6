#include "sgclt/selftest.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "sgclt/engine.hpp"
#include "sgclt/experiment.hpp"
#include "sgclt/gof.hpp"
#include "sgclt/sampling.hpp"

namespace sgclt {

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CheckResult near(std::string module, std::string name, double observed, double expected, double tol) {
  const bool ok = std::isfinite(observed) && std::abs(observed - expected) <= tol;
  return {std::move(module), std::move(name), ok, num(observed), num(expected) + " +/- " + num(tol)};
}

CheckResult at_most(std::string module, std::string name, double observed, double bound) {
  return {std::move(module), std::move(name), std::isfinite(observed) && observed <= bound, num(observed),
          "<= " + num(bound)};
}

// Runs `body`; an exception becomes a failed check instead of aborting the suite.
template <typename F>
void guarded(std::vector<CheckResult>& out, const std::string& module, const std::string& name, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    out.push_back({module, name, false, std::string("exception: ") + e.what(), "no exception"});
  }
}

void stable_core_checks(std::vector<CheckResult>& out) {
  guarded(out, "stable_core", "cf closed forms", [&] {
    out.push_back(near("stable_core", "cf Cauchy t=2", std::abs(cf_eval(StableParamsd{1, 0, 1, 0}, 2.0) - std::exp(-2.0)), 0, 1e-15));
    out.push_back(near("stable_core", "cf Gaussian t=1", std::abs(cf_eval(StableParamsd{2, 0, 1, 0}, 1.0) - std::exp(-1.0)), 0, 1e-15));
    const StableParamsd p{1.5, 0.5, 2, 1};
    double worst = 0;
    for (double t = -3; t <= 3; t += 0.25) {
      worst = std::max(worst, std::abs(cf_eval(p, -t) - std::conj(cf_eval(p, t))));
      worst = std::max(worst, std::abs(std::abs(cf_eval(p, t)) - std::exp(-std::pow(2.0 * std::abs(t), 1.5))));
    }
    out.push_back(at_most("stable_core", "cf Hermitian symmetry and modulus law", worst, 1e-14));
  });
  guarded(out, "stable_core", "combine_stable", [&] {
    const std::array<StableParamsd, 2> c{StableParamsd{1, 1, 1, 0}, StableParamsd{1, 0, 1, 0}};
    const auto r = combine_stable<double>(c);
    out.push_back(near("stable_core", "combine alpha=1 skew", r.beta, 0.5, 1e-15));
    out.push_back(near("stable_core", "combine alpha=1 location", r.mu, std::log(2.0) / kPi, 1e-15));
  });
  guarded(out, "stable_core", "scale_shift_transform", [&] {
    out.push_back(near("stable_core", "alpha=1 log-scale correction", scale_shift_transform(0.0, StableParamsd{1, 1, std::exp(1.0), 0}),
                       2.0 * std::exp(1.0) / kPi, 1e-14));
  });
  guarded(out, "stable_core", "density inversion", [&] {
    double worst = 0;
    for (int k = -100; k <= 100; ++k) {
      const double x = 0.1 * k;
      worst = std::max(worst, std::abs(stable_pdf({1, 0, 1, 0}, x) - 1.0 / (kPi * (1 + x * x))));
      worst = std::max(worst, std::abs(stable_pdf({2, 0, 1, 0}, x) - std::exp(-x * x / 4) / (2 * std::sqrt(kPi))));
    }
    out.push_back(at_most("stable_core", "pdf vs Cauchy and Gaussian closed forms", worst, 1e-6));
    out.push_back(near("stable_core", "cdf Cauchy x=1", stable_cdf({1, 0, 1, 0}, 1.0), 0.75, 1e-7));
  });
}

void sampling_checks(std::vector<CheckResult>& out) {
  guarded(out, "stable_sampling", "ECF grid", [&] {
    const std::size_t n = 100000;
    double worst = 0;
    RandomSource root(20240601);
    std::uint64_t stream = 0;
    for (const double a : {0.5, 1.0, 1.5, 2.0}) {
      for (const double b : {-1.0, 0.0, 0.5}) {
        RandomSource rng = root.derive_child(stream++);
        const StableParamsd p{a, b, 1, 0};
        const Eigen::ArrayXd x = sample_stable_n(p, n, rng);
        for (const double t : {0.25, 0.5, 1.0, 2.0}) worst = std::max(worst, std::abs(empirical_cf(x, t) - cf_eval(p, t)));
      }
    }
    out.push_back(at_most("stable_sampling", "ECF of CMS draws vs cf_eval", worst, 5.0 / std::sqrt(double(n))));
  });
}

void chaos_checks(std::vector<CheckResult>& out, const GcltFunction& gclt) {
  guarded(out, "power_law_chaos", "map examples", [&] {
    const MapParamsd p{1, 1, 1};
    out.push_back(near("power_law_chaos", "g(sqrt 3)", map_step(std::sqrt(3.0), p).value(), 1 / std::sqrt(3.0), 1e-14));
    out.push_back(near("power_law_chaos", "g(1/2)", map_step(0.5, p).value(), -0.75, 1e-14));
    out.push_back(near("power_law_chaos", "g(4), alpha=0.5", map_step(4.0, MapParamsd{0.5, 1, 1}).value(), 9.0 / 16, 1e-14));
  });
  guarded(out, "power_law_chaos", "inverse CDF round trip", [&] {
    const MapParamsd p{1.5, 3, 1};
    double worst = 0;
    for (int k = 1; k < 100; ++k) {
      const double u = k / 100.0;
      worst = std::max(worst, std::abs(invariant_cdf(invariant_inverse_cdf(u, p), p) - u));
    }
    out.push_back(at_most("power_law_chaos", "CDF(inverse CDF(u)) = u", worst, 1e-12));
  });
  out.push_back(check_gclt_example(gclt));
  guarded(out, "power_law_chaos", "stationarity", [&] {
    const MapParamsd p{1, 1, 1};
    RandomSource rng(7);
    const Trajectory tr = generate_trajectory(p, 100000, GenerationMode::chaotic, rng);
    const double inside = (tr.values.abs() <= 1.0).cast<double>().mean();
    out.push_back(near("power_law_chaos", "chaotic orbit mass in [-1,1]", inside, 0.5, 0.01));
  });
}

void gof_checks(std::vector<CheckResult>& out) {
  guarded(out, "gof_tests", "KS examples", [&] {
    const std::array<double, 2> a{1, 3}, b{2, 4}, c{3, 4}, d{1, 2};
    out.push_back(near("gof_tests", "KS D interleaved", ks_two_sample(a, b).statistic, 0.5, 0));
    out.push_back(near("gof_tests", "KS D disjoint", ks_two_sample(d, c).statistic, 1.0, 0));
  });
  guarded(out, "gof_tests", "AD variance", [&] {
    // for large equal samples the null variance approaches 2 (pi^2 - 9) / 3
    const std::array<std::size_t, 2> sizes{50000, 50000};
    out.push_back(near("gof_tests", "AD null variance limit", ad_null_variance(sizes), 2 * (kPi * kPi - 9) / 3, 1e-3));
  });
  guarded(out, "gof_tests", "null level", [&] {
    RandomSource root(99);
    int rejects = 0;
    for (std::uint64_t k = 0; k < 200; ++k) {
      RandomSource rng = root.derive_child(k);
      const Eigen::ArrayXd a = sample_stable_n({1, 0, 1, 0}, 1000, rng);
      const Eigen::ArrayXd b = sample_stable_n({1, 0, 1, 0}, 1000, rng);
      rejects += ks_two_sample(as_span(a), as_span(b)).p_value < kSignificance ? 1 : 0;
    }
    const double rate = rejects / 200.0;
    out.push_back({"gof_tests", "KS null rejection rate in [0.02, 0.09]", rate >= 0.02 && rate <= 0.09, num(rate), "[0.02, 0.09]"});
  });
}

void engine_checks(std::vector<CheckResult>& out) {
  guarded(out, "sgclt_engine", "limit parameters", [&] {
    EnsembleSpec s;
    s.alpha = 1;
    s.delta1_law = ParameterLaw::uniform(0.5, 1);
    s.delta2_law = ParameterLaw::uniform(1, 2);
    const GcltParams g = limit_params(s);
    out.push_back(near("sgclt_engine", "beta* (alpha=1, U(0.5,1), U(1,2))", g.beta, 1.0 / 3, 1e-12));
    out.push_back(near("sgclt_engine", "gamma* (alpha=1, U(0.5,1), U(1,2))", g.gamma, 1.5 * std::log(2.0), 1e-12));
  });
  guarded(out, "sgclt_engine", "centering identity", [&] {
    for (const double alpha : {1.0, 1.5}) {
      EnsembleSpec s;
      s.alpha = alpha;
      s.n_processes = 20;
      s.seq_length = 2000;
      s.delta1_law = ParameterLaw::constant(3);
      s.seed = 11;
      s.mean_centering = MeanCentering::sample_mean;
      const BuiltEnsemble e = build_ensemble(s);
      RandomSource rng(5);
      const ShiftedEnsemble sh = apply_shifts(e.trajectories, ShiftKind::cauchy, rng);
      const double moved = centering(sh.trajectories, alpha) - centering(e.trajectories, alpha);
      const double drift = (superpose(sh.trajectories, alpha) - superpose(e.trajectories, alpha)).abs().maxCoeff();
      const std::string tag = " alpha=" + num(alpha);
      out.push_back(near("sgclt_engine", "A_N moves by -sum of shifts" + tag, moved, -sh.shifts.sum(),
                         1e-10 * std::max(1.0, sh.shifts.abs().sum())));
      out.push_back(at_most("sgclt_engine", "shifted superposition unchanged" + tag, drift, 1e-10));
    }
  });
  guarded(out, "sgclt_engine", "determinism", [&] {
    EnsembleSpec s;
    s.alpha = 1.5;
    s.n_processes = 100;
    s.seq_length = 1000;
    s.seed = 3;
    const auto a = run_superposition(s, {1});
    const auto b = run_superposition(s, {4});
    out.push_back({"sgclt_engine", "superposition independent of thread count", (a.samples == b.samples).all(),
                   (a.samples == b.samples).all() ? "identical" : "different", "identical"});
  });
}

void table_checks(std::vector<CheckResult>& out) {
  guarded(out, "experiment_cli", "Table 1 at scale 0.1, stride 8", [&] {
    std::vector<PlannedRun> plan;
    for (const auto& row : scaled_rows(1, 0.1, 10000)) {
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        EnsembleSpec spec = spec_for_row(row, seed, GenerationMode::chaotic);
        spec.stride = kCheckStride;
        plan.push_back({"1", row.row, spec});
      }
    }
    const auto records = execute_plan(plan, {0, false});
    for (const auto& t : tally_rows(records)) {
      out.push_back({"experiment_cli", "Table 1 row " + std::to_string(t.row) + " fail-to-reject in >= 8/10 seeds",
                     t.both_pass >= 8, std::to_string(t.both_pass) + "/" + std::to_string(t.runs), ">= 8/10"});
    }
  });
}

}  // namespace

SelftestLevel parse_selftest_level(const std::string& text) {
  if (text == "fast") return SelftestLevel::fast;
  if (text == "full") return SelftestLevel::full;
  throw std::invalid_argument("unknown selftest level '" + text + "' (expected fast or full)");
}

CheckResult check_gclt_example(const GcltFunction& gclt) {
  const TailCoefficients tails = tail_coefficients(MapParamsd{1, 3, 1});
  const GcltParams g = gclt(tails, 1.0);
  const bool ok = std::abs(g.beta + 0.5) <= 1e-12 && std::abs(g.gamma - 2.0 / 3) <= 1e-12;
  return {"power_law_chaos", "gclt_params_from_tails(alpha=1, delta1=3, delta2=1) = (-0.5, 2/3)", ok,
          "(" + num(g.beta) + ", " + num(g.gamma) + ")", "(-0.5, 0.666666666667) +/- 1e-12"};
}

std::vector<CheckResult> run_selftest(SelftestLevel level) {
  std::vector<CheckResult> out;
  stable_core_checks(out);
  sampling_checks(out);
  chaos_checks(out, gclt_params_from_tails);
  gof_checks(out);
  engine_checks(out);
  if (level == SelftestLevel::full) table_checks(out);
  return out;
}

}  // namespace sgclt
