#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgclt/experiment.hpp"
#include "sgclt/selftest.hpp"

namespace fs = std::filesystem;
using namespace sgclt;

namespace {

constexpr double kDeskScale = 0.1;

struct Common {
  std::string seeds;
  std::optional<double> scale;
  bool full_scale = false;
  std::string out;
  std::optional<std::string> mode;
  std::optional<std::size_t> bins;
  unsigned jobs = 0;
  bool no_timing = false;
  std::size_t min_length = 0;
  std::string centering = "closed_form";
  std::optional<std::size_t> stride;
  double pdf_lo = -10.0;
  double pdf_hi = 10.0;
  std::size_t pdf_points = 401;
};

void add_run_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seeds, "Comma-separated unsigned 64-bit seeds");
  cmd->add_option("--scale", c.scale, "Multiplier for N and L, in (0, 1]");
  cmd->add_flag("--full-scale", c.full_scale, "Run at the published N and L (scale 1)");
  cmd->add_option("--out", c.out, "Output directory (else $SGCLT_OUTPUT_DIR, else ./sgclt_out)");
  cmd->add_option("--mode", c.mode, "Trajectory generation: chaotic or iid")->check(CLI::IsMember({"chaotic", "iid"}));
  cmd->add_option("--jobs", c.jobs, "Worker threads (0 = all cores)");
  cmd->add_flag("--no-timing", c.no_timing, "Write wall_ms as 0 so CSVs are byte-reproducible");
  cmd->add_option("--stride", c.stride, "Map iterations between recorded samples in chaotic mode")->check(CLI::PositiveNumber);
}

double effective_scale(const Common& c, double fallback) {
  if (c.full_scale) return 1.0;
  return c.scale.value_or(fallback);
}

std::vector<std::uint64_t> require_seeds(const std::string& text) {
  auto seeds = parse_seed_list(text);
  if (seeds.empty()) throw std::invalid_argument("at least one seed is required (--seed 1,2,3)");
  return seeds;
}

void write_outputs(const fs::path& dir, const std::string& stem, const std::vector<RunRecord>& records,
                   const std::vector<TableRow>& rows) {
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / (stem + ".csv"));
    if (!csv) throw std::runtime_error("cannot write " + (dir / (stem + ".csv")).string());
    write_csv(csv, records);
  }
  const std::string text = format_text_table(records, rows);
  std::ofstream(dir / (stem + ".txt")) << text;
  std::cout << text;

  nlohmann::ordered_json summary = nlohmann::ordered_json::array();
  for (const auto& t : tally_rows(records)) {
    summary.push_back({{"row", t.row}, {"runs", t.runs}, {"ks_fail_to_reject", t.ks_pass},
                       {"ad_fail_to_reject", t.ad_pass}, {"both_fail_to_reject", t.both_pass}});
  }
  std::ofstream(dir / (stem + "_summary.json")) << summary.dump(2) << '\n';
  std::cout << "\nwrote " << (dir / (stem + ".csv")).string() << '\n';
}

int replicate_table(int table_id, const Common& c) {
  const auto seeds = require_seeds(c.seeds);
  const GenerationMode mode = parse_generation_mode(c.mode.value_or("chaotic"));
  const MeanCentering centering = parse_mean_centering(c.centering);
  const auto rows = scaled_rows(table_id, effective_scale(c, kDeskScale), c.min_length);
  std::vector<PlannedRun> plan;
  for (const auto& row : rows) {
    for (const auto seed : seeds) {
      EnsembleSpec spec = spec_for_row(row, seed, mode, centering);
      spec.stride = c.stride.value_or(1);
      plan.push_back({std::to_string(table_id), row.row, spec});
    }
  }
  const auto records = execute_plan(plan, {c.jobs, !c.no_timing});
  write_outputs(resolve_output_dir(c.out, "sgclt_out"), "table" + std::to_string(table_id), records, rows);
  return 0;
}

int figure(int figure_id, const Common& c) {
  const auto seeds = require_seeds(c.seeds);
  const GenerationMode mode = parse_generation_mode(c.mode.value_or("chaotic"));
  const fs::path dir = resolve_output_dir(c.out, "sgclt_out");
  const PdfGrid grid{c.pdf_lo, c.pdf_hi, c.pdf_points};
  const std::size_t bins = c.bins.value_or(80);
  if (bins < 10) throw std::invalid_argument("--bins must be at least 10");
  for (const auto seed : seeds) {
    const FigureFiles f = write_figure(figure_id, effective_scale(c, kDeskScale), seed, mode, bins, grid, dir);
    std::cout << f.superposition.string() << '\n' << f.reference.string() << '\n' << f.pdf.string() << '\n';
  }
  return 0;
}

int run_config(const std::string& path, const Common& c) {
  ExperimentConfig cfg = load_config(path);
  if (!c.seeds.empty()) cfg.seeds = require_seeds(c.seeds);
  if (c.scale || c.full_scale) cfg.scale = effective_scale(c, cfg.scale);
  if (c.bins) cfg.histogram_bins = *c.bins;
  for (auto& e : cfg.experiments) {
    if (c.mode) e.spec.mode = parse_generation_mode(*c.mode);
    if (c.stride) e.spec.stride = *c.stride;
  }
  cfg.validate();

  std::vector<PlannedRun> plan;
  for (std::size_t k = 0; k < cfg.experiments.size(); ++k) {
    for (const auto seed : cfg.seeds) {
      EnsembleSpec spec = cfg.experiments[k].spec;
      spec.seed = seed;
      spec.n_processes = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(spec.n_processes * cfg.scale)));
      spec.seq_length = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(spec.seq_length * cfg.scale)));
      plan.push_back({cfg.experiments[k].name, static_cast<int>(k + 1), spec});
    }
  }
  const auto records = execute_plan(plan, {c.jobs, !c.no_timing});
  const fs::path fallback = cfg.output_dir.empty() ? fs::path("sgclt_out") : cfg.output_dir;
  write_outputs(resolve_output_dir(c.out, fallback), fs::path(path).stem().string(), records, {});
  return 0;
}

int selftest(const std::string& level) {
  const auto results = run_selftest(parse_selftest_level(level));
  int failures = 0;
  for (const auto& r : results) {
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.module << ": " << r.name;
    if (!r.passed) std::cout << " (observed " << r.observed << ", expected " << r.expected << ")";
    std::cout << '\n';
    failures += r.passed ? 0 : 1;
  }
  std::cout << results.size() - failures << "/" << results.size() << " checks passed\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Superposition of chaotic power-law processes and stable limit checks"};
  app.require_subcommand(1);
  Common c;

  int table_id = 0;
  auto* table = app.add_subcommand("replicate-table", "Replicate a convergence table (1 or 2)");
  table->add_option("table", table_id, "Table id")->required()->check(CLI::IsMember({1, 2}));
  add_run_flags(table, c);
  table->add_option("--min-length", c.min_length, "Lower bound applied to the scaled L");
  table->add_option("--centering", c.centering, "Mean centering for 1 < alpha < 2: closed_form or sample_mean")
      ->check(CLI::IsMember({"closed_form", "sample_mean"}));

  int figure_id = 0;
  auto* fig = app.add_subcommand("figure", "Histogram and density overlay files for figure 2 or 3");
  fig->add_option("figure", figure_id, "Figure id")->required()->check(CLI::IsMember({2, 3}));
  add_run_flags(fig, c);
  fig->add_option("--bins", c.bins, "Histogram bins (>= 10)");
  fig->add_option("--pdf-lo", c.pdf_lo, "Left end of the histogram and density grid");
  fig->add_option("--pdf-hi", c.pdf_hi, "Right end of the histogram and density grid");
  fig->add_option("--pdf-points", c.pdf_points, "Density grid points");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the experiments of a config file");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  add_run_flags(run, c);
  run->add_option("--bins", c.bins, "Histogram bins (>= 10)");

  std::string level;
  auto* self = app.add_subcommand("selftest", "Run the built-in checks (fast or full)");
  self->add_option("level", level, "fast or full")->required()->check(CLI::IsMember({"fast", "full"}));

  CLI11_PARSE(app, argc, argv);
  try {
    if (*table) return replicate_table(table_id, c);
    if (*fig) return figure(figure_id, c);
    if (*run) return run_config(config_path, c);
    if (*self) return selftest(level);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
