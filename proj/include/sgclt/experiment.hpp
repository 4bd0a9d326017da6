#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sgclt/engine.hpp"

namespace sgclt {

/// Stride used by the built-in table checks: consecutive chaotic iterates are
/// correlated, and every 8th one is close enough to independent for KS and AD.
inline constexpr std::size_t kCheckStride = 8;

/// One row of the published convergence tables.
struct TableRow {
  int table;
  int row;
  double alpha;
  ParameterLaw delta1_law;
  ParameterLaw delta2_law;
  ShiftKind shift;
  std::size_t n_processes;
  std::size_t seq_length;
  /// Published p-values, for side-by-side display only.
  double published_ks_p;
  double published_ad_p;
};

/// Table 1 (9 rows) or Table 2 (5 rows); throws for any other id.
std::vector<TableRow> table_rows(int table_id);

/// Smallest scale keeping scale * L >= 1000 on every row of the table.
double minimum_feasible_scale(int table_id);

/// N and L multiplied by `scale` and rounded; L is then raised to `min_length`.
/// Throws if scale is outside (0, 1] or scale * L < 1000 on any row.
std::vector<TableRow> scaled_rows(int table_id, double scale, std::size_t min_length = 0);

EnsembleSpec spec_for_row(const TableRow& row, std::uint64_t seed, GenerationMode mode,
                          MeanCentering mean_centering = MeanCentering::closed_form);

struct RunRecord {
  std::string table;  // "1", "2" or an experiment name
  int row = 0;
  EnsembleSpec spec;
  GcltParams limit{};
  TestReport report;
  double a_n = 0.0;
  std::size_t reseeds = 0;
  double wall_ms = 0.0;
  std::string generator;
};

struct PlannedRun {
  std::string table;
  int row;
  EnsembleSpec spec;
};

struct RunnerOptions {
  /// Worker threads for (row, seed) jobs; 0 means hardware concurrency.
  unsigned jobs = 0;
  /// When false, wall_ms is written as 0 so output bytes depend on inputs only.
  bool record_timing = true;
};

/// Runs every planned experiment on a bounded pool; records come back in plan order.
std::vector<RunRecord> execute_plan(const std::vector<PlannedRun>& plan, const RunnerOptions& options);

std::string csv_header();
std::string csv_line(const RunRecord& record);
void write_csv(std::ostream& out, const std::vector<RunRecord>& records);

/// Aligned text table with published p-values alongside and a per-row tally of
/// seeds where both tests fail to reject.
std::string format_text_table(const std::vector<RunRecord>& records, const std::vector<TableRow>& rows);

/// Per-row count of records where both KS and AD fail to reject at 5%.
struct RowTally {
  int row;
  int runs;
  int ks_pass;
  int ad_pass;
  int both_pass;
};
std::vector<RowTally> tally_rows(const std::vector<RunRecord>& records);

// ---------------------------------------------------------------------------
// figures

struct HistogramBin {
  double left;
  double right;
  double density;
};

/// Histogram over [lo, hi] normalized by the full sample size, so mass outside
/// the window is missing rather than redistributed.
std::vector<HistogramBin> histogram(std::span<const double> samples, double lo, double hi, std::size_t bins);

struct PdfGrid {
  double lo = -10.0;
  double hi = 10.0;
  std::size_t points = 401;
};

/// Ensemble of the density-comparison figure (2) or the Cauchy-shift convergence figure (3).
EnsembleSpec figure_spec(int figure_id, double scale, std::uint64_t seed, GenerationMode mode);

struct FigureFiles {
  std::filesystem::path superposition;
  std::filesystem::path reference;
  std::filesystem::path pdf;
};

FigureFiles write_figure(int figure_id, double scale, std::uint64_t seed, GenerationMode mode, std::size_t bins,
                         const PdfGrid& grid, const std::filesystem::path& out_dir);

// ---------------------------------------------------------------------------
// config files

struct NamedSpec {
  std::string name;
  EnsembleSpec spec;
};

struct ExperimentConfig {
  std::vector<NamedSpec> experiments;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir;
  std::size_t histogram_bins = 80;
  PdfGrid pdf_grid;
  double scale = 1.0;

  void validate() const;
};

/// Flat key = value text with one [experiment] section per ensemble; keys
/// before the first section are global. '#' starts a comment.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// Output directory precedence: explicit flag, then SGCLT_OUTPUT_DIR, then fallback.
std::filesystem::path resolve_output_dir(const std::string& flag_value, const std::filesystem::path& fallback);

}  // namespace sgclt
