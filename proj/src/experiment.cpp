#include "sgclt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sgclt/sampling.hpp"

namespace sgclt {

namespace {

constexpr double kMinScaledLength = 1000.0;

// Shortest text that reads back to the same double.
std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// RFC 4180 quoting for fields holding commas or quotes.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || v < 0) throw std::invalid_argument("'" + key + "' must be a non-negative integer, got '" + value + "'");
  return static_cast<std::size_t>(v);
}

double parse_real(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size()) throw std::invalid_argument("'" + key + "' must be a number, got '" + value + "'");
  return v;
}

std::size_t scaled(std::size_t n, double scale) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * scale)));
}

}  // namespace

// ---------------------------------------------------------------------------
// tables

std::vector<TableRow> table_rows(int table_id) {
  using L = ParameterLaw;
  const L one = L::constant(1.0);
  if (table_id == 1) {
    return {
        {1, 1, 0.5, one, one, ShiftKind::none, 10000, 50000, 0.122, 0.074},
        {1, 2, 0.5, L::uniform(1, 2), L::uniform(1, 2), ShiftKind::none, 1000, 100000, 0.561, 0.413},
        {1, 3, 0.5, L::uniform(0.5, 1), L::uniform(1, 2), ShiftKind::none, 1000, 100000, 0.865, 0.546},
        {1, 4, 1.0, one, one, ShiftKind::none, 1000, 100000, 0.226, 0.308},
        {1, 5, 1.0, L::uniform(1, 2), L::uniform(1, 2), ShiftKind::none, 1000, 100000, 0.741, 0.497},
        {1, 6, 1.0, L::uniform(0.5, 1), L::uniform(1, 2), ShiftKind::none, 1000, 100000, 0.659, 0.301},
        {1, 7, 1.5, one, one, ShiftKind::none, 1000, 100000, 0.916, 0.529},
        {1, 8, 1.5, L::uniform(1, 1.2), L::uniform(1, 1.2), ShiftKind::none, 10000, 20000, 0.768, 0.548},
        {1, 9, 1.5, L::uniform(0.5, 1), L::uniform(1.5, 2), ShiftKind::none, 10000, 30000, 0.108, 0.099},
    };
  }
  if (table_id == 2) {
    const L three = L::constant(3.0);
    return {
        {2, 1, 0.5, three, one, ShiftKind::linear, 2000, 10000, 0.136, 0.110},
        {2, 2, 0.5, three, one, ShiftKind::cauchy, 1000, 10000, 0.289, 0.190},
        {2, 3, 1.0, three, one, ShiftKind::linear, 1000, 10000, 0.305, 0.081},
        {2, 4, 1.0, three, one, ShiftKind::cauchy, 2000, 10000, 0.145, 0.093},
        {2, 5, 1.5, three, one, ShiftKind::cauchy, 1000, 10000, 0.371, 0.286},
    };
  }
  throw std::invalid_argument("unknown table " + std::to_string(table_id) + " (expected 1 or 2)");
}

double minimum_feasible_scale(int table_id) {
  std::size_t min_length = SIZE_MAX;
  for (const auto& r : table_rows(table_id)) min_length = std::min(min_length, r.seq_length);
  return kMinScaledLength / static_cast<double>(min_length);
}

std::vector<TableRow> scaled_rows(int table_id, double scale, std::size_t min_length) {
  if (!(scale > 0.0 && scale <= 1.0)) throw std::invalid_argument("scale must lie in (0, 1], got " + fmt(scale, "%g"));
  auto rows = table_rows(table_id);
  for (auto& r : rows) {
    if (scale * static_cast<double>(r.seq_length) < kMinScaledLength) {
      throw std::invalid_argument("scale " + fmt(scale, "%g") + " gives L < 1000 on table " + std::to_string(table_id) +
                                  " row " + std::to_string(r.row) + "; minimum feasible scale is " +
                                  fmt(minimum_feasible_scale(table_id), "%g"));
    }
    r.n_processes = scaled(r.n_processes, scale);
    r.seq_length = std::max(scaled(r.seq_length, scale), min_length);
  }
  return rows;
}

EnsembleSpec spec_for_row(const TableRow& row, std::uint64_t seed, GenerationMode mode, MeanCentering mean_centering) {
  EnsembleSpec spec;
  spec.alpha = row.alpha;
  spec.n_processes = row.n_processes;
  spec.seq_length = row.seq_length;
  spec.delta1_law = row.delta1_law;
  spec.delta2_law = row.delta2_law;
  spec.shift = row.shift;
  spec.mode = mode;
  spec.seed = seed;
  spec.mean_centering = mean_centering;
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// running

std::vector<RunRecord> execute_plan(const std::vector<PlannedRun>& plan, const RunnerOptions& options) {
  std::vector<RunRecord> records(plan.size());
  std::vector<std::exception_ptr> errors(plan.size());
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (std::size_t k = next++; k < plan.size(); k = next++) {
      try {
        const PlannedRun& p = plan[k];
        const auto start = std::chrono::steady_clock::now();
        const ConvergenceRun run = run_convergence_experiment(p.spec);
        const auto stop = std::chrono::steady_clock::now();
        RunRecord& r = records[k];
        r.table = p.table;
        r.row = p.row;
        r.spec = p.spec;
        r.limit = {run.predicted_limit.beta, run.predicted_limit.gamma};
        r.report = run.report;
        r.a_n = run.a_n;
        r.reseeds = run.reseeds;
        r.wall_ms = options.record_timing ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
        r.generator = std::string(RandomSource::generator_id);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };

  unsigned jobs = options.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.jobs;
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(plan.size(), 1)));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return records;
}

std::string csv_header() {
  return "table,row,alpha,delta1_law,delta2_law,shift,N,L,seed,beta_star,gamma_star,ks_stat,ks_p,ad_stat,ad_p,ks_reject,"
         "ad_reject,wall_ms";
}

std::string csv_line(const RunRecord& r) {
  std::ostringstream s;
  s << csv_field(r.table) << ',' << r.row << ',' << fmt(r.spec.alpha) << ',' << csv_field(r.spec.delta1_law.describe())
    << ',' << csv_field(r.spec.delta2_law.describe()) << ',' << to_string(r.spec.shift) << ',' << r.spec.n_processes << ','
    << r.spec.seq_length << ',' << r.spec.seed << ',' << fmt(r.limit.beta) << ',' << fmt(r.limit.gamma) << ','
    << fmt(r.report.ks_statistic) << ',' << fmt(r.report.ks_p) << ',' << fmt(r.report.ad_statistic) << ','
    << fmt(r.report.ad_p) << ',' << (r.report.ks_reject ? 1 : 0) << ',' << (r.report.ad_reject ? 1 : 0) << ','
    << fmt(r.wall_ms, "%.3f");
  return s.str();
}

void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << csv_header() << '\n';
  for (const auto& r : records) out << csv_line(r) << '\n';
}

std::vector<RowTally> tally_rows(const std::vector<RunRecord>& records) {
  std::map<int, RowTally> by_row;
  for (const auto& r : records) {
    auto [it, inserted] = by_row.try_emplace(r.row, RowTally{r.row, 0, 0, 0, 0});
    RowTally& t = it->second;
    ++t.runs;
    t.ks_pass += r.report.ks_reject ? 0 : 1;
    t.ad_pass += r.report.ad_reject ? 0 : 1;
    t.both_pass += r.report.both_fail_to_reject() ? 1 : 0;
  }
  std::vector<RowTally> out;
  for (const auto& [row, t] : by_row) out.push_back(t);
  return out;
}

std::string format_text_table(const std::vector<RunRecord>& records, const std::vector<TableRow>& rows) {
  std::ostringstream s;
  s << std::left << std::setw(4) << "row" << std::setw(6) << "alpha" << std::setw(11) << "delta1" << std::setw(11)
    << "delta2" << std::setw(8) << "shift" << std::right << std::setw(7) << "N" << std::setw(8) << "L" << std::setw(21)
    << "seed" << std::setw(9) << "beta*" << std::setw(9) << "gamma*" << std::setw(8) << "KS p" << std::setw(8) << "AD p"
    << std::setw(9) << "pub KS" << std::setw(8) << "pub AD" << "  decision\n";
  for (const auto& r : records) {
    const auto pub = std::find_if(rows.begin(), rows.end(), [&](const TableRow& t) { return t.row == r.row; });
    const auto pval = [](double p) { return fmt(p, "%.3f"); };
    s << std::left << std::setw(4) << r.row << std::setw(6) << fmt(r.spec.alpha, "%g") << std::setw(11)
      << r.spec.delta1_law.describe() << std::setw(11) << r.spec.delta2_law.describe() << std::setw(8)
      << to_string(r.spec.shift) << std::right << std::setw(7) << r.spec.n_processes << std::setw(8) << r.spec.seq_length
      << std::setw(21) << r.spec.seed << std::setw(9) << fmt(r.limit.beta, "%.4f") << std::setw(9)
      << fmt(r.limit.gamma, "%.4f") << std::setw(8) << pval(r.report.ks_p) << std::setw(8) << pval(r.report.ad_p)
      << std::setw(9) << (pub != rows.end() ? pval(pub->published_ks_p) : "-") << std::setw(8)
      << (pub != rows.end() ? pval(pub->published_ad_p) : "-") << "  "
      << (r.report.both_fail_to_reject() ? "accept" : "reject") << '\n';
  }
  s << "\nfail-to-reject counts per row (KS, AD, both)\n";
  for (const auto& t : tally_rows(records)) {
    s << "  row " << t.row << ": " << t.ks_pass << "/" << t.runs << ", " << t.ad_pass << "/" << t.runs << ", "
      << t.both_pass << "/" << t.runs << '\n';
  }
  return s.str();
}

// ---------------------------------------------------------------------------
// figures

std::vector<HistogramBin> histogram(std::span<const double> samples, double lo, double hi, std::size_t bins) {
  if (bins == 0 || !(lo < hi)) throw std::invalid_argument("histogram needs bins > 0 and lo < hi");
  if (samples.empty()) throw std::invalid_argument("histogram of an empty sample");
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> counts(bins, 0.0);
  for (const double x : samples) {
    if (!(x >= lo && x <= hi)) continue;
    auto k = static_cast<std::size_t>((x - lo) / width);
    counts[std::min(k, bins - 1)] += 1.0;
  }
  std::vector<HistogramBin> out(bins);
  const double norm = 1.0 / (static_cast<double>(samples.size()) * width);
  for (std::size_t k = 0; k < bins; ++k) {
    out[k] = {lo + width * static_cast<double>(k), lo + width * static_cast<double>(k + 1), counts[k] * norm};
  }
  return out;
}

EnsembleSpec figure_spec(int figure_id, double scale, std::uint64_t seed, GenerationMode mode) {
  if (!(scale > 0.0 && scale <= 1.0)) throw std::invalid_argument("scale must lie in (0, 1]");
  EnsembleSpec spec;
  spec.alpha = 1.0;
  spec.seed = seed;
  spec.mode = mode;
  if (figure_id == 2) {
    spec.delta1_law = ParameterLaw::uniform(0.5, 1.0);
    spec.delta2_law = ParameterLaw::uniform(1.0, 2.0);
    spec.n_processes = scaled(1000, scale);
    spec.seq_length = scaled(100000, scale);
  } else if (figure_id == 3) {
    spec.delta1_law = ParameterLaw::constant(3.0);
    spec.delta2_law = ParameterLaw::constant(1.0);
    spec.shift = ShiftKind::cauchy;
    spec.n_processes = scaled(2000, scale);
    spec.seq_length = scaled(10000, scale);
  } else {
    throw std::invalid_argument("unknown figure " + std::to_string(figure_id) + " (expected 2 or 3)");
  }
  spec.validate();
  return spec;
}

FigureFiles write_figure(int figure_id, double scale, std::uint64_t seed, GenerationMode mode, std::size_t bins,
                         const PdfGrid& grid, const std::filesystem::path& out_dir) {
  if (grid.points < 2 || !(grid.lo < grid.hi)) throw std::invalid_argument("pdf grid needs points >= 2 and lo < hi");
  const EnsembleSpec spec = figure_spec(figure_id, scale, seed, mode);
  const SuperpositionResult sup = run_superposition(spec);
  RandomSource ref_rng = RandomSource(seed).derive_child(kReferenceStream);
  const Eigen::ArrayXd reference = sample_stable_n(sup.predicted_limit, spec.seq_length, ref_rng);

  std::filesystem::create_directories(out_dir);
  const std::string stem = "figure" + std::to_string(figure_id) + "_seed" + std::to_string(seed);
  FigureFiles files{out_dir / (stem + "_superposition.csv"), out_dir / (stem + "_reference.csv"),
                    out_dir / (stem + "_pdf.csv")};

  const auto write_hist = [&](const std::filesystem::path& path, const Eigen::ArrayXd& samples) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << "bin_left,bin_right,density\n";
    for (const auto& b : histogram(as_span(samples), grid.lo, grid.hi, bins)) {
      f << fmt(b.left) << ',' << fmt(b.right) << ',' << fmt(b.density) << '\n';
    }
  };
  write_hist(files.superposition, sup.samples);
  write_hist(files.reference, reference);

  std::ofstream f(files.pdf);
  if (!f) throw std::runtime_error("cannot write " + files.pdf.string());
  f << "x,density\n";
  for (std::size_t k = 0; k < grid.points; ++k) {
    const double x = grid.lo + (grid.hi - grid.lo) * static_cast<double>(k) / static_cast<double>(grid.points - 1);
    f << fmt(x) << ',' << fmt(stable_pdf(sup.predicted_limit, x, 1e-8)) << '\n';
  }
  return files;
}

// ---------------------------------------------------------------------------
// config files

void ExperimentConfig::validate() const {
  if (experiments.empty()) throw std::invalid_argument("config defines no [experiment] section");
  if (seeds.empty()) throw std::invalid_argument("config needs at least one seed (seeds = 1,2,3)");
  if (histogram_bins < 10) throw std::invalid_argument("histogram_bins must be at least 10");
  if (pdf_grid.points < 2 || !(pdf_grid.lo < pdf_grid.hi)) throw std::invalid_argument("pdf grid needs points >= 2 and lo < hi");
  if (!(scale > 0.0 && scale <= 1.0)) throw std::invalid_argument("scale must lie in (0, 1]");
  for (const auto& e : experiments) e.spec.validate();
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      if (item.front() == '-') throw std::invalid_argument("negative");
      v = std::stoull(item, &used, 0);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw std::invalid_argument("invalid seed '" + item + "' (expected unsigned 64-bit integers)");
    seeds.push_back(v);
  }
  return seeds;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  NamedSpec* current = nullptr;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw std::invalid_argument(where + "unterminated section header");
      std::string name = trim(line.substr(1, line.size() - 2));
      if (name.rfind("experiment", 0) != 0) throw std::invalid_argument(where + "unknown section [" + name + "]");
      name = trim(name.substr(10));
      if (name.empty()) name = "exp" + std::to_string(cfg.experiments.size() + 1);
      cfg.experiments.push_back({name, EnsembleSpec{}});
      current = &cfg.experiments.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (!current) {
        if (key == "seeds") cfg.seeds = parse_seed_list(value);
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "histogram_bins") cfg.histogram_bins = parse_count(key, value);
        else if (key == "pdf_lo") cfg.pdf_grid.lo = parse_real(key, value);
        else if (key == "pdf_hi") cfg.pdf_grid.hi = parse_real(key, value);
        else if (key == "pdf_points") cfg.pdf_grid.points = parse_count(key, value);
        else if (key == "scale") cfg.scale = parse_real(key, value);
        else throw std::invalid_argument("unknown global key '" + key + "'");
      } else {
        EnsembleSpec& s = current->spec;
        if (key == "alpha") s.alpha = parse_real(key, value);
        else if (key == "N") s.n_processes = parse_count(key, value);
        else if (key == "L") s.seq_length = parse_count(key, value);
        else if (key == "delta1") s.delta1_law = ParameterLaw::parse(value);
        else if (key == "delta2") s.delta2_law = ParameterLaw::parse(value);
        else if (key == "shift") s.shift = parse_shift_kind(value);
        else if (key == "mode") s.mode = parse_generation_mode(value);
        else if (key == "mean_centering") s.mean_centering = parse_mean_centering(value);
        else if (key == "stride") s.stride = parse_count(key, value);
        else throw std::invalid_argument("unknown experiment key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path.string());
  return parse_config(f);
}

std::filesystem::path resolve_output_dir(const std::string& flag_value, const std::filesystem::path& fallback) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("SGCLT_OUTPUT_DIR"); env && *env) return env;
  return fallback;
}

}  // namespace sgclt
