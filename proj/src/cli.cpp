#include "seqcp/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "seqcp/analysis.hpp"
#include "seqcp/error.hpp"
#include "seqcp/report_io.hpp"

namespace seqcp {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw data_error("cannot write " + path.string());
  return os;
}

struct CritvalsArgs {
  std::string scheme;
  double gamma = 0.0;
  double b = 0.4;
  std::string normalization = "homo";
  long grid = 2000;
  long reps = 5000;
  std::uint64_t seed = kDefaultCriticalValueSeed;
  bool full = false;
  bool timestamp = false;
  std::string out;
  unsigned threads = 0;
};

struct SimulateArgs {
  std::string config;
  std::string out_dir;
  unsigned threads = 0;
};

struct AnalyzeArgs {
  std::string csv;
  std::string column = "value";
  long historic = 120;
  double gamma = 0.0;
  double b = 0.4;
  double alpha = 0.05;
  std::string kernels = "dom,wilcoxon";
  std::string schemes = "cusum,mmosum,page";
  std::string out_dir;
  bool no_deseasonalize = false;
  int period = 12;
  long grid = 2000;
  long reps = 5000;
  std::uint64_t seed = kDefaultCriticalValueSeed;
  unsigned threads = 0;
};

struct CacheArgs {
  std::string dir;
  std::vector<std::string> files;
};

int do_critvals(const CritvalsArgs& a, std::ostream& out) {
  LimitFunctionalSpec spec;
  spec.scheme = parse_scheme(a.scheme);
  spec.gamma = a.gamma;
  spec.b = a.b;
  spec.normalization = parse_normalization(a.normalization);
  spec.grid_points = a.full ? 10000 : a.grid;
  spec.replications = a.full ? 50000 : a.reps;
  spec.seed = a.seed;
  spec.validate();

  auto table = simulate_limit(spec, a.threads);
  if (a.timestamp) {
    table.created_at = std::chrono::duration_cast<std::chrono::seconds>(
                           std::chrono::system_clock::now().time_since_epoch())
                           .count();
  }
  const fs::path path =
      a.out.empty() ? default_cache_dir() / cache_file_name(spec) : fs::path(a.out);
  cache_store(table, path);
  out << "wrote " << path.string() << '\n';
  for (const auto& [alpha, c] : table.quantiles()) {
    out << "alpha=" << alpha << "\tc_alpha=" << c << '\n';
  }
  return kExitOk;
}

int do_simulate(const SimulateArgs& a, std::ostream& out) {
  std::ifstream is(a.config);
  if (!is) throw data_error("cannot open " + a.config);
  const auto cells = parse_scenario_config(is, a.config);
  if (cells.empty()) throw data_error(a.config + ": no scenario blocks");

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  const CriticalValueCache cache(default_cache_dir(), true, a.threads);
  RunOptions opts;
  opts.threads = a.threads;

  auto summary = open_output(dir / "summary.tsv");
  write_report_header(summary);
  write_report_header(out);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto report = run_cell(cells[i], cache, opts);
    const int idx = static_cast<int>(i + 1);
    write_report_row(summary, idx, report);
    write_report_row(out, idx, report);
    auto hist = open_output(dir / ("delays_cell" + std::to_string(idx) + ".tsv"));
    write_delay_histogram(hist, report);
  }
  return kExitOk;
}

int do_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  auto series = load_csv(a.csv, a.column);
  for (const auto& [before, after] : find_gaps(series)) {
    err << "warning: gap in series between " << before.str() << " and "
        << after.str() << '\n';
  }
  if (!a.no_deseasonalize) series = deseasonalize(series, a.historic, a.period);

  AnalysisConfig cfg;
  cfg.historic_len = a.historic;
  cfg.gamma = a.gamma;
  cfg.b = a.b;
  cfg.alpha = a.alpha;
  cfg.kernels.clear();
  for (const auto& k : split_list(a.kernels)) cfg.kernels.push_back(parse_kernel(k));
  cfg.schemes.clear();
  for (const auto& s : split_list(a.schemes)) cfg.schemes.push_back(parse_scheme(s));
  if (cfg.kernels.empty() || cfg.schemes.empty()) {
    throw usage_error("--kernels and --schemes must name at least one entry");
  }

  const CriticalValueCache cache(default_cache_dir(), true, a.threads);
  const auto values = values_of(series);
  const auto result =
      analyze(values, cfg, cached_critical_values(cache, a.grid, a.reps, a.seed));

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  {
    auto os = open_output(dir / "series_adjusted.csv");
    write_csv(os, series, a.column);
  }
  for (const auto& run : result.runs) {
    auto os = open_output(dir / ("trace_" + std::string(to_string(run.kernel)) +
                                 "_" + std::string(to_string(run.scheme)) + ".tsv"));
    write_trace(os, run);
  }
  {
    auto os = open_output(dir / "stopping_times.tsv");
    write_stopping_summary(os, result, series);
  }
  write_stopping_summary(out, result, series);
  return kExitOk;
}

int do_cache_ls(const CacheArgs& a, std::ostream& out) {
  const fs::path dir = a.dir.empty() ? default_cache_dir() : fs::path(a.dir);
  out << "cache directory: " << dir.string() << '\n';
  if (!fs::exists(dir)) return kExitOk;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".cvt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream is(f);
    try {
      const auto t = read_table(is, f.string());
      out << f.filename().string() << "\tc(0.05)=" << critical_value(t, 0.05)
          << '\n';
    } catch (const Error& e) {
      out << f.filename().string() << "\tunreadable: " << e.what() << '\n';
    }
  }
  return kExitOk;
}

int do_cache_rm(const CacheArgs& a, std::ostream& out) {
  const fs::path dir = a.dir.empty() ? default_cache_dir() : fs::path(a.dir);
  if (!fs::exists(dir)) return kExitOk;
  std::size_t removed = 0;
  if (a.files.empty()) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".cvt") {
        fs::remove(entry.path());
        ++removed;
      }
    }
  } else {
    for (const auto& name : a.files) {
      const fs::path p = dir / fs::path(name).filename();
      if (p.extension() != ".cvt") {
        throw usage_error("refusing to remove non-cache file " + name);
      }
      if (fs::remove(p)) ++removed;
    }
  }
  out << "removed " << removed << " cached table(s) from " << dir.string()
      << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Sequential change-point monitoring with U-statistics", "seqcp"};
  app.require_subcommand(1);

  CritvalsArgs cv;
  auto* critvals = app.add_subcommand(
      "critvals", "Simulate limit distributions and tabulate critical values");
  critvals->add_option("--scheme", cv.scheme, "cusum | mmosum | page")->required();
  critvals->add_option("--gamma", cv.gamma, "weight exponent in [0, 0.5)");
  critvals->add_option("--b", cv.b, "mMOSUM fraction in (0, 1)");
  critvals->add_option("--normalization", cv.normalization, "homo | hetero");
  critvals->add_option("--grid", cv.grid, "grid points per Wiener path");
  critvals->add_option("--reps", cv.reps, "number of simulated paths");
  critvals->add_option("--seed", cv.seed, "master seed");
  critvals->add_flag("--full", cv.full, "grid 10000, 50000 paths");
  critvals->add_flag("--timestamp", cv.timestamp, "record created_at");
  critvals->add_option("--out", cv.out, "output file (default: cache dir)");
  critvals->add_option("--threads", cv.threads, "worker threads (0 = all)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario grid");
  simulate->add_option("--config", sim.config, "scenario config file")->required();
  simulate->add_option("--out-dir", sim.out_dir, "report directory")->required();
  simulate->add_option("--threads", sim.threads, "worker threads (0 = all)");

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Monitor a monthly CSV series");
  analyze_cmd->add_option("--csv", an.csv, "input CSV with a 'date' column")->required();
  analyze_cmd->add_option("--column", an.column, "value column name");
  analyze_cmd->add_option("--historic", an.historic, "historic window length");
  analyze_cmd->add_option("--gamma", an.gamma, "weight exponent in [0, 0.5)");
  analyze_cmd->add_option("--b", an.b, "mMOSUM fraction in (0, 1)");
  analyze_cmd->add_option("--alpha", an.alpha, "significance level");
  analyze_cmd->add_option("--kernels", an.kernels, "comma list: dom,wilcoxon,symsum");
  analyze_cmd->add_option("--schemes", an.schemes, "comma list: cusum,mmosum,page");
  analyze_cmd->add_option("--out-dir", an.out_dir, "output directory")->required();
  analyze_cmd->add_flag("--no-deseasonalize", an.no_deseasonalize,
                        "skip monthly mean removal");
  analyze_cmd->add_option("--period", an.period, "seasonal period in months");
  analyze_cmd->add_option("--grid", an.grid, "critical-value grid points");
  analyze_cmd->add_option("--reps", an.reps, "critical-value paths");
  analyze_cmd->add_option("--seed", an.seed, "critical-value seed");
  analyze_cmd->add_option("--threads", an.threads, "worker threads (0 = all)");

  CacheArgs ca;
  auto* cache = app.add_subcommand("cache", "Inspect the critical-value cache");
  cache->require_subcommand(1);
  auto* cache_ls = cache->add_subcommand("ls", "List cached tables");
  auto* cache_rm = cache->add_subcommand("rm", "Remove cached tables");
  for (auto* sub : {cache, cache_ls, cache_rm}) {
    sub->add_option("--dir", ca.dir, "cache directory (default $SEQCP_CACHE_DIR)");
  }
  cache_rm->add_option("files", ca.files, "table file names (default: all)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (critvals->parsed()) return do_critvals(cv, out);
    if (simulate->parsed()) return do_simulate(sim, out);
    if (analyze_cmd->parsed()) return do_analyze(an, out, err);
    if (cache_ls->parsed()) return do_cache_ls(ca, out);
    if (cache_rm->parsed()) return do_cache_rm(ca, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::Usage ? kExitUsage : kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace seqcp
