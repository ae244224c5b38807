#include "seqcp/critvals.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "seqcp/error.hpp"
#include "seqcp/parallel.hpp"

namespace seqcp {

namespace {

constexpr int kGridSteps = 1000;
// Path buffers plus stored suprema beyond this many bytes are refused.
constexpr double kMemoryBudgetBytes = 2.0 * 1024 * 1024 * 1024;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void LimitFunctionalSpec::validate() const {
  if (grid_points < 100) throw usage_error("grid_points must be at least 100");
  if (replications < 100) {
    throw usage_error("replications must be at least 100");
  }
  if (!(gamma >= 0.0 && gamma < 0.5)) {
    throw usage_error("gamma must lie in [0, 0.5)");
  }
  if (scheme == Scheme::MMosum && !(b > 0.0 && b < 1.0)) {
    throw usage_error("mMOSUM fraction b must lie in (0, 1)");
  }
}

LimitFunctionalSpec LimitFunctionalSpec::canonical() const {
  LimitFunctionalSpec out = *this;
  if (out.scheme != Scheme::MMosum) out.b = 0.0;
  if (out.normalization == Normalization::Heteroscedastic) out.gamma = 0.0;
  return out;
}

LimitFunctionalSpec LimitFunctionalSpec::desk(Scheme scheme, double gamma,
                                              double b) {
  LimitFunctionalSpec s;
  s.scheme = scheme;
  s.gamma = gamma;
  s.b = b;
  s.grid_points = 2000;
  s.replications = 5000;
  return s;
}

LimitFunctionalSpec LimitFunctionalSpec::full(Scheme scheme, double gamma,
                                              double b) {
  LimitFunctionalSpec s = desk(scheme, gamma, b);
  s.grid_points = 10000;
  s.replications = 50000;
  return s;
}

std::map<double, double> CriticalValueTable::quantiles() const {
  std::map<double, double> out;
  for (double a : {0.10, 0.05, 0.01}) out[a] = critical_value(*this, a);
  return out;
}

void simulate_wiener_path(Rng& rng, std::span<double> path) {
  if (path.empty()) return;
  const double sd = 1.0 / std::sqrt(static_cast<double>(path.size()));
  std::normal_distribution<double> increment(0.0, sd);
  path[0] = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    path[i] = path[i - 1] + increment(rng);
  }
}

std::vector<double> grid_time_weights(const LimitFunctionalSpec& spec) {
  const auto n = static_cast<std::size_t>(spec.grid_points);
  std::vector<double> tw(n, 1.0);
  const bool homo = spec.normalization == Normalization::Homoscedastic;
  if (homo && spec.gamma > 0.0) {
    for (std::size_t i = 1; i < n; ++i) {
      tw[i] = std::pow(static_cast<double>(i) / static_cast<double>(n),
                       -spec.gamma);
    }
  }
  return tw;
}

double limit_functional(std::span<const double> path,
                        const LimitFunctionalSpec& spec,
                        std::span<const double> time_weights) {
  const std::size_t n = path.size();
  const double nd = static_cast<double>(n);
  double sup = 0.0;
  switch (spec.scheme) {
    case Scheme::Cusum:
      for (std::size_t i = 1; i < n; ++i) {
        sup = std::max(sup, time_weights[i] * std::abs(path[i]));
      }
      break;
    case Scheme::MMosum: {
      const double b = spec.b;
      for (std::size_t i = 1; i < n; ++i) {
        const double t = static_cast<double>(i) / nd;
        const double scale = 1.0 - t * (1.0 - b);
        const double inner = t * b / scale;
        const auto j = static_cast<std::size_t>(std::floor(inner * nd + 1e-9));
        const double v = path[i] - scale * path[std::min(j, i)];
        sup = std::max(sup, time_weights[i] * std::abs(v));
      }
      break;
    }
    case Scheme::PageCusum: {
      // Running extrema of W(s)/(1-s) over s in {0, t_1, ..., t}; the s = 0
      // term is the limit value 0.
      double vmin = 0.0;
      double vmax = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        const double t = static_cast<double>(i) / nd;
        const double v = path[i] / (1.0 - t);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
        const double inner = std::max(v - vmin, vmax - v);
        sup = std::max(sup, time_weights[i] * (1.0 - t) * inner);
      }
      break;
    }
  }
  return sup;
}

CriticalValueTable simulate_limit(const LimitFunctionalSpec& raw_spec,
                                  unsigned threads) {
  raw_spec.validate();
  const LimitFunctionalSpec spec = raw_spec.canonical();
  if (threads == 0) threads = default_thread_count();

  const double bytes =
      8.0 * (static_cast<double>(spec.replications) +
             static_cast<double>(threads) * static_cast<double>(spec.grid_points));
  if (bytes > kMemoryBudgetBytes) {
    throw usage_error(
        "critical-value simulation exceeds the memory budget; lower the "
        "replication count or the grid size");
  }

  const auto weights = grid_time_weights(spec);
  std::vector<double> sups(static_cast<std::size_t>(spec.replications));
  const auto n = static_cast<std::size_t>(spec.grid_points);
  const std::size_t workers = std::min<std::size_t>(threads, sups.size());
  const std::size_t block = (sups.size() + workers - 1) / workers;

  // One path buffer per worker block; replication i always uses stream i.
  parallel_for(workers, threads, [&](std::size_t w) {
    std::vector<double> path(n);
    const std::size_t end = std::min(sups.size(), (w + 1) * block);
    for (std::size_t i = w * block; i < end; ++i) {
      Rng rng = make_stream(spec.seed, StreamDomain::LimitPaths, i);
      simulate_wiener_path(rng, path);
      sups[i] = limit_functional(path, spec, weights);
    }
  });

  std::sort(sups.begin(), sups.end());
  CriticalValueTable table;
  table.spec = spec;
  table.sorted_sup_samples = std::move(sups);
  table.quantile_grid.reserve(kGridSteps - 1);
  for (int i = 1; i < kGridSteps; ++i) {
    const double alpha = static_cast<double>(i) / kGridSteps;
    table.quantile_grid.emplace_back(
        alpha, upper_quantile(table.sorted_sup_samples, alpha));
  }
  return table;
}

double upper_quantile(std::span<const double> sorted, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw usage_error("alpha must lie in (0, 1)");
  }
  if (sorted.empty()) throw usage_error("no samples to take a quantile of");
  const double pos = (1.0 - alpha) * static_cast<double>(sorted.size());
  auto idx = static_cast<std::size_t>(std::floor(pos + 1e-9));
  idx = std::min(idx, sorted.size() - 1);
  return sorted[idx];
}

double critical_value(const CriticalValueTable& table, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw usage_error("alpha must lie in (0, 1)");
  }
  if (!table.sorted_sup_samples.empty()) {
    return upper_quantile(table.sorted_sup_samples, alpha);
  }
  // Grid-only table: snap down to the grid alpha (larger c_alpha).
  const auto i = static_cast<long>(std::floor(alpha * kGridSteps + 1e-9));
  if (i < 1 || table.quantile_grid.empty()) {
    throw usage_error("alpha " + format_double(alpha) +
                      " is below the cached quantile grid resolution 0.001");
  }
  return table.quantile_grid.at(static_cast<std::size_t>(i - 1)).second;
}

void write_table(std::ostream& os, const CriticalValueTable& table) {
  const auto& s = table.spec;
  os << "# seqcp critical-value table\n";
  os << "format_version=" << table.format_version << '\n';
  os << "scheme=" << to_string(s.scheme) << '\n';
  os << "gamma=" << format_double(s.gamma) << '\n';
  os << "b=" << format_double(s.b) << '\n';
  os << "normalization=" << to_string(s.normalization) << '\n';
  os << "grid_points=" << s.grid_points << '\n';
  os << "replications=" << s.replications << '\n';
  os << "seed=" << s.seed << '\n';
  os << "created_at="
     << (table.created_at ? std::to_string(*table.created_at) : "none") << '\n';
  os << "quantiles=" << table.quantile_grid.size() << '\n';
  for (const auto& [alpha, c] : table.quantile_grid) {
    os << format_double(alpha) << ' ' << format_double(c) << '\n';
  }
  os << "end\n";
}

namespace {

double parse_real(const std::string& text, const std::string& what,
                  const std::string& source) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw data_error(source + ": malformed " + what + " '" + text + "'");
  }
  return v;
}

long long parse_integer(const std::string& text, const std::string& what,
                        const std::string& source) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw data_error(source + ": malformed " + what + " '" + text + "'");
  }
  return v;
}

}  // namespace

CriticalValueTable read_table(std::istream& is, const std::string& source) {
  std::string line;
  std::map<std::string, std::string> header;
  const char* keys[] = {"format_version", "scheme", "gamma", "b",
                        "normalization", "grid_points", "replications",
                        "seed", "created_at", "quantiles"};
  std::size_t next_key = 0;
  while (next_key < std::size(keys) && std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || line.substr(0, eq) != keys[next_key]) {
      throw data_error(source + ": expected key '" + keys[next_key] +
                       "', found '" + line + "'");
    }
    header[keys[next_key]] = line.substr(eq + 1);
    if (next_key == 0) {
      const auto version = parse_integer(header["format_version"],
                                         "format_version", source);
      if (version != kCriticalValueFormatVersion) {
        throw data_error(source + ": unsupported format_version " +
                         std::to_string(version) + " (expected " +
                         std::to_string(kCriticalValueFormatVersion) + ")");
      }
    }
    ++next_key;
  }
  if (next_key < std::size(keys)) {
    throw data_error(source + ": truncated header");
  }

  CriticalValueTable table;
  auto& s = table.spec;
  try {
    s.scheme = parse_scheme(header["scheme"]);
    s.normalization = parse_normalization(header["normalization"]);
  } catch (const Error& e) {
    throw data_error(source + ": " + e.what());
  }
  s.gamma = parse_real(header["gamma"], "gamma", source);
  s.b = parse_real(header["b"], "b", source);
  s.grid_points = parse_integer(header["grid_points"], "grid_points", source);
  s.replications =
      parse_integer(header["replications"], "replications", source);
  try {
    std::size_t used = 0;
    s.seed = std::stoull(header["seed"], &used);
    if (used != header["seed"].size()) throw std::invalid_argument("seed");
  } catch (const std::exception&) {
    throw data_error(source + ": malformed seed '" + header["seed"] + "'");
  }
  if (header["created_at"] != "none") {
    table.created_at =
        parse_integer(header["created_at"], "created_at", source);
  }
  const auto count = parse_integer(header["quantiles"], "quantiles", source);
  if (count != kGridSteps - 1) {
    throw data_error(source + ": expected " + std::to_string(kGridSteps - 1) +
                     " quantile rows, header says " + std::to_string(count));
  }

  for (long long i = 0; i < count; ++i) {
    if (!std::getline(is, line)) {
      throw data_error(source + ": truncated quantile grid");
    }
    std::istringstream row(line);
    std::string a, c, extra;
    if (!(row >> a >> c) || (row >> extra)) {
      throw data_error(source + ": malformed quantile row '" + line + "'");
    }
    const double alpha = parse_real(a, "alpha", source);
    const double value = parse_real(c, "critical value", source);
    const double expected = static_cast<double>(i + 1) / kGridSteps;
    if (std::abs(alpha - expected) > 1e-12 || !std::isfinite(value) ||
        value < 0.0) {
      throw data_error(source + ": invalid quantile row '" + line + "'");
    }
    if (!table.quantile_grid.empty() &&
        value > table.quantile_grid.back().second) {
      throw data_error(source + ": quantiles not monotone at alpha " + a);
    }
    table.quantile_grid.emplace_back(alpha, value);
  }
  if (!std::getline(is, line) || line != "end") {
    throw data_error(source + ": missing end marker");
  }
  return table;
}

void cache_store(const CriticalValueTable& table,
                 const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  // Write-then-rename so a concurrent reader never sees a partial file.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw data_error("cannot write " + tmp.string());
    write_table(os, table);
    if (!os) throw data_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::optional<CriticalValueTable> cache_load(const LimitFunctionalSpec& spec,
                                             const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  auto table = read_table(is, path.string());
  if (!(table.spec.canonical() == spec.canonical())) return std::nullopt;
  return table;
}

std::filesystem::path default_cache_dir() {
  if (const char* dir = std::getenv("SEQCP_CACHE_DIR"); dir && *dir) {
    return dir;
  }
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) {
    return std::filesystem::path(xdg) / "seqcp";
  }
  if (const char* home = std::getenv("HOME"); home && *home) {
    return std::filesystem::path(home) / ".cache" / "seqcp";
  }
  return ".seqcp-cache";
}

std::string cache_file_name(const LimitFunctionalSpec& raw) {
  const auto s = raw.canonical();
  char buf[256];
  std::snprintf(buf, sizeof buf, "cv_%s_%s_g%.6g_b%.6g_N%ld_R%ld_s%llu.cvt",
                std::string(to_string(s.scheme)).c_str(),
                std::string(to_string(s.normalization)).c_str(), s.gamma, s.b,
                s.grid_points, s.replications,
                static_cast<unsigned long long>(s.seed));
  return buf;
}

CriticalValueCache::CriticalValueCache(std::filesystem::path dir,
                                       bool allow_compute, unsigned threads)
    : dir_(std::move(dir)), allow_compute_(allow_compute), threads_(threads) {}

CriticalValueTable CriticalValueCache::get(
    const LimitFunctionalSpec& spec) const {
  const auto path = dir_ / cache_file_name(spec);
  if (auto cached = cache_load(spec, path)) return *std::move(cached);
  if (!allow_compute_) {
    throw data_error("no cached critical values for " + cache_file_name(spec) +
                     " in " + dir_.string() +
                     "; generate them with `seqcp critvals`");
  }
  auto table = simulate_limit(spec, threads_);
  table.created_at = std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
  cache_store(table, path);
  return table;
}

}  // namespace seqcp
