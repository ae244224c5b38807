#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seqcp/monitor.hpp"
#include "seqcp/random.hpp"
#include "seqcp/weights.hpp"

namespace seqcp {

inline constexpr int kCriticalValueFormatVersion = 1;
inline constexpr std::uint64_t kDefaultCriticalValueSeed = 0x5EC0C9ULL;

/// Which Wiener functional to simulate and how finely.
struct LimitFunctionalSpec {
  Scheme scheme = Scheme::Cusum;
  double gamma = 0.0;
  double b = 0.4;
  Normalization normalization = Normalization::Homoscedastic;
  long grid_points = 2000;
  long replications = 5000;
  std::uint64_t seed = kDefaultCriticalValueSeed;

  void validate() const;
  /// Zeroes parameters the functional does not read (b outside mMOSUM,
  /// gamma under heteroscedastic normalization) so equal functionals share
  /// one cache entry.
  LimitFunctionalSpec canonical() const;

  static LimitFunctionalSpec desk(Scheme scheme, double gamma, double b);
  static LimitFunctionalSpec full(Scheme scheme, double gamma, double b);

  friend bool operator==(const LimitFunctionalSpec&,
                         const LimitFunctionalSpec&) = default;
};

struct CriticalValueTable {
  LimitFunctionalSpec spec;
  /// All simulated suprema, ascending. Empty for tables read from a cache
  /// file, which keep only the quantile grid.
  std::vector<double> sorted_sup_samples;
  /// (alpha, c_alpha) for alpha = 0.001, 0.002, ..., 0.999.
  std::vector<std::pair<double, double>> quantile_grid;
  std::optional<std::int64_t> created_at;
  int format_version = kCriticalValueFormatVersion;

  /// c_alpha at 0.10, 0.05 and 0.01.
  std::map<double, double> quantiles() const;
};

/// Fills path[i] = W(i / N) for i = 0..N-1 (N = path.size(), path[0] = 0).
void simulate_wiener_path(Rng& rng, std::span<double> path);

/// Precomputed t_i^{-gamma} on the grid, shared by all paths of one spec.
std::vector<double> grid_time_weights(const LimitFunctionalSpec& spec);

/// Grid supremum of the scheme's limit functional over t_i = i/N,
/// i = 1..N-1. `time_weights` comes from grid_time_weights(spec).
double limit_functional(std::span<const double> path,
                        const LimitFunctionalSpec& spec,
                        std::span<const double> time_weights);

/// Runs spec.replications independent paths (stream i seeded from
/// (seed, i)); bit-identical for any thread count.
CriticalValueTable simulate_limit(const LimitFunctionalSpec& spec,
                                  unsigned threads = 0);

/// Sample at 0-based index floor((1 - alpha) n) of an ascending sample:
/// the smallest order statistic c with fewer than alpha*n samples above c.
double upper_quantile(std::span<const double> sorted, double alpha);

double critical_value(const CriticalValueTable& table, double alpha);

void write_table(std::ostream& os, const CriticalValueTable& table);
/// Throws a data error naming the problem on any malformed content.
CriticalValueTable read_table(std::istream& is, const std::string& source);

void cache_store(const CriticalValueTable& table,
                 const std::filesystem::path& path);
/// nullopt when the file is absent or was built for a different spec.
std::optional<CriticalValueTable> cache_load(const LimitFunctionalSpec& spec,
                                             const std::filesystem::path& path);

/// $SEQCP_CACHE_DIR, else $XDG_CACHE_HOME/seqcp, else ~/.cache/seqcp,
/// else ./.seqcp-cache.
std::filesystem::path default_cache_dir();
std::string cache_file_name(const LimitFunctionalSpec& spec);

/// Directory-backed table store. get() loads a matching table or, when
/// allowed, simulates and stores one.
class CriticalValueCache {
 public:
  explicit CriticalValueCache(std::filesystem::path dir = default_cache_dir(),
                              bool allow_compute = true, unsigned threads = 0);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  CriticalValueTable get(const LimitFunctionalSpec& spec) const;

 private:
  std::filesystem::path dir_;
  bool allow_compute_;
  unsigned threads_;
};

}  // namespace seqcp
