#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqcp/critvals.hpp"
#include "seqcp/kernels.hpp"
#include "seqcp/monitor.hpp"
#include "seqcp/series_io.hpp"
#include "seqcp/simharness.hpp"

namespace seqcp {

struct AnalysisConfig {
  long historic_len = 120;
  std::vector<KernelKind> kernels{KernelKind::Dom, KernelKind::Wilcoxon};
  std::vector<Scheme> schemes{Scheme::Cusum, Scheme::MMosum, Scheme::PageCusum};
  double gamma = 0.0;
  double b = 0.4;
  double alpha = 0.05;
  /// 0 selects ceil(sqrt(historic_len)).
  long burn_in = 0;
};

/// One row of a trace file. `weight` is the full multiplier (w(m,k)/sigma)
/// so normalized = weight * psi / c_alpha.
struct TraceRow {
  long k = 0;
  double gamma_stat = 0.0;
  double psi = 0.0;
  double weight = 0.0;
  double normalized = 0.0;
};

struct AnalysisRun {
  KernelKind kernel = KernelKind::Dom;
  Scheme scheme = Scheme::Cusum;
  double c_alpha = 0.0;
  long historic_len = 0;
  /// First k with normalized > 1, if any.
  std::optional<long> stopping_time;
  std::vector<TraceRow> trace;
};

struct AnalysisOutput {
  std::vector<AnalysisRun> runs;
};

/// c_alpha for (scheme, gamma, b, alpha).
using CriticalValueLookup =
    std::function<double(Scheme scheme, double gamma, double b, double alpha)>;

/// Lookup backed by a cache of simulated limit distributions.
CriticalValueLookup cached_critical_values(const CriticalValueCache& cache,
                                           long grid_points, long replications,
                                           std::uint64_t seed);

/// Runs every (kernel, scheme) monitor in trace mode over values after the
/// historic window.
AnalysisOutput analyze(std::span<const double> values,
                       const AnalysisConfig& cfg,
                       const CriticalValueLookup& critical);

void write_trace(std::ostream& os, const AnalysisRun& run);
std::vector<TraceRow> read_trace(std::istream& is, const std::string& source);

/// Writes one row per run: kernel, scheme, c_alpha, historic_len,
/// stopping_k and (when timestamps are given) the stopping month.
void write_stopping_summary(std::ostream& os, const AnalysisOutput& out,
                            std::span<const SeriesRecord> series = {});

/// Monthly temperature-like series: a 12-periodic profile plus iid noise,
/// with a level shift of `shift_sds` noise SDs on every monitoring time
/// after shift_k (records historic_len + shift_k onward, 0-based).
struct SyntheticSeriesSpec {
  YearMonth start{1893, 1};
  long months = 720;
  long historic_len = 120;
  long shift_k = 200;
  double shift_sds = 2.0;
  double noise_sd = 1.8;
  Distribution noise = Distribution::StdNormal;
};

std::vector<SeriesRecord> synthetic_temperature_series(
    const SyntheticSeriesSpec& spec, std::uint64_t seed);

}  // namespace seqcp
