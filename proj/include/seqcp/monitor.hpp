#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "seqcp/kernels.hpp"
#include "seqcp/weights.hpp"

namespace seqcp {

enum class Scheme { Cusum, MMosum, PageCusum };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);

/// Everything the monitor needs from the historic window X_1..X_m.
/// Immutable after init_monitor; shareable across streams.
struct HistoricSummary {
  std::uint64_t id = 0;
  long m = 0;
  double mean = 0.0;
  std::vector<double> sorted_historic;
  double sigma1_sq = 0.0;
  double sigma2_sq = 0.0;
  double theta = 0.0;
  KernelSpec kernel{KernelKind::Dom};
};

/// One step's worth of diagnostics; `stat` is the normalized statistic that
/// is compared with c_alpha.
struct StepTrace {
  long k = 0;
  double gamma = 0.0;
  double psi = 0.0;
  double weight = 0.0;
  double stat = 0.0;
};

struct MonitorState {
  std::uint64_t summary_id = 0;
  Scheme scheme = Scheme::Cusum;
  WeightConfig cfg;
  double c_alpha = 0.0;
  /// Keep updating the statistic after a rejection (stopped_at unchanged).
  bool trace_mode = false;

  long k = 0;
  double gamma_now = 0.0;
  /// gamma_prefix[l] = Gamma(m, l), gamma_prefix[0] = 0.
  std::vector<double> gamma_prefix{0.0};
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  std::optional<long> stopped_at;
  StepTrace last;
};

struct Continue {
  double stat;
  /// c_alpha - stat; positive while below the boundary.
  double threshold_margin;
};

struct Reject {
  long k;
};

using Decision = std::variant<Continue, Reject>;

/// Builds the historic summary (variances via kernel_variance) and a fresh
/// state at k = 0. Throws on fewer than two historic values, c_alpha <= 0 or
/// a zero resolved variance.
std::pair<HistoricSummary, MonitorState> init_monitor(
    std::span<const double> historic, const KernelSpec& kernel, Scheme scheme,
    const WeightConfig& cfg, double c_alpha);

/// Feeds X_{m+k+1}. Gamma is updated incrementally in O(log m) (Wilcoxon) or
/// O(1) (DOM, SymmetricSum). Throws a data error on a non-finite value.
Decision step(const HistoricSummary& summary, MonitorState& state,
              double x_new);

/// Current scheme statistic Psi(m, k) (unsigned) from the state.
double scheme_statistic(const MonitorState& state);

/// floor(k b), robust to b*k landing a hair below an integer.
long mmosum_lag(long k, double b);

/// Per-step increment (1/m) sum_i (h(X_i, x) - theta).
double gamma_increment(const HistoricSummary& summary, double x);

/// Multiplier applied to Psi before comparing with c_alpha.
double effective_weight(const HistoricSummary& summary,
                        const WeightConfig& cfg, long k);

// Literal O(m k) evaluations used as test oracles for the streaming path.

double brute_gamma(std::span<const double> historic,
                   std::span<const double> monitoring, const KernelSpec& kernel,
                   long k);

double brute_psi(std::span<const double> historic,
                 std::span<const double> monitoring, const KernelSpec& kernel,
                 Scheme scheme, const WeightConfig& cfg, long k);

}  // namespace seqcp
