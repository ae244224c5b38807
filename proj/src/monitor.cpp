#include "seqcp/monitor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "seqcp/error.hpp"

namespace seqcp {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Cusum: return "cusum";
    case Scheme::MMosum: return "mmosum";
    case Scheme::PageCusum: return "page";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "cusum") return Scheme::Cusum;
  if (name == "mmosum") return Scheme::MMosum;
  if (name == "page" || name == "page-cusum" || name == "pagecusum") {
    return Scheme::PageCusum;
  }
  throw usage_error("unknown scheme '" + std::string(name) +
                    "' (expected cusum, mmosum or page)");
}

namespace {

std::atomic<std::uint64_t> next_summary_id{1};

}  // namespace

long mmosum_lag(long k, double b) {
  return static_cast<long>(std::floor(static_cast<double>(k) * b + 1e-9));
}

std::pair<HistoricSummary, MonitorState> init_monitor(
    std::span<const double> historic, const KernelSpec& kernel, Scheme scheme,
    const WeightConfig& cfg, double c_alpha) {
  if (historic.size() < 2) throw data_error("insufficient historic data");
  if (!(c_alpha > 0.0)) throw usage_error("c_alpha must be positive");
  cfg.validate();
  for (double x : historic) {
    if (!std::isfinite(x)) throw data_error("non-finite historic observation");
  }

  HistoricSummary summary;
  summary.id = next_summary_id.fetch_add(1, std::memory_order_relaxed);
  summary.m = static_cast<long>(historic.size());
  summary.mean = std::accumulate(historic.begin(), historic.end(), 0.0) /
                 static_cast<double>(historic.size());
  summary.sorted_historic.assign(historic.begin(), historic.end());
  std::sort(summary.sorted_historic.begin(), summary.sorted_historic.end());
  const auto var = kernel_variance(kernel, historic);
  summary.sigma1_sq = var.sigma1_sq;
  summary.sigma2_sq = var.sigma2_sq;
  summary.theta = kernel.theta();
  summary.kernel = kernel;
  if (!(summary.sigma1_sq > 0.0) || !(summary.sigma2_sq > 0.0)) {
    throw data_error("degenerate historic variance (all values equal?)");
  }

  MonitorState state;
  state.summary_id = summary.id;
  state.scheme = scheme;
  state.cfg = cfg;
  state.c_alpha = c_alpha;
  return {std::move(summary), std::move(state)};
}

double gamma_increment(const HistoricSummary& s, double x) {
  switch (s.kernel.kind()) {
    case KernelKind::Dom:
      return s.mean - x;
    case KernelKind::Wilcoxon: {
      const auto below = std::lower_bound(s.sorted_historic.begin(),
                                          s.sorted_historic.end(), x) -
                         s.sorted_historic.begin();
      return static_cast<double>(below) / static_cast<double>(s.m) - 0.5;
    }
    case KernelKind::SymmetricSum:
      return 0.5 * (s.mean + x);
  }
  return 0.0;
}

double effective_weight(const HistoricSummary& s, const WeightConfig& cfg,
                        long k) {
  if (k <= cfg.burn_in) return 0.0;
  if (cfg.normalization == Normalization::Heteroscedastic) {
    return hetero_weight(s.m, k, std::sqrt(s.sigma1_sq),
                         std::sqrt(s.sigma2_sq));
  }
  return weight(s.m, k, cfg) / std::sqrt(s.sigma1_sq);
}

double scheme_statistic(const MonitorState& st) {
  switch (st.scheme) {
    case Scheme::Cusum:
      return std::abs(st.gamma_now);
    case Scheme::MMosum:
      return std::abs(st.gamma_now -
                      st.gamma_prefix[static_cast<std::size_t>(
                          mmosum_lag(st.k, st.cfg.mmosum_b))]);
    case Scheme::PageCusum:
      return std::max(st.gamma_now - st.gamma_min,
                      st.gamma_max - st.gamma_now);
  }
  return 0.0;
}

Decision step(const HistoricSummary& summary, MonitorState& state,
              double x_new) {
  if (state.summary_id != summary.id) {
    throw std::logic_error("monitor state belongs to a different summary");
  }
  if (!std::isfinite(x_new)) throw data_error("non-finite observation");
  if (state.stopped_at && !state.trace_mode) return Reject{*state.stopped_at};

  state.k += 1;
  state.gamma_now += gamma_increment(summary, x_new);
  state.gamma_prefix.push_back(state.gamma_now);
  state.gamma_min = std::min(state.gamma_min, state.gamma_now);
  state.gamma_max = std::max(state.gamma_max, state.gamma_now);

  const double psi = scheme_statistic(state);
  const double w = effective_weight(summary, state.cfg, state.k);
  const double stat = w * psi;
  state.last = {state.k, state.gamma_now, psi, w, stat};

  if (state.stopped_at) return Reject{*state.stopped_at};
  if (stat > state.c_alpha) {
    state.stopped_at = state.k;
    return Reject{state.k};
  }
  return Continue{stat, state.c_alpha - stat};
}

double brute_gamma(std::span<const double> historic,
                   std::span<const double> monitoring, const KernelSpec& kernel,
                   long k) {
  if (k < 0 || static_cast<std::size_t>(k) > monitoring.size()) {
    throw usage_error("k exceeds the monitoring sample");
  }
  const double m = static_cast<double>(historic.size());
  const double theta = kernel.theta();
  double total = 0.0;
  for (long j = 0; j < k; ++j) {
    double inner = 0.0;
    for (double xi : historic) {
      inner += kernel(xi, monitoring[static_cast<std::size_t>(j)]) - theta;
    }
    total += inner / m;
  }
  return total;
}

double brute_psi(std::span<const double> historic,
                 std::span<const double> monitoring, const KernelSpec& kernel,
                 Scheme scheme, const WeightConfig& cfg, long k) {
  if (k < 0 || static_cast<std::size_t>(k) > monitoring.size()) {
    throw usage_error("k exceeds the monitoring sample");
  }
  // column[j] = (1/m) sum_i (h(X_i, X_{m+j+1}) - theta)
  const double m = static_cast<double>(historic.size());
  const double theta = kernel.theta();
  std::vector<double> column(static_cast<std::size_t>(k));
  for (long j = 0; j < k; ++j) {
    double inner = 0.0;
    for (double xi : historic) {
      inner += kernel(xi, monitoring[static_cast<std::size_t>(j)]) - theta;
    }
    column[static_cast<std::size_t>(j)] = inner / m;
  }
  // sum over monitoring indices l+1..k
  auto window = [&](long l) {
    double total = 0.0;
    for (long j = l; j < k; ++j) total += column[static_cast<std::size_t>(j)];
    return total;
  };

  switch (scheme) {
    case Scheme::Cusum:
      return std::abs(window(0));
    case Scheme::MMosum:
      return std::abs(window(mmosum_lag(k, cfg.mmosum_b)));
    case Scheme::PageCusum: {
      double best = 0.0;
      for (long l = 0; l <= k; ++l) best = std::max(best, std::abs(window(l)));
      return best;
    }
  }
  return 0.0;
}

}  // namespace seqcp
