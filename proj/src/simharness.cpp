#include "seqcp/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqcp/error.hpp"
#include "seqcp/parallel.hpp"

namespace seqcp {

bool Scenario::is_null() const noexcept {
  return std::isinf(beta) || d == 0.0;
}

std::optional<long> Scenario::change_time() const {
  if (std::isinf(beta)) return std::nullopt;
  // Small epsilon keeps exact powers (e.g. 100^1) from flooring down.
  return static_cast<long>(
      std::floor(std::pow(static_cast<double>(m), beta) + 1e-9));
}

long default_horizon(long m, std::optional<long> change_time) {
  if (!change_time) return 10 * m;
  return std::max(10 * m, 2 * *change_time + 10 * m);
}

long Scenario::effective_horizon() const {
  return horizon > 0 ? horizon : default_horizon(m, change_time());
}

long Scenario::effective_burn_in() const {
  return burn_in > 0 ? burn_in : default_burn_in(m);
}

WeightConfig Scenario::weight_config() const {
  WeightConfig cfg;
  cfg.gamma = gamma;
  cfg.mmosum_b = b;
  cfg.burn_in = effective_burn_in();
  cfg.normalization = Normalization::Homoscedastic;
  return cfg;
}

LimitFunctionalSpec Scenario::limit_spec() const {
  return LimitFunctionalSpec::desk(scheme, gamma, b);
}

void Scenario::validate() const {
  if (m < 2) throw usage_error("scenario needs m >= 2");
  if (replications < 1) throw usage_error("scenario needs replications >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw usage_error("alpha must lie in (0,1)");
  if (!std::isfinite(d)) throw usage_error("change height must be finite");
  weight_config().validate();
  const long h = effective_horizon();
  if (h <= effective_burn_in()) {
    throw usage_error("horizon must exceed the burn-in");
  }
  if (auto ks = change_time(); ks && h <= *ks) {
    throw usage_error("horizon " + std::to_string(h) +
                      " does not reach past the change at k* = " +
                      std::to_string(*ks));
  }
}

std::pair<std::vector<double>, std::vector<double>> generate_stream(
    const Scenario& sc, long replication_index) {
  Rng rng = make_stream(sc.seed, StreamDomain::Scenario,
                        static_cast<std::uint64_t>(replication_index));
  std::vector<double> historic(static_cast<std::size_t>(sc.m));
  for (auto& x : historic) x = draw(sc.dist, rng);
  const long horizon = sc.effective_horizon();
  const auto ks = sc.change_time();
  std::vector<double> monitoring(static_cast<std::size_t>(horizon));
  for (long j = 0; j < horizon; ++j) {
    double x = draw(sc.dist, rng);
    // 0-based index j is monitoring time j + 1; shifted when j + 1 > k*.
    if (ks && j + 1 > *ks) x += sc.d;
    monitoring[static_cast<std::size_t>(j)] = x;
  }
  return {std::move(historic), std::move(monitoring)};
}

DelaySummary summarize_delays(std::vector<long> delays) {
  DelaySummary out;
  out.count = static_cast<long>(delays.size());
  if (delays.empty()) return out;
  std::sort(delays.begin(), delays.end());
  out.mean = std::accumulate(delays.begin(), delays.end(), 0.0) /
             static_cast<double>(delays.size());
  auto q = [&](double p) {
    const auto idx = static_cast<std::size_t>(
        std::floor(p * static_cast<double>(delays.size() - 1)));
    return static_cast<double>(delays[idx]);
  };
  out.q05 = q(0.05);
  out.q25 = q(0.25);
  out.q50 = q(0.50);
  out.q75 = q(0.75);
  out.q95 = q(0.95);
  for (long dly : delays) ++out.histogram[dly];
  return out;
}

namespace {

// Monitors one stream; returns the stopping time (0 if none) when
// `record_sup` is false, else runs the full horizon and reports the
// supremum of the normalized statistic through `sup`.
long monitor_stream(const Scenario& sc, std::span<const double> historic,
                    std::span<const double> monitoring, double c_alpha,
                    double* sup) {
  auto [summary, state] = init_monitor(historic, sc.kernel, sc.scheme,
                                       sc.weight_config(), c_alpha);
  double best = 0.0;
  for (double x : monitoring) {
    const Decision d = step(summary, state, x);
    best = std::max(best, state.last.stat);
    if (std::holds_alternative<Reject>(d) && sup == nullptr) {
      return std::get<Reject>(d).k;
    }
  }
  if (sup != nullptr) *sup = best;
  return state.stopped_at.value_or(0);
}

}  // namespace

SimulationReport run_experiment(const Scenario& sc,
                                const CriticalValueTable& table,
                                const RunOptions& opts) {
  const auto want = sc.limit_spec().canonical();
  const auto have = table.spec.canonical();
  if (want.scheme != have.scheme || want.gamma != have.gamma ||
      want.b != have.b || have.normalization != Normalization::Homoscedastic) {
    throw usage_error(
        "critical-value table does not match the scenario (scheme " +
        std::string(to_string(sc.scheme)) +
        "); generate matching values with `seqcp critvals`");
  }
  return run_experiment(sc, critical_value(table, sc.alpha), opts);
}

SimulationReport run_experiment(const Scenario& sc, double c_alpha,
                                const RunOptions& opts) {
  sc.validate();
  const auto n = static_cast<std::size_t>(sc.replications);
  std::vector<long> stops(n, 0);
  parallel_for(n, opts.threads, [&](std::size_t i) {
    const auto [historic, monitoring] =
        generate_stream(sc, static_cast<long>(i));
    stops[i] = monitor_stream(sc, historic, monitoring, c_alpha, nullptr);
  });

  SimulationReport rep;
  rep.scenario = sc;
  rep.used_c_alpha = c_alpha;
  rep.horizon = sc.effective_horizon();
  const auto ks = sc.change_time();
  std::vector<long> delays;
  for (long tau : stops) {
    if (tau == 0) continue;
    ++rep.rejections;
    if (ks && !sc.is_null()) {
      if (tau > *ks) {
        delays.push_back(tau - *ks);
      } else {
        ++rep.pre_change_alarms;
      }
    }
  }
  const double r = static_cast<double>(sc.replications);
  rep.rejection_rate = static_cast<double>(rep.rejections) / r;
  rep.false_alarm_rate_pre_change =
      static_cast<double>(rep.pre_change_alarms) / r;
  rep.delays = summarize_delays(std::move(delays));
  rep.stopping_times = std::move(stops);
  return rep;
}

std::vector<double> null_suprema(const Scenario& h0, const RunOptions& opts) {
  h0.validate();
  Scenario cal = h0;
  cal.d = 0.0;
  const auto n = static_cast<std::size_t>(cal.replications);
  std::vector<double> sups(n, 0.0);
  // Calibration draws come from a separate stream domain so the calibrated
  // threshold is independent of the batch it is later applied to.
  const std::uint64_t cal_seed =
      splitmix64(cal.seed ^ static_cast<std::uint64_t>(StreamDomain::Calibration));
  cal.seed = cal_seed;
  parallel_for(n, opts.threads, [&](std::size_t i) {
    const auto [historic, monitoring] =
        generate_stream(cal, static_cast<long>(i));
    double sup = 0.0;
    monitor_stream(cal, historic, monitoring,
                   std::numeric_limits<double>::infinity(), &sup);
    sups[i] = sup;
  });
  return sups;
}

SimulationReport size_corrected_power(const Scenario& h0, const Scenario& h1,
                                      const RunOptions& opts) {
  if (h0.m != h1.m || h0.dist != h1.dist ||
      h0.kernel.kind() != h1.kernel.kind() || h0.scheme != h1.scheme ||
      h0.gamma != h1.gamma || h0.b != h1.b || h0.alpha != h1.alpha) {
    throw usage_error(
        "size correction needs null and alternative scenarios that differ "
        "only in the change");
  }
  // Calibrate over the same monitoring horizon the alternative uses.
  Scenario null_cell = h0;
  if (null_cell.horizon == 0) null_cell.horizon = h1.effective_horizon();
  if (null_cell.effective_horizon() != h1.effective_horizon()) {
    throw usage_error("null and alternative horizons differ");
  }
  auto sups = null_suprema(null_cell, opts);
  std::sort(sups.begin(), sups.end());
  const double c = upper_quantile(sups, h0.alpha);
  auto rep = run_experiment(h1, c, opts);
  rep.size_corrected = true;
  return rep;
}

}  // namespace seqcp
