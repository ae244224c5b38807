#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "seqcp/critvals.hpp"
#include "seqcp/distributions.hpp"
#include "seqcp/kernels.hpp"
#include "seqcp/monitor.hpp"

namespace seqcp {

/// One cell of the simulation grid: X_i = Y_i + d 1{i > m + k*}.
struct Scenario {
  long m = 100;
  Distribution dist = Distribution::StdNormal;
  double d = 0.5;
  /// k* = floor(m^beta); infinity encodes the null hypothesis.
  double beta = std::numeric_limits<double>::infinity();
  /// Number of monitored observations; 0 selects default_horizon().
  long horizon = 0;
  KernelSpec kernel{KernelKind::Dom};
  Scheme scheme = Scheme::Cusum;
  double gamma = 0.0;
  double b = 0.4;
  double alpha = 0.05;
  /// 0 selects ceil(sqrt(m)).
  long burn_in = 0;
  long replications = 2000;
  std::uint64_t seed = 1;

  bool is_null() const noexcept;
  /// floor(m^beta), or nullopt under the null hypothesis.
  std::optional<long> change_time() const;
  long effective_horizon() const;
  long effective_burn_in() const;
  WeightConfig weight_config() const;
  LimitFunctionalSpec limit_spec() const;

  /// Throws unless horizon > burn_in and (under a change) horizon > k*.
  void validate() const;
};

/// 10 m for null experiments, max(10 m, 2 k* + 10 m) under a change.
long default_horizon(long m, std::optional<long> change_time);

struct DelaySummary {
  long count = 0;
  double mean = 0.0;
  /// 5/25/50/75/95% quantiles (lower order statistic); zero when count = 0.
  double q05 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q95 = 0.0;
  /// Unit-width histogram: delay -> number of replications.
  std::map<long, long> histogram;
};

DelaySummary summarize_delays(std::vector<long> delays);

struct SimulationReport {
  Scenario scenario;
  long rejections = 0;
  double rejection_rate = 0.0;
  DelaySummary delays;
  long pre_change_alarms = 0;
  double false_alarm_rate_pre_change = 0.0;
  double used_c_alpha = 0.0;
  bool size_corrected = false;
  long horizon = 0;
  /// Stopping time per replication (0 when no alarm within the horizon).
  std::vector<long> stopping_times;
};

struct RunOptions {
  unsigned threads = 0;
};

/// Historic sample (m draws) followed by `horizon` monitoring draws, the
/// latter shifted by d from monitoring index k* + 1 on (1-based).
std::pair<std::vector<double>, std::vector<double>> generate_stream(
    const Scenario& scenario, long replication_index);

/// Runs every replication against the table's c_alpha. Throws when the
/// table was built for a different scheme/gamma/b.
SimulationReport run_experiment(const Scenario& scenario,
                                const CriticalValueTable& table,
                                const RunOptions& opts = {});

SimulationReport run_experiment(const Scenario& scenario, double c_alpha,
                                const RunOptions& opts = {});

/// sup_k of the normalized statistic over the horizon, one value per
/// replication, on the calibration stream (independent of run_experiment's).
std::vector<double> null_suprema(const Scenario& h0, const RunOptions& opts = {});

/// Calibrates c as the empirical (1 - alpha) quantile of null_suprema(h0)
/// and evaluates the alternative at that threshold.
SimulationReport size_corrected_power(const Scenario& h0, const Scenario& h1,
                                      const RunOptions& opts = {});

}  // namespace seqcp
