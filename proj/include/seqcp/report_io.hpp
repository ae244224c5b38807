#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "seqcp/critvals.hpp"
#include "seqcp/simharness.hpp"

namespace seqcp {

inline constexpr int kReportSchemaVersion = 1;

/// One block of a scenario config file plus how to run it.
struct ScenarioCell {
  Scenario scenario;
  bool size_corrected = false;
  long cv_grid_points = 2000;
  long cv_replications = 5000;
  std::uint64_t cv_seed = kDefaultCriticalValueSeed;
};

/// Line-oriented key=value blocks separated by blank lines; '#' starts a
/// comment and an optional "[name]" line opens a block. Unknown keys and
/// malformed values are data errors naming the line.
std::vector<ScenarioCell> parse_scenario_config(std::istream& is,
                                                const std::string& source);

/// Executes one cell: size-corrected power against a null twin, or a plain
/// run against cached/simulated asymptotic critical values.
SimulationReport run_cell(const ScenarioCell& cell,
                          const CriticalValueCache& cache,
                          const RunOptions& opts = {});

void write_report_header(std::ostream& os);
void write_report_row(std::ostream& os, int cell_index,
                      const SimulationReport& report);
/// "delay\tcount" rows at unit bin width.
void write_delay_histogram(std::ostream& os, const SimulationReport& report);

}  // namespace seqcp
