#include "seqcp/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>

#include "seqcp/error.hpp"

namespace seqcp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double to_real(const std::string& v) {
  if (v == "inf" || v == "none" || v == "h0") {
    return std::numeric_limits<double>::infinity();
  }
  std::size_t used = 0;
  const double x = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return x;
}

long to_long(const std::string& v) {
  std::size_t used = 0;
  const long x = std::stol(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return x;
}

std::uint64_t to_u64(const std::string& v) {
  std::size_t used = 0;
  const auto x = std::stoull(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument(v);
}

using Setter = std::function<void(ScenarioCell&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"m", [](ScenarioCell& c, const std::string& v) { c.scenario.m = to_long(v); }},
      {"dist", [](ScenarioCell& c, const std::string& v) { c.scenario.dist = parse_distribution(v); }},
      {"d", [](ScenarioCell& c, const std::string& v) { c.scenario.d = to_real(v); }},
      {"beta", [](ScenarioCell& c, const std::string& v) { c.scenario.beta = to_real(v); }},
      {"horizon", [](ScenarioCell& c, const std::string& v) { c.scenario.horizon = to_long(v); }},
      {"kernel", [](ScenarioCell& c, const std::string& v) { c.scenario.kernel = KernelSpec(parse_kernel(v)); }},
      {"scheme", [](ScenarioCell& c, const std::string& v) { c.scenario.scheme = parse_scheme(v); }},
      {"gamma", [](ScenarioCell& c, const std::string& v) { c.scenario.gamma = to_real(v); }},
      {"b", [](ScenarioCell& c, const std::string& v) { c.scenario.b = to_real(v); }},
      {"alpha", [](ScenarioCell& c, const std::string& v) { c.scenario.alpha = to_real(v); }},
      {"burn_in", [](ScenarioCell& c, const std::string& v) { c.scenario.burn_in = to_long(v); }},
      {"replications", [](ScenarioCell& c, const std::string& v) { c.scenario.replications = to_long(v); }},
      {"seed", [](ScenarioCell& c, const std::string& v) { c.scenario.seed = to_u64(v); }},
      {"size_corrected", [](ScenarioCell& c, const std::string& v) { c.size_corrected = to_bool(v); }},
      {"cv_grid", [](ScenarioCell& c, const std::string& v) { c.cv_grid_points = to_long(v); }},
      {"cv_reps", [](ScenarioCell& c, const std::string& v) { c.cv_replications = to_long(v); }},
      {"cv_seed", [](ScenarioCell& c, const std::string& v) { c.cv_seed = to_u64(v); }},
  };
  return table;
}

}  // namespace

std::vector<ScenarioCell> parse_scenario_config(std::istream& is,
                                                const std::string& source) {
  std::vector<ScenarioCell> cells;
  bool open = false;
  std::string raw;
  long line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      // Only a truly blank line closes a block; comment lines do not.
      if (trim(raw).empty()) open = false;
      continue;
    }
    if (line.front() == '[' && line.back() == ']') {
      cells.emplace_back();
      open = true;
      continue;
    }
    if (!open) {
      cells.emplace_back();
      open = true;
    }
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string::npos) {
      throw data_error(where + ": expected key=value, found '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw data_error(where + ": unknown key '" + key + "'");
    }
    try {
      it->second(cells.back(), value);
    } catch (const Error& e) {
      throw data_error(where + ": " + e.what());
    } catch (const std::exception&) {
      throw data_error(where + ": invalid value '" + value + "' for '" + key +
                       "'");
    }
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    try {
      cells[i].scenario.validate();
    } catch (const Error& e) {
      throw data_error(source + ": cell " + std::to_string(i + 1) + ": " +
                       e.what());
    }
  }
  return cells;
}

SimulationReport run_cell(const ScenarioCell& cell,
                          const CriticalValueCache& cache,
                          const RunOptions& opts) {
  const Scenario& sc = cell.scenario;
  if (cell.size_corrected) {
    Scenario h0 = sc;
    h0.d = 0.0;
    h0.horizon = sc.effective_horizon();
    return size_corrected_power(h0, sc, opts);
  }
  LimitFunctionalSpec spec = sc.limit_spec();
  spec.grid_points = cell.cv_grid_points;
  spec.replications = cell.cv_replications;
  spec.seed = cell.cv_seed;
  return run_experiment(sc, cache.get(spec), opts);
}

void write_report_header(std::ostream& os) {
  os << "# seqcp-report v" << kReportSchemaVersion << '\n';
  os << "cell\tm\tdist\td\tbeta\tk_star\thorizon\tkernel\tscheme\tgamma\tb\t"
        "alpha\tburn_in\treplications\tseed\tsize_corrected\tc_alpha\t"
        "rejections\trejection_rate\tpre_change_alarms\t"
        "false_alarm_rate_pre_change\tdelay_count\tdelay_mean\tdelay_q05\t"
        "delay_q25\tdelay_q50\tdelay_q75\tdelay_q95\n";
}

void write_report_row(std::ostream& os, int cell_index,
                      const SimulationReport& r) {
  const Scenario& sc = r.scenario;
  const auto ks = sc.change_time();
  os << cell_index << '\t' << sc.m << '\t' << to_string(sc.dist) << '\t'
     << fmt(sc.d) << '\t' << (std::isinf(sc.beta) ? "inf" : fmt(sc.beta))
     << '\t' << (ks ? std::to_string(*ks) : "inf") << '\t' << r.horizon << '\t'
     << to_string(sc.kernel.kind()) << '\t' << to_string(sc.scheme) << '\t'
     << fmt(sc.gamma) << '\t' << fmt(sc.b) << '\t' << fmt(sc.alpha) << '\t'
     << sc.effective_burn_in() << '\t' << sc.replications << '\t' << sc.seed
     << '\t' << (r.size_corrected ? "true" : "false") << '\t'
     << fmt(r.used_c_alpha) << '\t' << r.rejections << '\t'
     << fmt(r.rejection_rate) << '\t' << r.pre_change_alarms << '\t'
     << fmt(r.false_alarm_rate_pre_change) << '\t' << r.delays.count << '\t'
     << fmt(r.delays.mean) << '\t' << fmt(r.delays.q05) << '\t'
     << fmt(r.delays.q25) << '\t' << fmt(r.delays.q50) << '\t'
     << fmt(r.delays.q75) << '\t' << fmt(r.delays.q95) << '\n';
}

void write_delay_histogram(std::ostream& os, const SimulationReport& r) {
  os << "# seqcp-delays v" << kReportSchemaVersion << '\n';
  os << "delay\tcount\n";
  for (const auto& [delay, count] : r.delays.histogram) {
    os << delay << '\t' << count << '\n';
  }
}

}  // namespace seqcp
