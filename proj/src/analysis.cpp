#include "seqcp/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "seqcp/error.hpp"

namespace seqcp {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

CriticalValueLookup cached_critical_values(const CriticalValueCache& cache,
                                           long grid_points, long replications,
                                           std::uint64_t seed) {
  return [cache, grid_points, replications, seed](Scheme scheme, double gamma,
                                                   double b, double alpha) {
    LimitFunctionalSpec spec;
    spec.scheme = scheme;
    spec.gamma = gamma;
    spec.b = b;
    spec.grid_points = grid_points;
    spec.replications = replications;
    spec.seed = seed;
    return critical_value(cache.get(spec), alpha);
  };
}

AnalysisOutput analyze(std::span<const double> values,
                       const AnalysisConfig& cfg,
                       const CriticalValueLookup& critical) {
  if (cfg.historic_len < 2) throw usage_error("historic window needs >= 2 values");
  if (static_cast<std::size_t>(cfg.historic_len) > values.size()) {
    throw data_error("series shorter than the historic window");
  }
  const auto historic = values.first(static_cast<std::size_t>(cfg.historic_len));
  const auto monitoring = values.subspan(static_cast<std::size_t>(cfg.historic_len));

  WeightConfig wcfg;
  wcfg.gamma = cfg.gamma;
  wcfg.mmosum_b = cfg.b;
  wcfg.burn_in = cfg.burn_in > 0 ? cfg.burn_in : default_burn_in(cfg.historic_len);
  wcfg.validate();

  AnalysisOutput out;
  for (KernelKind kind : cfg.kernels) {
    for (Scheme scheme : cfg.schemes) {
      AnalysisRun run;
      run.kernel = kind;
      run.scheme = scheme;
      run.historic_len = cfg.historic_len;
      run.c_alpha = critical(scheme, cfg.gamma, cfg.b, cfg.alpha);
      auto [summary, state] =
          init_monitor(historic, KernelSpec(kind), scheme, wcfg, run.c_alpha);
      state.trace_mode = true;
      run.trace.reserve(monitoring.size());
      for (double x : monitoring) {
        step(summary, state, x);
        const auto& t = state.last;
        run.trace.push_back(
            {t.k, t.gamma, t.psi, t.weight, t.stat / run.c_alpha});
      }
      run.stopping_time = state.stopped_at;
      out.runs.push_back(std::move(run));
    }
  }
  return out;
}

void write_trace(std::ostream& os, const AnalysisRun& run) {
  os << "# seqcp-trace v1 kernel=" << to_string(run.kernel)
     << " scheme=" << to_string(run.scheme) << " c_alpha=" << fmt(run.c_alpha)
     << " historic_len=" << run.historic_len << " stopping_k="
     << (run.stopping_time ? std::to_string(*run.stopping_time) : "none")
     << '\n';
  os << "k\tgamma_stat\tpsi\tweight\tnormalized\n";
  for (const auto& r : run.trace) {
    os << r.k << '\t' << fmt(r.gamma_stat) << '\t' << fmt(r.psi) << '\t'
       << fmt(r.weight) << '\t' << fmt(r.normalized) << '\n';
  }
}

std::vector<TraceRow> read_trace(std::istream& is, const std::string& source) {
  std::string line;
  std::vector<TraceRow> rows;
  bool saw_header = false;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line != "k\tgamma_stat\tpsi\tweight\tnormalized") {
        throw data_error(source + ": unexpected trace header");
      }
      saw_header = true;
      continue;
    }
    std::istringstream in(line);
    TraceRow r;
    std::string a, b, c, d;
    if (!(in >> r.k >> a >> b >> c >> d)) {
      throw data_error(source + ":" + std::to_string(line_no) +
                       ": malformed trace row");
    }
    r.gamma_stat = std::stod(a);
    r.psi = std::stod(b);
    r.weight = std::stod(c);
    r.normalized = std::stod(d);
    rows.push_back(r);
  }
  if (!saw_header) throw data_error(source + ": missing trace header");
  return rows;
}

void write_stopping_summary(std::ostream& os, const AnalysisOutput& out,
                            std::span<const SeriesRecord> series) {
  os << "kernel\tscheme\tc_alpha\thistoric_len\tstopping_k\tstopping_date\n";
  for (const auto& run : out.runs) {
    os << to_string(run.kernel) << '\t' << to_string(run.scheme) << '\t'
       << fmt(run.c_alpha) << '\t' << run.historic_len << '\t';
    if (run.stopping_time) {
      os << *run.stopping_time << '\t';
      const auto idx =
          static_cast<std::size_t>(run.historic_len + *run.stopping_time - 1);
      os << (idx < series.size() ? series[idx].timestamp.str() : "-");
    } else {
      os << "none\t-";
    }
    os << '\n';
  }
}

std::vector<SeriesRecord> synthetic_temperature_series(
    const SyntheticSeriesSpec& spec, std::uint64_t seed) {
  Rng rng = make_stream(seed, StreamDomain::Synthetic, 0);
  std::vector<SeriesRecord> out;
  out.reserve(static_cast<std::size_t>(spec.months));
  long idx = spec.start.index();
  for (long i = 0; i < spec.months; ++i, ++idx) {
    const YearMonth ym{static_cast<int>(idx / 12), static_cast<int>(idx % 12) + 1};
    // Coldest in January, warmest in July.
    const double season =
        9.0 - 9.0 * std::cos(2.0 * std::numbers::pi * (ym.month - 1) / 12.0);
    double v = season + spec.noise_sd * draw(spec.noise, rng);
    if (i >= spec.historic_len + spec.shift_k) {
      v += spec.shift_sds * spec.noise_sd;
    }
    out.push_back({ym, v});
  }
  return out;
}

}  // namespace seqcp
