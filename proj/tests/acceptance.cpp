// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "seqcp/analysis.hpp"
#include "seqcp/critvals.hpp"
#include "seqcp/distributions.hpp"
#include "seqcp/kernels.hpp"
#include "seqcp/monitor.hpp"
#include "seqcp/random.hpp"
#include "seqcp/report_io.hpp"
#include "seqcp/series_io.hpp"
#include "seqcp/simharness.hpp"
#include "seqcp/weights.hpp"

using namespace seqcp;

namespace {

constexpr std::array<KernelKind, 3> kAllKernels{KernelKind::Dom, KernelKind::Wilcoxon,
                                                 KernelKind::SymmetricSum};

struct SchemeRow {
  Scheme scheme;
  double b;
  std::string label;
};

const std::vector<SchemeRow> kSchemeRows{{Scheme::Cusum, 0.4, "CUSUM"},
                                         {Scheme::PageCusum, 0.4, "Page"},
                                         {Scheme::MMosum, 0.1, "mMOSUM b=0.1"},
                                         {Scheme::MMosum, 0.4, "mMOSUM b=0.4"},
                                         {Scheme::MMosum, 0.9, "mMOSUM b=0.9"}};

class Check {
 public:
  explicit Check(std::string name) : name_(std::move(name)) {}

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      ok_ = false;
      std::printf("    failed: %s\n", what.c_str());
    }
  }
  void note(const std::string& what) { std::printf("    %s\n", what.c_str()); }
  bool ok() const { return ok_; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  bool ok_ = true;
};

std::string fmt(const char* f, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::vector<double> sample(Rng& rng, std::size_t n, bool heavy) {
  std::vector<double> out(n);
  for (auto& v : out) {
    v = draw(heavy ? Distribution::StdT3 : Distribution::StdNormal, rng);
    if (rng() % 11 == 0) v = std::round(v * 2.0) / 2.0;
  }
  return out;
}

const CriticalValueCache& cache() {
  static const CriticalValueCache c(default_cache_dir(), true, 0);
  return c;
}

// 95% quantile of sup_{[0,1]}|W| from the alternating series
// P(sup|W| <= x) = (4/pi) sum_k (-1)^k/(2k+1) exp(-(2k+1)^2 pi^2 / (8 x^2)).
double sup_abs_brownian_quantile(double p) {
  const auto cdf = [](double x) {
    double s = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double j = 2.0 * k + 1.0;
      s += (k % 2 == 0 ? 1.0 : -1.0) / j *
           std::exp(-j * j * std::numbers::pi * std::numbers::pi / (8.0 * x * x));
    }
    return 4.0 / std::numbers::pi * s;
  };
  double lo = 0.5, hi = 6.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Scenario scenario(Distribution dist, KernelKind kernel, const SchemeRow& row, double gamma,
                  double d, double beta) {
  Scenario sc;
  sc.m = 100;
  sc.dist = dist;
  sc.kernel = KernelSpec(kernel);
  sc.scheme = row.scheme;
  sc.b = row.b;
  sc.gamma = gamma;
  sc.d = d;
  sc.beta = beta;
  sc.replications = 2000;
  sc.seed = 20240601;
  return sc;
}

double empirical_size(Distribution dist, KernelKind kernel, const SchemeRow& row,
                      double gamma) {
  const auto sc = scenario(dist, kernel, row, gamma, 0.0, INFINITY);
  return 100.0 * run_experiment(sc, cache().get(sc.limit_spec())).rejection_rate;
}

double corrected_power(Distribution dist, KernelKind kernel, const SchemeRow& row,
                       double gamma, double beta, long replications = 2000) {
  auto h1 = scenario(dist, kernel, row, gamma, 0.5, beta);
  h1.replications = replications;
  auto h0 = h1;
  h0.d = 0.0;
  h0.beta = INFINITY;
  return 100.0 * size_corrected_power(h0, h1).rejection_rate;
}

// 1. Streaming statistics equal their O(mk) definitions.
void criterion_oracle_equivalence(Check& c) {
  Rng rng(7001);
  double worst = 0.0;
  long comparisons = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const auto m = static_cast<std::size_t>(2 + rng() % 49);
    const auto n = static_cast<std::size_t>(1 + rng() % 200);
    const bool heavy = inst % 2 == 1;
    const auto h = sample(rng, m, heavy);
    const auto mon = sample(rng, n, heavy);
    WeightConfig cfg;
    cfg.mmosum_b = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
    const long stride = 1 + static_cast<long>(n / 40);
    for (auto kind : kAllKernels) {
      const KernelSpec kernel(kind);
      for (auto scheme : {Scheme::Cusum, Scheme::MMosum, Scheme::PageCusum}) {
        auto [s, st] = init_monitor(h, kernel, scheme, cfg, 1e300);
        for (std::size_t j = 0; j < n; ++j) {
          step(s, st, mon[j]);
          const long k = static_cast<long>(j + 1);
          if (scheme == Scheme::Cusum) {
            worst = std::max(worst, std::abs(st.gamma_now - brute_gamma(h, mon, kernel, k)));
            ++comparisons;
          }
          if (k % stride == 0 || j + 1 == n) {
            worst = std::max(worst,
                             std::abs(st.last.psi - brute_psi(h, mon, kernel, scheme, cfg, k)));
            ++comparisons;
          }
        }
      }
    }
  }
  c.note(fmt("%.0f comparisons, max abs diff %.3g", static_cast<double>(comparisons), worst));
  c.expect(worst <= 1e-10, "max abs diff exceeds 1e-10");
}

// 2. Hoeffding identity and centering of h1, h2.
void criterion_hoeffding(Check& c) {
  for (auto dist : {Distribution::StdNormal, Distribution::StdT3}) {
    const auto ref = ReferenceDistribution::analytic(dist);
    for (auto kind : kAllKernels) {
      const KernelSpec kernel(kind);
      const auto hc = hoeffding_components(kernel, ref);
      Rng rng(make_stream(42, StreamDomain::Calibration,
                          static_cast<std::uint64_t>(kind) * 2 + static_cast<int>(dist)));
      double worst = 0.0;
      for (int i = 0; i < 10000; ++i) {
        const double x = draw(dist, rng);
        const double y = draw(dist, rng);
        worst = std::max(worst,
                         std::abs(kernel(x, y) - (hc.theta + hc.h1(x) + hc.h2(y) + hc.r(x, y))));
      }
      const std::string tag =
          std::string(to_string(kind)) + "/" + std::string(to_string(dist));
      c.expect(worst <= 1e-12, tag + fmt(": identity residual %.3g", worst));

      const int n = 100000;
      double s1 = 0, ss1 = 0, s2 = 0, ss2 = 0;
      for (int i = 0; i < n; ++i) {
        const double a = hc.h1(draw(dist, rng));
        const double b = hc.h2(draw(dist, rng));
        s1 += a;
        ss1 += a * a;
        s2 += b;
        ss2 += b * b;
      }
      const double m1 = s1 / n, m2 = s2 / n;
      const double se1 = std::sqrt((ss1 / n - m1 * m1) / n);
      const double se2 = std::sqrt((ss2 / n - m2 * m2) / n);
      c.note(tag + fmt(": mean h1 = %.2f SE", m1 / se1) + fmt(", mean h2 = %.2f SE", m2 / se2));
      c.expect(std::abs(m1) <= 4 * se1 && std::abs(m2) <= 4 * se2, tag + ": centering");
    }
  }
}

// 3. Simulated limit quantile against the closed-form sup|W| distribution.
void criterion_limit_distribution(Check& c) {
  const double oracle = sup_abs_brownian_quantile(0.95);
  c.note(fmt("oracle q95 of sup|W| = %.6f", oracle));
  LimitFunctionalSpec spec = LimitFunctionalSpec::desk(Scheme::Cusum, 0.0, 0.4);
  const double desk = critical_value(cache().get(spec), 0.05);
  c.note(fmt("desk (N=2000, R=5000): %.4f, diff %.4f", desk, desk - oracle));
  c.expect(std::abs(desk - oracle) <= 0.06, "desk quantile outside +-0.06");
  spec = LimitFunctionalSpec::full(Scheme::Cusum, 0.0, 0.4);
  const double full = critical_value(cache().get(spec), 0.05);
  c.note(fmt("full (N=10000, R=50000): %.4f, diff %.4f", full, full - oracle));
  c.expect(std::abs(full - oracle) <= 0.02, "full quantile outside +-0.02");
}

// 4. Empirical size against reference values.
void criterion_size(Check& c) {
  const SchemeRow& cusum = kSchemeRows[0];
  const double dom = empirical_size(Distribution::StdNormal, KernelKind::Dom, cusum, 0.0);
  c.note(fmt("Normal DOM CUSUM g=0: %.2f%% (reference 4.70)", dom));
  c.expect(std::abs(dom - 4.70) <= 2.0, "Normal DOM CUSUM size");
  const double wil = empirical_size(Distribution::StdNormal, KernelKind::Wilcoxon, cusum, 0.0);
  c.note(fmt("Normal Wilcoxon CUSUM g=0: %.2f%% (reference 4.26)", wil));
  c.expect(std::abs(wil - 4.26) <= 2.0, "Normal Wilcoxon CUSUM size");
  const double over =
      empirical_size(Distribution::StdT3, KernelKind::Dom, kSchemeRows[4], 0.0);
  c.note(fmt("t3 DOM mMOSUM b=0.9 g=0: %.2f%% (reference 29.26)", over));
  c.expect(over > 15.0, "t3 DOM mMOSUM b=0.9 not oversized");
  for (const auto& row : kSchemeRows) {
    for (double gamma : {0.0, 0.25, 0.45}) {
      const double s = empirical_size(Distribution::StdT3, KernelKind::Wilcoxon, row, gamma);
      c.note("t3 Wilcoxon " + row.label + fmt(" g=%.2f: %.2f%%", gamma, s));
      c.expect(s <= 7.0, "t3 Wilcoxon " + row.label + fmt(" g=%.2f above 7%%", gamma));
    }
  }
}

// 5. Size-corrected power against reference values.
void criterion_power(Check& c) {
  const SchemeRow& cusum = kSchemeRows[0];
  const double early = corrected_power(Distribution::StdNormal, KernelKind::Dom, cusum, 0.0, 0.25);
  c.note(fmt("Normal DOM CUSUM g=0 beta=0.25: %.2f%% (reference 99.75)", early));
  c.expect(early >= 98.5, "early-change power below 98.5%");
  const double late = corrected_power(Distribution::StdNormal, KernelKind::Dom, cusum, 0.0, 1.4);
  c.note(fmt("Normal DOM CUSUM g=0 beta=1.4: %.2f%% (reference 87.74)", late));
  c.expect(std::abs(late - 87.74) <= 4.0, "late-change power outside 87.74 +- 4");
  for (double beta : {0.25, 1.0, 1.4}) {
    for (const auto& row : kSchemeRows) {
      const double dom = corrected_power(Distribution::StdT3, KernelKind::Dom, row, 0.0, beta);
      const double wil =
          corrected_power(Distribution::StdT3, KernelKind::Wilcoxon, row, 0.0, beta);
      c.note("t3 " + row.label + fmt(" beta=%.2f: Wilcoxon %.2f%%", beta, wil) +
             fmt(" vs DOM %.2f%%", dom));
      c.expect(wil >= dom, "t3 " + row.label + fmt(" beta=%.2f: Wilcoxon below DOM", beta));
      if (row.scheme == Scheme::Cusum && beta == 1.4) {
        c.expect(wil >= 97.0 && wil > dom, "t3 CUSUM beta=1.4 Wilcoxon >= 97% and > DOM");
      }
    }
  }
}

// 6. gamma = 0 beats gamma = 0.45 for late changes. Run at
// 10 000 replications: the smallest reference margin is 5.7 pp, so MC error
// at 2 000 replications (about 0.5 pp per cell) decides the outcome.
void criterion_gamma_ordering(Check& c) {
  for (auto kind : {KernelKind::Dom, KernelKind::Wilcoxon}) {
    for (const auto& row : kSchemeRows) {
      const double p0 = corrected_power(Distribution::StdNormal, kind, row, 0.0, 1.4, 10000);
      const double p45 =
          corrected_power(Distribution::StdNormal, kind, row, 0.45, 1.4, 10000);
      const std::string tag = std::string(to_string(kind)) + " " + row.label;
      c.note(tag + fmt(": g=0 %.2f%%, g=0.45 %.2f%%", p0, p45));
      c.expect(p0 - p45 >= 5.0, tag + ": margin below 5 pp");
    }
  }
}

// 7. Structural properties.
void criterion_properties(Check& c) {
  Rng rng(9090);
  bool page_dominates = true, rank_invariant = true, shift_invariant = true;
  for (int inst = 0; inst < 100; ++inst) {
    const auto m = static_cast<std::size_t>(5 + rng() % 60);
    const auto n = static_cast<std::size_t>(20 + rng() % 300);
    const auto h = sample(rng, m, inst % 2 == 0);
    const auto mon = sample(rng, n, inst % 2 == 0);
    WeightConfig cfg;
    cfg.mmosum_b = 0.1 + 0.8 * static_cast<double>(rng() % 100) / 100.0;
    for (auto kind : kAllKernels) {
      auto [s1, c1] = init_monitor(h, KernelSpec(kind), Scheme::Cusum, cfg, 1e300);
      auto [s2, c2] = init_monitor(h, KernelSpec(kind), Scheme::MMosum, cfg, 1e300);
      auto [s3, c3] = init_monitor(h, KernelSpec(kind), Scheme::PageCusum, cfg, 1e300);
      for (double x : mon) {
        step(s1, c1, x);
        step(s2, c2, x);
        step(s3, c3, x);
        const double slack = 1e-12 * (1.0 + c3.last.psi);
        if (c3.last.psi + slack < c1.last.psi || c3.last.psi + slack < c2.last.psi) {
          page_dominates = false;
        }
      }
    }
    const double shift = 3.7 * draw(Distribution::StdNormal, rng);
    std::vector<double> hw, mw, hs, ms;
    for (double x : h) {
      hw.push_back(std::atan(x) * 5.0 - 1.0);
      hs.push_back(x + shift);
    }
    for (double x : mon) {
      mw.push_back(std::atan(x) * 5.0 - 1.0);
      ms.push_back(x + shift);
    }
    for (auto scheme : {Scheme::Cusum, Scheme::MMosum, Scheme::PageCusum}) {
      auto [a, sa] = init_monitor(h, KernelSpec::wilcoxon(), scheme, cfg, 1e300);
      auto [b, sb] = init_monitor(hw, KernelSpec::wilcoxon(), scheme, cfg, 1e300);
      auto [d1, sd1] = init_monitor(h, KernelSpec::dom(), scheme, cfg, 1e300);
      auto [d2, sd2] = init_monitor(hs, KernelSpec::dom(), scheme, cfg, 1e300);
      for (std::size_t j = 0; j < n; ++j) {
        step(a, sa, mon[j]);
        step(b, sb, mw[j]);
        step(d1, sd1, mon[j]);
        step(d2, sd2, ms[j]);
        if (sa.last.psi != sb.last.psi) rank_invariant = false;
        if (std::abs(sd1.last.stat - sd2.last.stat) > 1e-9 * (1.0 + sd1.last.stat)) {
          shift_invariant = false;
        }
      }
    }
  }
  c.expect(page_dominates, "Page statistic below |CUSUM| or |mMOSUM|");
  c.expect(shift_invariant, "DOM statistic changed under a location shift");
  c.expect(rank_invariant, "Wilcoxon statistic changed under a monotone transform");

  const auto fixture = synthetic_temperature_series({}, 31);
  std::vector<double> values = values_of(fixture), transformed;
  for (double v : values) transformed.push_back(std::exp(0.4 * v) - 2.0);
  AnalysisConfig acfg;
  acfg.kernels = {KernelKind::Wilcoxon};
  const auto lookup = cached_critical_values(cache(), 2000, 5000, kDefaultCriticalValueSeed);
  const auto ra = analyze(values, acfg, lookup);
  const auto rb = analyze(transformed, acfg, lookup);
  bool same_stops = true;
  for (std::size_t i = 0; i < ra.runs.size(); ++i) {
    same_stops = same_stops && ra.runs[i].stopping_time == rb.runs[i].stopping_time;
  }
  c.expect(same_stops, "analyze Wilcoxon stopping times changed under monotone transform");

  bool rho_ok = true;
  for (double gamma : {0.0, 0.1, 0.25, 0.45, 0.49}) {
    double prev = INFINITY;
    for (double t = 1e-4; t < 1e4; t *= 1.1) {
      const double r = rho(gamma, t);
      rho_ok = rho_ok && r < prev;
      prev = r;
    }
    rho_ok = rho_ok && std::abs(rho(gamma, 1e-9) * std::pow(1e-9, gamma) - 1.0) < 1e-6;
    rho_ok = rho_ok && std::abs(rho(gamma, 1e9) * 1e9 - 1.0) < 1e-6;
  }
  c.expect(rho_ok, "rho not strictly decreasing or wrong limits");

  bool cv_monotone = true;
  for (const auto& row : kSchemeRows) {
    double prev_gamma_cv = 0.0;
    for (double gamma : {0.0, 0.25, 0.45}) {
      const auto table = cache().get(LimitFunctionalSpec::desk(row.scheme, gamma, row.b));
      double prev = INFINITY;
      for (int i = 1; i <= 999; ++i) {
        const double cv = critical_value(table, i / 1000.0);
        cv_monotone = cv_monotone && cv <= prev;
        prev = cv;
      }
      const double cv05 = critical_value(table, 0.05);
      cv_monotone = cv_monotone && cv05 >= prev_gamma_cv;
      prev_gamma_cv = cv05;
    }
  }
  c.expect(cv_monotone, "critical values not monotone in alpha and gamma");

  LimitFunctionalSpec spec = LimitFunctionalSpec::desk(Scheme::PageCusum, 0.25, 0.4);
  spec.replications = 1000;
  std::ostringstream t1, t4;
  write_table(t1, simulate_limit(spec, 1));
  write_table(t4, simulate_limit(spec, 4));
  c.expect(t1.str() == t4.str(), "critvals output depends on thread count");

  Scenario sc = scenario(Distribution::StdT3, KernelKind::Wilcoxon, kSchemeRows[3], 0.25, 0.5, 1.0);
  sc.replications = 300;
  const auto table = cache().get(sc.limit_spec());
  std::ostringstream r1, r3;
  const auto rep1 = run_experiment(sc, table, RunOptions{1});
  const auto rep3 = run_experiment(sc, table, RunOptions{3});
  write_report_row(r1, 1, rep1);
  write_report_row(r3, 1, rep3);
  c.expect(r1.str() == r3.str() && rep1.stopping_times == rep3.stopping_times,
           "simulate output depends on thread count");
}

// 8. Data pipeline on monthly series.
void criterion_pipeline(Check& c) {
  const double profile[12] = {-0.5, 0.25, 3, 7.5, 12, 15, 17.25, 16.5, 13, 8, 3.5, 0.75};
  std::vector<SeriesRecord> periodic;
  for (int i = 0; i < 240; ++i) {
    periodic.push_back({{1900 + i / 12, i % 12 + 1}, profile[i % 12]});
  }
  bool exact = true;
  for (const auto& r : deseasonalize(std::span(periodic).first(120), 120)) {
    exact = exact && r.value == 0.0;
  }
  c.expect(exact, "periodic historic window not removed exactly");

  const auto series = synthetic_temperature_series({}, 77);
  const auto base = deseasonalize(std::span(series).first(300), 120);
  const auto longer = deseasonalize(series, 120);
  bool no_look_ahead = true;
  for (std::size_t i = 0; i < base.size(); ++i) {
    no_look_ahead = no_look_ahead && base[i].value == longer[i].value;
  }
  c.expect(no_look_ahead, "future records changed earlier adjustments");

  const auto lookup = cached_critical_values(cache(), 2000, 5000, kDefaultCriticalValueSeed);
  const auto fixture =
      load_csv(std::filesystem::path(SEQCP_DATA_DIR) / "synthetic_temperature.csv",
               "temperature");
  const auto out = analyze(values_of(deseasonalize(fixture, 120)), AnalysisConfig{}, lookup);
  for (const auto& run : out.runs) {
    const std::string tag =
        std::string(to_string(run.kernel)) + "/" + std::string(to_string(run.scheme));
    std::string where = "none";
    if (run.stopping_time) {
      where = std::to_string(*run.stopping_time) +
              (*run.stopping_time > 200 ? " (after the shift at k=200)"
                                        : " (before the shift at k=200)");
    }
    c.note("fixture " + tag + ": stop at k=" + where);
    c.expect(run.stopping_time.has_value(), "fixture " + tag + " never stopped");
  }

  AnalysisConfig cfg;
  cfg.schemes = {Scheme::Cusum, Scheme::MMosum};
  std::vector<long> stops[2][2];
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto s = synthetic_temperature_series({}, seed);
    const auto res = analyze(values_of(deseasonalize(s, 120)), cfg, lookup);
    for (const auto& run : res.runs) {
      const int ki = run.kernel == KernelKind::Dom ? 0 : 1;
      const int si = run.scheme == Scheme::Cusum ? 0 : 1;
      stops[ki][si].push_back(run.stopping_time.value_or(1L << 40));
    }
  }
  for (int ki = 0; ki < 2; ++ki) {
    long med[2];
    for (int si = 0; si < 2; ++si) {
      auto v = stops[ki][si];
      std::nth_element(v.begin(), v.begin() + 100, v.end());
      med[si] = v[100];
    }
    const std::string kernel = ki == 0 ? "dom" : "wilcoxon";
    c.note(kernel + fmt(": median stop mMOSUM %.0f vs CUSUM %.0f",
                        static_cast<double>(med[1]), static_cast<double>(med[0])));
    c.expect(med[1] <= med[0], kernel + ": mMOSUM median later than CUSUM");
  }
}

}  // namespace

int main() {
  struct Item {
    const char* name;
    std::function<void(Check&)> body;
    double time_limit_s;
  };
  const std::vector<Item> items{
      {"1 oracle equivalence (streaming vs brute force)", criterion_oracle_equivalence, 10.0},
      {"2 Hoeffding identity and centering", criterion_hoeffding, 10.0},
      {"3 limit distribution vs sup|W| oracle", criterion_limit_distribution, 0.0},
      {"4 empirical size (desk scale)", criterion_size, 0.0},
      {"5 size-corrected power (desk scale)", criterion_power, 0.0},
      {"6 gamma ordering for late changes", criterion_gamma_ordering, 0.0},
      {"7 property suite", criterion_properties, 0.0},
      {"8 monthly series pipeline", criterion_pipeline, 0.0},
  };
  int failures = 0;
  std::vector<std::string> summary;
  for (const auto& item : items) {
    std::printf("criterion %s\n", item.name);
    std::fflush(stdout);
    Check c(item.name);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      item.body(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (item.time_limit_s > 0) {
      c.expect(secs < item.time_limit_s, fmt("runtime %.1f s over limit %.0f s", secs,
                                             item.time_limit_s));
    }
    char line[256];
    std::snprintf(line, sizeof line, "%s criterion %s (%.1f s)", c.ok() ? "PASS" : "FAIL",
                  item.name, secs);
    std::printf("%s\n", line);
    std::fflush(stdout);
    summary.emplace_back(line);
    if (!c.ok()) ++failures;
  }
  std::printf("\nsummary\n");
  for (const auto& s : summary) std::printf("%s\n", s.c_str());
  return failures == 0 ? 0 : 1;
}
