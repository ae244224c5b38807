#include "seqcp/kernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "seqcp/error.hpp"

namespace seqcp {

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Dom: return "dom";
    case KernelKind::Wilcoxon: return "wilcoxon";
    case KernelKind::SymmetricSum: return "symsum";
  }
  return "?";
}

KernelKind parse_kernel(std::string_view name) {
  if (name == "dom") return KernelKind::Dom;
  if (name == "wilcoxon" || name == "wil") return KernelKind::Wilcoxon;
  if (name == "symsum" || name == "symmetric_sum") {
    return KernelKind::SymmetricSum;
  }
  throw usage_error("unknown kernel '" + std::string(name) +
                    "' (expected dom, wilcoxon or symsum)");
}

namespace {

VariancePolicy default_policy(KernelKind kind) {
  if (kind == KernelKind::Wilcoxon) return KnownConstant{1.0 / 12.0};
  return EstimateFromHistoric{};
}

}  // namespace

KernelSpec::KernelSpec(KernelKind kind)
    : kind_(kind), policy_(default_policy(kind)) {}

KernelSpec::KernelSpec(KernelKind kind, VariancePolicy policy)
    : kind_(kind), policy_(policy) {}

double KernelSpec::theta() const noexcept {
  return kind_ == KernelKind::Wilcoxon ? 0.5 : 0.0;
}

double KernelSpec::operator()(double x, double y) const noexcept {
  switch (kind_) {
    case KernelKind::Dom: return x - y;
    case KernelKind::Wilcoxon: return x < y ? 1.0 : 0.0;
    case KernelKind::SymmetricSum: return 0.5 * (x + y);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double eval_kernel(const KernelSpec& spec, double x, double y) {
  return spec(x, y);
}

double change_magnitude(const KernelSpec& spec, double d, Distribution dist) {
  if (!std::isfinite(d)) throw usage_error("change height must be finite");
  switch (spec.kind()) {
    case KernelKind::Dom:
      return -d;
    case KernelKind::SymmetricSum:
      return 0.5 * d;
    case KernelKind::Wilcoxon: {
      if (d == 0.0) return 0.0;
      const auto ref = ReferenceDistribution::analytic(dist);
      auto integrand = [&](double z) {
        return ref.pdf(z) * (ref.cdf(z + d) - ref.cdf(z));
      };
      double error = 0.0;
      const double inf = std::numeric_limits<double>::infinity();
      const double value =
          boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
              integrand, -inf, inf, 20, 1e-12, &error);
      return value;
    }
  }
  return 0.0;
}

HoeffdingComponents hoeffding_components(const KernelSpec& spec,
                                         const ReferenceDistribution& cdf) {
  const double mu = cdf.mean();
  switch (spec.kind()) {
    case KernelKind::Dom:
      return {0.0,
              [mu](double x) { return x - mu; },
              [mu](double y) { return mu - y; },
              [](double, double) { return 0.0; },
              cdf};
    case KernelKind::SymmetricSum:
      // theta is the reference mean here; 0 for the symmetric null laws.
      return {mu,
              [mu](double x) { return 0.5 * (x - mu); },
              [mu](double y) { return 0.5 * (y - mu); },
              [](double, double) { return 0.0; },
              cdf};
    case KernelKind::Wilcoxon: {
      auto h1 = [cdf](double x) { return 0.5 - cdf.cdf(x); };
      auto h2 = [cdf](double y) { return cdf.cdf(y) - 0.5; };
      auto r = [cdf](double x, double y) {
        return (x < y ? 1.0 : 0.0) + cdf.cdf(x) - cdf.cdf(y) - 0.5;
      };
      return {0.5, h1, h2, r, cdf};
    }
  }
  throw usage_error("unknown kernel kind");
}

double sample_variance(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / (n - 1.0);
}

KernelVariance kernel_variance(const KernelSpec& spec,
                               std::span<const double> historic) {
  return std::visit(
      [&](const auto& policy) -> KernelVariance {
        using P = std::decay_t<decltype(policy)>;
        if constexpr (std::is_same_v<P, KnownConstant>) {
          return {policy.value, policy.value};
        } else if constexpr (std::is_same_v<P, UserSupplied>) {
          return {policy.sigma1_sq, policy.sigma2_sq};
        } else {
          if (historic.size() < 2) {
            throw data_error("insufficient historic data");
          }
          double s2 = sample_variance(historic);
          if (spec.kind() == KernelKind::SymmetricSum) s2 *= 0.25;
          return {s2, s2};
        }
      },
      spec.variance_policy());
}

}  // namespace seqcp
