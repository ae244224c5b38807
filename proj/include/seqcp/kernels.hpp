#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <variant>

#include "seqcp/distributions.hpp"

namespace seqcp {

enum class KernelKind { Dom, Wilcoxon, SymmetricSum };

std::string_view to_string(KernelKind kind);
KernelKind parse_kernel(std::string_view name);

/// Variance taken from the historic window (unbiased sample variance).
struct EstimateFromHistoric {};
/// sigma1^2 = sigma2^2 = value regardless of data.
struct KnownConstant {
  double value;
};
/// Caller-provided long-run variances (e.g. for dependent data).
struct UserSupplied {
  double sigma1_sq;
  double sigma2_sq;
};

using VariancePolicy =
    std::variant<EstimateFromHistoric, KnownConstant, UserSupplied>;

/// A two-sample U-statistic kernel h(x, y) with known null expectation theta.
/// Immutable; safe to share across threads.
class KernelSpec {
 public:
  /// Uses the kernel's default variance policy: Wilcoxon -> 1/12, DOM and
  /// SymmetricSum -> estimated from the historic window.
  explicit KernelSpec(KernelKind kind);
  KernelSpec(KernelKind kind, VariancePolicy policy);

  static KernelSpec dom() { return KernelSpec(KernelKind::Dom); }
  static KernelSpec wilcoxon() { return KernelSpec(KernelKind::Wilcoxon); }
  static KernelSpec symmetric_sum() {
    return KernelSpec(KernelKind::SymmetricSum);
  }

  KernelKind kind() const noexcept { return kind_; }
  double theta() const noexcept;
  const VariancePolicy& variance_policy() const noexcept { return policy_; }

  double operator()(double x, double y) const noexcept;

 private:
  KernelKind kind_;
  VariancePolicy policy_;
};

double eval_kernel(const KernelSpec& spec, double x, double y);

/// Delta = E h(Y, Y' + d) - theta for a location shift d of the given law.
/// Wilcoxon uses adaptive Gauss-Kronrod quadrature (abs. error <= 1e-8).
/// For SymmetricSum with a symmetric null law this is d / 2.
double change_magnitude(const KernelSpec& spec, double d, Distribution dist);

struct HoeffdingComponents {
  double theta;
  std::function<double(double)> h1;
  std::function<double(double)> h2;
  std::function<double(double, double)> r;
  ReferenceDistribution reference;
};

/// h(x, y) = theta + h1(x) + h2(y) + r(x, y) under the reference law.
HoeffdingComponents hoeffding_components(const KernelSpec& spec,
                                         const ReferenceDistribution& cdf);

struct KernelVariance {
  double sigma1_sq;
  double sigma2_sq;
};

/// Resolves (sigma1^2, sigma2^2) from the kernel's variance policy.
/// EstimateFromHistoric needs at least two historic values.
KernelVariance kernel_variance(const KernelSpec& spec,
                               std::span<const double> historic);

double sample_variance(std::span<const double> values);

}  // namespace seqcp
