#pragma once

#include <functional>
#include <string_view>

namespace seqcp {

/// How the monitoring statistic is normalized before it is compared with a
/// critical value: Homoscedastic divides w(m,k)|Psi| by sigma-hat (sigma1 =
/// sigma2); Heteroscedastic uses the two-scale boundary of hetero_weight.
enum class Normalization { Homoscedastic, Heteroscedastic };

std::string_view to_string(Normalization n);
Normalization parse_normalization(std::string_view name);

struct WeightConfig {
  double gamma = 0.0;
  long burn_in = 1;
  double mmosum_b = 0.4;
  Normalization normalization = Normalization::Homoscedastic;
  /// Optional replacement for the built-in rho family. Must be positive on
  /// (0, inf); critical values are only tabulated for the built-in family.
  std::function<double(double)> custom_rho;

  /// Throws a usage error unless 0 <= gamma < 0.5, 0 < b < 1, burn_in >= 1.
  void validate() const;
};

/// ceil(sqrt(m)).
long default_burn_in(long m);

/// WeightConfig with burn_in = ceil(sqrt(m)).
WeightConfig make_weight_config(long m, double gamma, double mmosum_b,
                                Normalization n = Normalization::Homoscedastic);

/// rho(t) = (1/(1+t)) ((1+t)/t)^gamma for t > 0.
double rho(double gamma, double t);

/// w(m,k) = m^{-1/2} rho(k/m) for k > burn_in, else 0.
double weight(long m, long k, const WeightConfig& cfg);

/// s1 / (sqrt(m) (s2^2 + s1^2 k/m)), the two-scale normalization.
double hetero_weight(long m, long k, double s1, double s2);

}  // namespace seqcp
