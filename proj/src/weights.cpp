#include "seqcp/weights.hpp"

#include <cmath>
#include <string>

#include "seqcp/error.hpp"

namespace seqcp {

std::string_view to_string(Normalization n) {
  return n == Normalization::Homoscedastic ? "homo" : "hetero";
}

Normalization parse_normalization(std::string_view name) {
  if (name == "homo" || name == "homoscedastic" || name == "a") {
    return Normalization::Homoscedastic;
  }
  if (name == "hetero" || name == "heteroscedastic" || name == "b") {
    return Normalization::Heteroscedastic;
  }
  throw usage_error("unknown normalization '" + std::string(name) +
                    "' (expected homo or hetero)");
}

void WeightConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 0.5)) {
    throw usage_error("gamma must lie in [0, 0.5), got " +
                      std::to_string(gamma));
  }
  if (!(mmosum_b > 0.0 && mmosum_b < 1.0)) {
    throw usage_error("mMOSUM fraction b must lie in (0, 1), got " +
                      std::to_string(mmosum_b));
  }
  if (burn_in < 1) throw usage_error("burn_in must be at least 1");
}

long default_burn_in(long m) {
  return static_cast<long>(std::ceil(std::sqrt(static_cast<double>(m))));
}

WeightConfig make_weight_config(long m, double gamma, double mmosum_b,
                                Normalization n) {
  WeightConfig cfg;
  cfg.gamma = gamma;
  cfg.mmosum_b = mmosum_b;
  cfg.burn_in = default_burn_in(m);
  cfg.normalization = n;
  cfg.validate();
  return cfg;
}

double rho(double gamma, double t) {
  if (!(t > 0.0)) throw usage_error("weight undefined at nonpositive time");
  if (gamma == 0.0) return 1.0 / (1.0 + t);
  return std::pow((1.0 + t) / t, gamma) / (1.0 + t);
}

double weight(long m, long k, const WeightConfig& cfg) {
  if (k <= cfg.burn_in) return 0.0;
  const double t = static_cast<double>(k) / static_cast<double>(m);
  const double r = cfg.custom_rho ? cfg.custom_rho(t) : rho(cfg.gamma, t);
  return r / std::sqrt(static_cast<double>(m));
}

double hetero_weight(long m, long k, double s1, double s2) {
  if (!(s1 > 0.0) || !(s2 > 0.0)) throw usage_error("nonpositive scale");
  const double md = static_cast<double>(m);
  return s1 / (std::sqrt(md) * (s2 * s2 + s1 * s1 * static_cast<double>(k) / md));
}

}  // namespace seqcp
