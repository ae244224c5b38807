#include "seqcp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "seqcp/error.hpp"

namespace seqcp {

std::string_view to_string(Distribution dist) {
  switch (dist) {
    case Distribution::StdNormal: return "normal";
    case Distribution::StdT3: return "t3";
  }
  return "?";
}

Distribution parse_distribution(std::string_view name) {
  if (name == "normal" || name == "std_normal" || name == "N01") {
    return Distribution::StdNormal;
  }
  if (name == "t3" || name == "std_t3") return Distribution::StdT3;
  throw usage_error("unknown distribution '" + std::string(name) +
                    "' (expected normal or t3)");
}

double draw(Distribution dist, Rng& rng) {
  std::normal_distribution<double> normal;
  if (dist == Distribution::StdNormal) return normal(rng);
  // t(3) = Z / sqrt(chi2_3 / 3); scaled by 1/sqrt(3) this is Z / sqrt(chi2_3).
  const double z = normal(rng);
  double chi2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double g = normal(rng);
    chi2 += g * g;
  }
  return z / std::sqrt(chi2);
}

double standard_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double standard_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

namespace {

// X = T/sqrt(3) with T ~ t(3): F_X(x) = F_T(sqrt(3) x), and t(3) has the
// closed form F_T(t) = 1/2 + (1/pi) (u/(1+u^2) + atan u), u = t/sqrt(3).
double std_t3_cdf(double x) {
  const double u = x;
  return 0.5 + (u / (1.0 + u * u) + std::atan(u)) / std::numbers::pi;
}

double std_t3_pdf(double x) {
  const double q = 1.0 + x * x;
  return 2.0 / (std::numbers::pi * q * q);
}

}  // namespace

ReferenceDistribution ReferenceDistribution::analytic(Distribution dist) {
  ReferenceDistribution ref;
  ref.law_ = dist;
  ref.mean_ = 0.0;
  ref.variance_ = 1.0;
  return ref;
}

ReferenceDistribution ReferenceDistribution::empirical(
    std::span<const double> sample) {
  if (sample.empty()) throw data_error("empty reference sample");
  ReferenceDistribution ref;
  ref.empirical_ = true;
  ref.sorted_.assign(sample.begin(), sample.end());
  std::sort(ref.sorted_.begin(), ref.sorted_.end());
  const double n = static_cast<double>(sample.size());
  ref.mean_ = std::accumulate(sample.begin(), sample.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : sample) ss += (v - ref.mean_) * (v - ref.mean_);
  ref.variance_ = ss / n;
  return ref;
}

double ReferenceDistribution::cdf(double x) const {
  if (empirical_) {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) /
           static_cast<double>(sorted_.size());
  }
  return law_ == Distribution::StdNormal ? standard_normal_cdf(x)
                                         : std_t3_cdf(x);
}

double ReferenceDistribution::pdf(double x) const {
  if (empirical_) {
    throw usage_error("density is undefined for an empirical distribution");
  }
  return law_ == Distribution::StdNormal ? standard_normal_pdf(x)
                                         : std_t3_pdf(x);
}

double ReferenceDistribution::sample(Rng& rng) const {
  if (!empirical_) return draw(law_, rng);
  std::uniform_int_distribution<std::size_t> pick(0, sorted_.size() - 1);
  return sorted_[pick(rng)];
}

}  // namespace seqcp
