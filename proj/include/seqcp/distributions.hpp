#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqcp/random.hpp"

namespace seqcp {

/// Innovation laws used by the simulation study. StdT3 is T/sqrt(3) with
/// T ~ t(3), so both laws have mean 0 and variance 1.
enum class Distribution { StdNormal, StdT3 };

std::string_view to_string(Distribution dist);
Distribution parse_distribution(std::string_view name);

double draw(Distribution dist, Rng& rng);

double standard_normal_cdf(double x);
double standard_normal_pdf(double x);

/// A reference law for building Hoeffding components: either one of the
/// analytic laws above or the empirical distribution of a sample.
class ReferenceDistribution {
 public:
  static ReferenceDistribution analytic(Distribution dist);
  /// Throws a data error for an empty sample.
  static ReferenceDistribution empirical(std::span<const double> sample);

  bool is_empirical() const noexcept { return empirical_; }
  Distribution law() const noexcept { return law_; }

  double cdf(double x) const;
  /// Density; only defined for analytic laws.
  double pdf(double x) const;
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }
  double sample(Rng& rng) const;

 private:
  ReferenceDistribution() = default;

  bool empirical_ = false;
  Distribution law_ = Distribution::StdNormal;
  std::vector<double> sorted_;
  double mean_ = 0.0;
  double variance_ = 1.0;
};

}  // namespace seqcp
