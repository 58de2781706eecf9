#pragma once

#include <array>
#include <memory>
#include <vector>

#include "attrition/numerics.hpp"
#include "attrition/support.hpp"

namespace attrition {

/// Immutable type distribution with closed-form exponential, uniform(0,1)
/// and Pareto families plus a tabulated fallback (monotone-cubic CDF).
/// The density is continuous and strictly positive on the open support and
/// all operations are pure, so values can be shared across threads freely.
class TypeDistribution {
 public:
  enum class Family { Exponential, Uniform01, Pareto, Tabulated };

  static TypeDistribution exponential(double lambda);
  static TypeDistribution uniform01();
  static TypeDistribution pareto(double theta_min, double alpha);
  static TypeDistribution tabulated(std::vector<std::array<double, 2>> points);

  const Support& support() const { return support_; }
  Family family() const { return family_; }

  /// F(x); x must lie in the closed support.
  double cdf(double x) const;
  /// 1 - F(x), computed without cancellation for the closed forms.
  double survivor(double x) const;
  /// f(x); x must lie in the closed support.
  double pdf(double x) const;
  /// f(x) / (1 - F(x)); x in the open support, errors near the upper end
  /// where the survivor drops below 1e-14.
  double hazard(double x) const;
  /// F^{-1}(p) for p in [0, 1].
  double quantile(double p) const;
  /// Quantile at 1 - tail_mass, evaluated tail-accurately.
  double effective_upper(double tail_mass) const;
  double median() const { return quantile(0.5); }

  /// 1 - delta * F(x); equals the survivor at delta = 1 (exact form).
  double damped_survivor(double x, double delta) const;

  // family parameters (zero when not applicable)
  double lambda() const { return lambda_; }
  double theta_min() const { return theta_min_; }
  double alpha() const { return alpha_; }
  const std::vector<std::array<double, 2>>& points() const;

 private:
  TypeDistribution() = default;

  Family family_ = Family::Uniform01;
  Support support_;
  double lambda_ = 0.0;
  double theta_min_ = 0.0;
  double alpha_ = 0.0;

  struct Table;
  std::shared_ptr<const Table> table_;  // tabulated family only
};

}  // namespace attrition
