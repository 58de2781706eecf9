#include "attrition/distribution.hpp"

#include <cmath>

namespace attrition {

struct TypeDistribution::Table {
  std::vector<std::array<double, 2>> points;
  num::MonotoneCubic cdf;
};

namespace {

void check_closed(const Support& s, double x, const char* op) {
  if (!(x >= s.lower) || !(x <= s.upper))
    throw DomainError(std::string(op) + ": point outside support");
}

}  // namespace

TypeDistribution TypeDistribution::exponential(double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("exponential: lambda must be positive");
  TypeDistribution d;
  d.family_ = Family::Exponential;
  d.support_ = {0.0, kInf};
  d.lambda_ = lambda;
  return d;
}

TypeDistribution TypeDistribution::uniform01() {
  TypeDistribution d;
  d.family_ = Family::Uniform01;
  d.support_ = {0.0, 1.0};
  return d;
}

TypeDistribution TypeDistribution::pareto(double theta_min, double alpha) {
  if (!(theta_min > 0.0) || !(alpha > 0.0))
    throw std::invalid_argument("pareto: theta_min and alpha must be positive");
  TypeDistribution d;
  d.family_ = Family::Pareto;
  d.support_ = {theta_min, kInf};
  d.theta_min_ = theta_min;
  d.alpha_ = alpha;
  return d;
}

TypeDistribution TypeDistribution::tabulated(
    std::vector<std::array<double, 2>> points) {
  if (points.size() < 4)
    throw std::invalid_argument("tabulated: need at least four points");
  if (!(points.front()[0] >= 0.0))
    throw std::invalid_argument("tabulated: support must start at or above 0");
  if (std::abs(points.front()[1]) > 1e-10 ||
      std::abs(points.back()[1] - 1.0) > 1e-10)
    throw std::invalid_argument(
        "tabulated: cdf must run from 0 to 1 (within 1e-10)");
  const double f0 = points.front()[1];
  const double fn = points.back()[1];
  std::vector<double> xs, fs;
  xs.reserve(points.size());
  fs.reserve(points.size());
  for (auto& p : points) {
    xs.push_back(p[0]);
    fs.push_back((p[1] - f0) / (fn - f0));  // pin the endpoints exactly
  }
  fs.front() = 0.0;
  fs.back() = 1.0;

  TypeDistribution d;
  d.family_ = Family::Tabulated;
  d.support_ = {xs.front(), xs.back()};
  auto table = std::make_shared<Table>();
  table->points = std::move(points);
  table->cdf = num::MonotoneCubic(std::move(xs), std::move(fs));
  d.table_ = std::move(table);
  return d;
}

const std::vector<std::array<double, 2>>& TypeDistribution::points() const {
  if (!table_) throw std::logic_error("points: not a tabulated distribution");
  return table_->points;
}

double TypeDistribution::cdf(double x) const {
  check_closed(support_, x, "cdf");
  switch (family_) {
    case Family::Exponential:
      return -std::expm1(-lambda_ * x);
    case Family::Uniform01:
      return x;
    case Family::Pareto:
      return x == kInf ? 1.0 : -std::expm1(alpha_ * std::log(theta_min_ / x));
    case Family::Tabulated:
      return table_->cdf(x);
  }
  return 0.0;
}

double TypeDistribution::survivor(double x) const {
  check_closed(support_, x, "survivor");
  switch (family_) {
    case Family::Exponential:
      return std::exp(-lambda_ * x);
    case Family::Uniform01:
      return 1.0 - x;
    case Family::Pareto:
      return x == kInf ? 0.0 : std::pow(theta_min_ / x, alpha_);
    case Family::Tabulated:
      return 1.0 - table_->cdf(x);
  }
  return 0.0;
}

double TypeDistribution::pdf(double x) const {
  check_closed(support_, x, "pdf");
  switch (family_) {
    case Family::Exponential:
      return lambda_ * std::exp(-lambda_ * x);
    case Family::Uniform01:
      return 1.0;
    case Family::Pareto:
      return x == kInf ? 0.0
                       : alpha_ / x * std::pow(theta_min_ / x, alpha_);
    case Family::Tabulated:
      return table_->cdf.derivative(x);
  }
  return 0.0;
}

double TypeDistribution::hazard(double x) const {
  if (!support_.contains(x))
    throw DomainError("hazard: point outside the open support");
  const double s = survivor(x);
  if (s <= 1e-14)
    throw DomainError("hazard: survivor vanishes this close to the upper end");
  return pdf(x) / s;
}

double TypeDistribution::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0))
    throw DomainError("quantile: probability outside [0,1]");
  if (p == 0.0) return support_.lower;
  if (p == 1.0) return support_.upper;
  switch (family_) {
    case Family::Exponential:
      return -std::log1p(-p) / lambda_;
    case Family::Uniform01:
      return p;
    case Family::Pareto:
      return theta_min_ * std::pow(1.0 - p, -1.0 / alpha_);
    case Family::Tabulated:
      return table_->cdf.inverse(p);
  }
  return 0.0;
}

double TypeDistribution::effective_upper(double tail_mass) const {
  if (!(tail_mass > 0.0) || !(tail_mass < 1.0))
    throw DomainError("effective_upper: tail mass must be in (0,1)");
  switch (family_) {
    case Family::Exponential:
      return -std::log(tail_mass) / lambda_;
    case Family::Uniform01:
      return 1.0 - tail_mass;
    case Family::Pareto:
      return theta_min_ * std::pow(tail_mass, -1.0 / alpha_);
    case Family::Tabulated:
      return table_->cdf.inverse(1.0 - tail_mass);
  }
  return 0.0;
}

double TypeDistribution::damped_survivor(double x, double delta) const {
  if (delta == 1.0) return survivor(x);
  return 1.0 - delta * cdf(x);
}

}  // namespace attrition
