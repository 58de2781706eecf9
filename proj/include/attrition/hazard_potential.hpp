#pragma once

#include <optional>

#include "attrition/distribution.hpp"
#include "attrition/support.hpp"

namespace attrition {

/// Limits of the hazard potential at the two ends of the support.
/// `lower < 0 < upper` always holds since the potential vanishes at the
/// reference point and is strictly increasing.
struct PotentialLimits {
  double lower = -kInf;
  double upper = kInf;
  bool lower_divergent = true;
  bool upper_divergent = true;
};

/// Knobs for the numeric divergence probe: evaluate the potential along a
/// geometric sequence toward a boundary and call the limit divergent when
/// the final increment still exceeds `increment_tol` after `refinements`
/// halvings (or once the probe reaches the quantile clamp).
struct ProbeConfig {
  int refinements = 60;
  double increment_tol = 1e-8;
  double clamp_mass = 1e-12;
};

/// Hazard potential of a type distribution: the integral of
/// f(x) / (x * (1 - delta * F(x))) from a fixed interior reference point.
/// delta = 1 is the unperturbed potential (integrand h(x)/x); delta < 1 is
/// the damped variant used by the refinement experiments. Strictly
/// increasing in theta; immutable and safe to share.
class HazardPotential {
 public:
  /// Reference point defaults to the distribution median. Only potential
  /// differences matter downstream, so the choice shifts values by a
  /// constant without affecting any derived object.
  explicit HazardPotential(TypeDistribution dist, double delta = 1.0);
  HazardPotential(TypeDistribution dist, double reference, double delta);

  /// Potential value at theta (0 at the reference point). Closed form for
  /// the exponential/Pareto families at delta = 1 and for uniform(0,1) at
  /// any delta; adaptive quadrature (abs tol 1e-10) otherwise.
  double value(double theta) const;

  /// Inverse of value(): the theta with |value(theta) - y| <= 1e-10, found
  /// by bracketed bisection with geometric bracket expansion toward
  /// unbounded ends. Throws RangeError naming the violated boundary when y
  /// lies outside (lower, upper) limits.
  double invert(double y) const;

  /// Same, but with a starting bracket hint [lo, hi] (expanded as needed).
  /// A known (x, value) anchor lets the quadrature-backed potential
  /// integrate only across the bracket instead of from the reference.
  struct Anchor {
    double x;
    double lambda;
  };
  double invert(double y, double hint_lo, double hint_hi,
                std::optional<Anchor> anchor = {}) const;

  /// True when value() is evaluated in closed form (no quadrature).
  bool closed_form() const;

  /// f(x) / (x * (1 - delta F(x))).
  double integrand(double x) const;

  /// Boundary limits; closed form where known, numeric probe otherwise.
  /// For delta < 1 the upper limit is always finite: the integrand is
  /// bounded by f(x)/(reference*(1-delta)) above the reference point.
  const PotentialLimits& limits() const { return limits_; }

  /// Numeric boundary probe, available for every configuration (used by
  /// tests and the classify command to cross-check the closed forms).
  PotentialLimits probe_limits(const ProbeConfig& cfg = {}) const;

  const TypeDistribution& dist() const { return dist_; }
  double reference() const { return reference_; }
  double delta() const { return delta_; }
  double clamp_lower() const { return clamp_lo_; }
  double clamp_upper() const { return clamp_hi_; }

 private:
  bool has_closed_form() const;
  double closed_value(double theta) const;
  PotentialLimits compute_limits() const;
  // quadrature of the integrand with geometric pre-splitting, so that mass
  // concentrated near the lower end of a very wide interval is never missed
  double quad(double a, double b, double tol) const;

  TypeDistribution dist_;
  double reference_;
  double delta_;
  double clamp_lo_, clamp_hi_;
  PotentialLimits limits_;
};

/// Case A when the lower limit of the (unperturbed) potential diverges,
/// Case B when it is finite. Requires delta = 1.
MultiplicityCase classify_case(const HazardPotential& hp);

}  // namespace attrition
