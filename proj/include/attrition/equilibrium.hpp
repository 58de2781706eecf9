#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "attrition/hazard_potential.hpp"

namespace attrition {

/// One member of the equilibrium continuum: a hazard potential (carrying
/// the perturbation level delta), the integral-identity constant c, and the
/// highest Player-1 type conceding at time zero.
///
/// Case A (divergent lower potential limit): theta1_zero equals the support
/// lower end and c ranges over the reals. Case B (finite lower limit):
/// c = potential(theta1_zero) - lower limit, so c >= 0 with equality exactly
/// when theta1_zero sits at the lower end.
struct EquilibriumFamily {
  HazardPotential hp;
  double c = 0.0;
  double theta1_zero = 0.0;
  MultiplicityCase mcase = MultiplicityCase::A;

  /// Player-1 types at or above this value would be mapped outside the
  /// support; finite only for c < 0 against a finite upper potential limit.
  double p1_upper = kInf;
  /// Lowest Player-2 type fighting forever; finite only for c > 0 against a
  /// finite upper potential limit.
  double p2_forever = kInf;

  double delta() const { return hp.delta(); }
  const TypeDistribution& dist() const { return hp.dist(); }
};

/// Build a family from the constant c. In Case B, c >= 0 is required (the
/// zero-concession mass always goes to Player 1; swap the player labels
/// before construction to realize the mirrored profiles).
EquilibriumFamily make_family(TypeDistribution dist, double delta, double c);

/// Build a Case-B family from theta1_zero (the highest type conceding at
/// zero); errors for Case-A distributions where that boundary is pinned.
EquilibriumFamily make_family_theta1(TypeDistribution dist, double delta,
                                     double theta1);

/// The type-to-type mapping k: Player-1 type -> the Player-2 type stopping
/// at the same instant. Strictly increasing with k -> support lower end as
/// theta approaches theta1_zero from above.
class TypeMap {
 public:
  enum class Source { Inversion, Ode, Direct };

  /// k(theta) via potential inversion: Lambda^{-1}(Lambda(theta) - c).
  static TypeMap from_inversion(EquilibriumFamily fam,
                                std::vector<double> grid);
  /// k by adaptive Runge-Kutta integration of the equilibrium ODE
  /// dk/dtheta = [k (1-dF(k)) / f(k)] * [f(theta) / (theta (1-dF(theta)))]
  /// from an interior start point (relative tolerance 1e-9). When the step
  /// size collapses near a boundary the map truncates at the last valid
  /// grid point.
  static TypeMap from_ode(EquilibriumFamily fam, double theta_start,
                          double k_start, std::vector<double> grid);
  /// k from explicit closed-form evaluators (used for the Section-3 style
  /// exact families).
  static TypeMap from_direct(EquilibriumFamily fam, std::vector<double> grid,
                             std::function<double(double)> eval,
                             std::function<double(double)> inverse_eval);

  double operator()(double theta) const;
  double inverse(double theta2) const;

  const EquilibriumFamily& family() const { return fam_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  /// Potential values at the grid nodes (inversion-sourced maps only).
  const std::vector<double>& lambda_grid() const { return lambda_grid_; }
  Source source() const { return source_; }
  bool truncated() const { return truncated_; }
  double last_valid_theta() const { return last_valid_; }

  /// Copy with replaced grid values (test hook for constructed violations).
  TypeMap with_values(std::vector<double> values) const;

 private:
  TypeMap(EquilibriumFamily fam, Source src) : fam_(std::move(fam)), source_(src) {}
  void build_interp();

  EquilibriumFamily fam_;
  Source source_;
  std::vector<double> grid_, values_, lambda_grid_;
  num::MonotoneCubic interp_, inverse_interp_;
  std::function<double(double)> direct_, direct_inv_;
  bool truncated_ = false;
  double last_valid_ = 0.0;
};

/// A stopping-time schedule for one player. `stop` entries may be +inf in
/// the fight-forever region; the threshold below is an exact sentinel,
/// never a large float.
struct StrategyCurve {
  std::vector<double> theta;
  std::vector<double> stop;
  double zero_cutoff = 0.0;        // types <= cutoff stop at time zero
  double forever_threshold = kInf; // types >= threshold never stop
  std::function<double(double)> eval;

  double max_finite() const;
  double operator()(double t) const { return eval(t); }
};

/// Player-1 schedule: sigma1(theta) = integral of k(t) f(t) / (1 - d F(t))
/// from theta1_zero, accumulated by adaptive quadrature over the map grid.
StrategyCurve sigma1_from_map(const TypeMap& map);

/// Player-2 schedule via monotone inversion of the map: sigma2(theta2) =
/// sigma1(k^{-1}(theta2)), with fight-forever semantics above the image of
/// the map when it is bounded.
StrategyCurve sigma2_from_map(const TypeMap& map, const StrategyCurve& sigma1);

// ---------------------------------------------------------------------------
// closed-form equilibrium families

struct ExpGamma {
  double lambda = 1.0;
  double gamma = 1.0;
};
struct UniformGamma {
  double gamma = 1.0;
};
struct ParetoTheta1 {
  double theta_min = 1.0;
  double alpha = 1.0;
  double theta1 = 1.0;
};
using ClosedFamily = std::variant<ExpGamma, UniformGamma, ParetoTheta1>;

/// Exact stopping time of `player` at type theta; +inf on the fight-forever
/// branch. The gamma = 1 removable singularity of the uniform family is
/// evaluated by its limit when |gamma - 1| < 1e-6.
double closed_form(const ClosedFamily& fam, double theta, int player);

/// The c constant the closed family corresponds to.
double closed_family_constant(const ClosedFamily& fam);

/// Exact-evaluator TypeMap / StrategyCurve for a closed family on a grid.
TypeMap closed_form_map(const ClosedFamily& fam, std::vector<double> grid);
StrategyCurve closed_form_curve(const ClosedFamily& fam, int player,
                                std::vector<double> grid);

// ---------------------------------------------------------------------------

/// The four admissibility conditions checked numerically on a map:
/// (i) strict monotonicity, (ii) the ODE residual by central differences,
/// (iii) k -> support lower end at theta1_zero, (iv) finite sigma1 at
/// interior grid points. Violations are reported, never thrown.
struct AdmissibilityReport {
  bool strictly_increasing = false;
  bool ode_satisfied = false;
  bool lower_boundary = false;
  bool sigma_finite = false;
  double max_ode_residual = 0.0;
  double boundary_gap = 0.0;
  bool pass() const {
    return strictly_increasing && ode_satisfied && lower_boundary &&
           sigma_finite;
  }
};

AdmissibilityReport check_admissible(const TypeMap& map);

/// Default construction grid: log-spaced offsets near theta1_zero (where
/// the schedules change fastest) merged with quantile-spaced points toward
/// the upper end, truncated at tail mass `tail`.
std::vector<double> strategy_grid(const EquilibriumFamily& fam, int n,
                                  double tail);

}  // namespace attrition
