#pragma once

#include <span>
#include <string>
#include <vector>

#include "attrition/verify.hpp"

namespace attrition {

/// The two refinements, normalized onto one damping level. The payoff
/// perturbation with parameter delta (winner pays delta * loser stop +
/// (1 - delta) * own stop) and a behavioral mass eps of types fighting
/// forever modify the equilibrium ODE identically under delta = 1 - eps.
struct PerturbationConfig {
  enum class Mode { AL, BT };
  Mode mode = Mode::AL;
  double value = 0.0;  // delta for AL, eps for BT

  double delta_eff() const {
    return mode == Mode::AL ? value : 1.0 - value;
  }
  static PerturbationConfig al(double delta) {
    if (!(delta >= 0.0 && delta < 1.0))
      throw std::invalid_argument("al: delta must be in [0,1)");
    return {Mode::AL, delta};
  }
  static PerturbationConfig bt(double eps) {
    if (!(eps > 0.0 && eps < 1.0))
      throw std::invalid_argument("bt: eps must be in (0,1)");
    return {Mode::BT, eps};
  }
};

/// Family of the perturbed game; AL(delta) and BT(1 - delta) produce the
/// identical object.
EquilibriumFamily perturbed_family(const TypeDistribution& dist,
                                   const PerturbationConfig& pc, double c);
EquilibriumFamily perturbed_family_theta1(const TypeDistribution& dist,
                                          const PerturbationConfig& pc,
                                          double theta1);

/// Integrates the two refinements' ODEs independently (one parameterized by
/// delta, the other by eps = 1 - delta) from a shared interior anchor and
/// returns the sup-norm difference of the two trajectories over the grid.
double equivalence_check(const TypeDistribution& dist, double delta, double c,
                         std::span<const double> grid);

/// Bounded support: the perturbed game forces k(upper) = upper, so the
/// integral identity evaluated at the upper end pins c to zero. Also
/// integrates the perturbed ODE backward from (upper - eta, upper - eta)
/// and reports the max deviation from the identity map.
struct BoundedSelectionResult {
  double delta = 0.0;
  double forced_c = 0.0;
  double backward_identity_dev = 0.0;
};
BoundedSelectionResult bounded_support_selection(const TypeDistribution& dist,
                                                 double delta);

/// Unbounded support with c > 0: the damped potential has a finite upper
/// limit, the map saturates at m_delta, and Player-1 stops are capped by
/// a_bar_1 <= m_delta / (1 - delta). Reports those quantities plus the
/// measured payoff gain of Player-2 types above m_delta from stepping back
/// to a_bar_1 + step (their assigned infinite stop is represented by the
/// finite stand-in 1.5 * a_bar_1, since every bid above a_bar_1 wins surely
/// and the perturbed payoff then falls linearly at rate 1 - delta).
struct UnboundedExperimentResult {
  double delta = 0.0;
  double c = 0.0;
  bool ok = true;
  std::string note;
  double lambda_upper = 0.0;  // finite upper limit of the damped potential
  double m_delta = kInf;      // = invert(lambda_upper - c); +inf when c = 0
  double a_bar_1 = 0.0;
  double deviation_step = 0.0;
  struct Row {
    double theta = 0.0;
    double gain = 0.0;
    double best_action = 0.0;
  };
  std::vector<Row> rows;
  double max_gain = 0.0;
};
UnboundedExperimentResult unbounded_support_experiment(
    const TypeDistribution& dist, double delta, double c, double tail = 1e-6);

/// Sweep over a delta schedule (and a c set for unbounded supports); every
/// requested cell appears in the output, errors recorded per cell. Reports
/// evidence only: no verdict on whether selection succeeds is hard-coded.
struct SelectionExperiment {
  bool bounded = false;
  std::vector<BoundedSelectionResult> bounded_cells;
  std::vector<UnboundedExperimentResult> unbounded_cells;  // delta-major
};
SelectionExperiment selection_sweep(const TypeDistribution& dist,
                                    std::span<const double> deltas,
                                    std::span<const double> cs,
                                    double tail = 1e-6);

}  // namespace attrition
