#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "attrition/equilibrium.hpp"

namespace attrition {

/// Distribution of one player's stopping time induced by a strategy curve
/// over the type distribution, plus an optional behavioral mass at +inf.
/// Atomless on (0, inf) apart from the curve's truncation point, where the
/// unmodeled tail of the type space (mass ~ the construction tail) is
/// collapsed into a single atom so that payoffs against the schedule stay
/// finite.
class StoppingTimeDistribution {
 public:
  StoppingTimeDistribution(TypeDistribution dist, StrategyCurve curve,
                           double behavioral_mass = 0.0);

  /// G(a) = P(stop <= a) for a >= 0.
  double cdf(double a) const;
  double atom_at_zero() const;
  double mass_at_infinity() const;
  double sup_finite_stop() const { return sup_stop_; }
  /// Integral of (1 - delta G(s)) over [0, a], to 1e-9 absolute.
  double cost_integral(double a, double delta) const;

  const TypeDistribution& dist() const { return dist_; }
  const StrategyCurve& curve() const { return curve_; }

 private:
  TypeDistribution dist_;
  StrategyCurve curve_;
  double eps_;
  double atom0_;
  double sup_stop_;
  double top_theta_;
  double cdf_at_sup_;
};

/// Expected payoff of a type-theta player stopping at finite a >= 0 against
/// the opponent stopping distribution G, with winner cost
/// delta * (loser stop) + (1 - delta) * (own stop):
///   pi = theta G(a) - integral_0^a (1 - delta G(s)) ds,
/// which at delta = 1 is the usual theta G(a) - integral (1 - G). A
/// behavioral mass enters through G itself. At a = 0 the zero atom ties and
/// splits the prize.
double expected_payoff(const StoppingTimeDistribution& G, double theta,
                       double a, double delta);

/// Limit payoff of never stopping. Minus infinity when the opponent also
/// has mass at infinity or when delta < 1 (own cost grows without bound).
double expected_payoff_forever(const StoppingTimeDistribution& G, double theta,
                               double delta);

struct Profile {
  TypeDistribution dist;
  StrategyCurve sigma1;
  StrategyCurve sigma2;
  double delta = 1.0;
  double behavioral_mass = 0.0;
};

struct DeviationRow {
  double theta = 0.0;
  double assigned = 0.0;  // +inf in a fight-forever region
  double best_action = 0.0;
  double gain = 0.0;
};

struct VerificationReport {
  int player = 0;
  std::vector<DeviationRow> rows;
  double max_gain = 0.0;
  double gain_tolerance = 0.0;      // 2 * (deviation spacing) * max type
  double identity_residual = std::numeric_limits<double>::quiet_NaN();
  bool pass() const { return max_gain <= gain_tolerance; }
};

/// Best-response deviation search for one player: for each type on
/// theta_grid, the payoff gain of the best deviation (over deviation_grid,
/// with the assigned stop always included as a candidate) relative to the
/// assigned stopping time. Gains are findings, never errors.
VerificationReport best_response_gap(const Profile& profile, int player,
                                     std::span<const double> theta_grid,
                                     std::span<const double> deviation_grid);

/// Max over the map grid of | integral_{k(theta)}^{theta} f/(x(1-dF)) dx - c |
/// by direct adaptive quadrature (independent of the potential route).
double integral_identity_residual(const TypeMap& map);

/// Quantile-spaced type grid over the distribution truncated at `tail`.
std::vector<double> quantile_grid(const TypeDistribution& dist, int n,
                                  double tail);

// ---------------------------------------------------------------------------
// fully discrete desk-scale oracle

struct DiscreteOracleReport {
  std::vector<double> types;    // shared by both players
  std::vector<double> actions;  // uniform grid including 0
  double action_spacing = 0.0;
  double gain_bound = 0.0;  // 2 * spacing * max type

  // check mode
  struct Row {
    double theta = 0.0;
    int assigned = 0;
    int best = 0;
    double gain = 0.0;
  };
  std::vector<Row> rows_p1, rows_p2;
  double max_gain = 0.0;

  // search mode
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  std::vector<int> fixed_p1, fixed_p2;
};

/// Brute-force payoff-table check of a profile restricted to an
/// n_types x n_actions grid (types quantile-spaced with tail truncation,
/// actions uniform over 1.5x the largest finite assigned stop).
DiscreteOracleReport discrete_oracle_check(const TypeDistribution& dist,
                                           int n_types, int n_actions,
                                           const Profile& profile,
                                           double tail = 1e-6);

/// Best-response iteration from the symmetric profile; reports the fixed
/// point reached (or the last residual after 500 rounds, not an error).
DiscreteOracleReport discrete_oracle_search(const TypeDistribution& dist,
                                            int n_types, int n_actions,
                                            double tail = 1e-6);

}  // namespace attrition
