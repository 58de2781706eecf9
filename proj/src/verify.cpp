#include "attrition/verify.hpp"

#include <algorithm>
#include <cmath>

namespace attrition {

StoppingTimeDistribution::StoppingTimeDistribution(TypeDistribution dist,
                                                   StrategyCurve curve,
                                                   double behavioral_mass)
    : dist_(std::move(dist)), curve_(std::move(curve)), eps_(behavioral_mass) {
  if (!(eps_ >= 0.0 && eps_ <= 1.0))
    throw std::invalid_argument(
        "StoppingTimeDistribution: behavioral mass outside [0,1]");
  atom0_ = (1.0 - eps_) * dist_.cdf(curve_.zero_cutoff);
  sup_stop_ = curve_.max_finite();
  top_theta_ = curve_.zero_cutoff;
  for (std::size_t i = 0; i < curve_.theta.size(); ++i)
    if (std::isfinite(curve_.stop[i])) top_theta_ = curve_.theta[i];
  const double settled = curve_.forever_threshold < kInf
                             ? dist_.cdf(curve_.forever_threshold)
                             : 1.0;
  cdf_at_sup_ = (1.0 - eps_) * settled;
}

double StoppingTimeDistribution::atom_at_zero() const { return atom0_; }

double StoppingTimeDistribution::mass_at_infinity() const {
  const double survivors = curve_.forever_threshold < kInf
                               ? dist_.survivor(curve_.forever_threshold)
                               : 0.0;
  return eps_ + (1.0 - eps_) * survivors;
}

double StoppingTimeDistribution::cdf(double a) const {
  if (a < 0.0) return 0.0;
  if (a == 0.0) return atom0_;
  if (a >= sup_stop_) return cdf_at_sup_;
  if (top_theta_ <= curve_.zero_cutoff) return atom0_;
  const double theta = num::solve_increasing(
      [this](double t) { return curve_.eval(t); }, curve_.zero_cutoff,
      top_theta_, a, 0.0);
  return (1.0 - eps_) * dist_.cdf(theta);
}

double StoppingTimeDistribution::cost_integral(double a, double delta) const {
  if (!(a >= 0.0)) throw DomainError("cost_integral: negative stopping time");
  if (a == 0.0) return 0.0;
  const double a1 = std::min(a, sup_stop_);
  double out = 0.0;
  if (a1 > 0.0)
    out = num::integrate(
        [this, delta](double s) { return 1.0 - delta * cdf(s); }, 0.0, a1,
        1e-9);
  if (a > sup_stop_) out += (a - sup_stop_) * (1.0 - delta * cdf_at_sup_);
  return out;
}

double expected_payoff(const StoppingTimeDistribution& G, double theta,
                       double a, double delta) {
  if (!(a >= 0.0) || !std::isfinite(a))
    throw DomainError("expected_payoff: stopping time must be finite and >= 0");
  if (a == 0.0) return theta * G.atom_at_zero() / 2.0;
  return theta * G.cdf(a) - G.cost_integral(a, delta);
}

double expected_payoff_forever(const StoppingTimeDistribution& G, double theta,
                               double delta) {
  if (delta < 1.0 || G.mass_at_infinity() > 0.0) return -kInf;
  return theta - G.cost_integral(G.sup_finite_stop(), 1.0);
}

std::vector<double> quantile_grid(const TypeDistribution& dist, int n,
                                  double tail) {
  if (n < 1) throw std::invalid_argument("quantile_grid: n must be positive");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    out.push_back(dist.quantile((j + 0.5) / n * (1.0 - tail)));
  return out;
}

VerificationReport best_response_gap(const Profile& profile, int player,
                                     std::span<const double> theta_grid,
                                     std::span<const double> deviation_grid) {
  if (player != 1 && player != 2)
    throw std::invalid_argument("best_response_gap: player must be 1 or 2");
  const StrategyCurve& own = player == 1 ? profile.sigma1 : profile.sigma2;
  const StrategyCurve& opp = player == 1 ? profile.sigma2 : profile.sigma1;
  StoppingTimeDistribution G(profile.dist, opp, profile.behavioral_mass);
  const double delta = profile.delta;

  std::vector<double> devs(deviation_grid.begin(), deviation_grid.end());
  std::sort(devs.begin(), devs.end());
  devs.erase(std::unique(devs.begin(), devs.end()), devs.end());
  if (devs.empty() || devs.front() < 0.0)
    throw std::invalid_argument("best_response_gap: bad deviation grid");

  // cumulative cost integral over the sorted candidates; per-segment
  // tolerance is tight so that refining the grid cannot shift shared values
  std::vector<double> Gs(devs.size()), Is(devs.size());
  double acc = devs.front() > 0.0 ? G.cost_integral(devs.front(), delta) : 0.0;
  Is[0] = acc;
  Gs[0] = G.cdf(devs.front());
  for (std::size_t i = 1; i < devs.size(); ++i) {
    const double lo = std::min(devs[i - 1], G.sup_finite_stop());
    const double hi = std::min(devs[i], G.sup_finite_stop());
    if (hi > lo)
      acc += num::integrate(
          [&](double s) { return 1.0 - delta * G.cdf(s); }, lo, hi, 1e-13);
    if (devs[i] > G.sup_finite_stop())
      acc += (devs[i] - std::max(devs[i - 1], G.sup_finite_stop())) *
             (1.0 - delta * G.cdf(devs[i]));
    Is[i] = acc;
    Gs[i] = G.cdf(devs[i]);
  }

  VerificationReport rep;
  rep.player = player;
  for (double theta : theta_grid) {
    DeviationRow row;
    row.theta = theta;
    row.assigned = own.eval(theta);
    double pay_assigned;
    if (!std::isfinite(row.assigned)) {
      pay_assigned = expected_payoff_forever(G, theta, delta);
    } else if (row.assigned == 0.0) {
      pay_assigned = theta * G.atom_at_zero() / 2.0;
    } else {
      const auto it =
          std::upper_bound(devs.begin(), devs.end(), row.assigned);
      const std::size_t j = it == devs.begin() ? 0 : (it - devs.begin()) - 1;
      double I;
      if (row.assigned >= devs[j]) {
        const double lo = std::min(devs[j], G.sup_finite_stop());
        const double hi = std::min(row.assigned, G.sup_finite_stop());
        I = Is[j];
        if (hi > lo)
          I += num::integrate(
              [&](double s) { return 1.0 - delta * G.cdf(s); }, lo, hi, 1e-13);
        if (row.assigned > G.sup_finite_stop())
          I += (row.assigned - std::max(devs[j], G.sup_finite_stop())) *
               (1.0 - delta * G.cdf(row.assigned));
      } else {
        I = G.cost_integral(row.assigned, delta);
      }
      pay_assigned = theta * G.cdf(row.assigned) - I;
    }
    row.best_action = row.assigned;
    row.gain = 0.0;
    for (std::size_t i = 0; i < devs.size(); ++i) {
      const double pay = devs[i] == 0.0 ? theta * G.atom_at_zero() / 2.0
                                        : theta * Gs[i] - Is[i];
      const double gain = pay - pay_assigned;
      if (gain > row.gain) {
        row.gain = gain;
        row.best_action = devs[i];
      }
    }
    rep.max_gain = std::max(rep.max_gain, row.gain);
    rep.rows.push_back(row);
  }
  const double spacing =
      devs.size() > 1 ? (devs.back() - devs.front()) / (devs.size() - 1) : 0.0;
  const double theta_max =
      theta_grid.empty() ? 0.0 : theta_grid[theta_grid.size() - 1];
  rep.gain_tolerance = 2.0 * spacing * theta_max;
  return rep;
}

double integral_identity_residual(const TypeMap& map) {
  if (map.grid().size() < 3)
    throw std::invalid_argument(
        "integral_identity_residual: need at least three grid points");
  const auto& fam = map.family();
  const TypeDistribution& dist = fam.dist();
  const double delta = fam.delta();
  double worst = 0.0;
  for (std::size_t i = 0; i < map.grid().size(); ++i) {
    const double th = map.grid()[i];
    const double k = map.values()[i];
    const double I = num::integrate(
        [&](double x) {
          return dist.pdf(x) / (x * dist.damped_survivor(x, delta));
        },
        k, th, 1e-9);
    worst = std::max(worst, std::abs(I - fam.c));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// discrete oracle

namespace {

struct OpponentTable {
  // prefix aggregates of the opponent's action histogram
  std::vector<double> mass_below, cost_below, tie_mass;
};

OpponentTable summarize(const std::vector<int>& opp_actions,
                        const std::vector<double>& actions, double w) {
  const std::size_t m = actions.size();
  std::vector<double> hist(m, 0.0), cost(m, 0.0);
  for (int a : opp_actions) {
    hist[static_cast<std::size_t>(a)] += w;
    cost[static_cast<std::size_t>(a)] += w * actions[static_cast<std::size_t>(a)];
  }
  OpponentTable t;
  t.mass_below.assign(m, 0.0);
  t.cost_below.assign(m, 0.0);
  t.tie_mass = hist;
  double mb = 0.0, cb = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    t.mass_below[i] = mb;
    t.cost_below[i] = cb;
    mb += hist[i];
    cb += cost[i];
  }
  return t;
}

double discrete_payoff(double theta, std::size_t ai,
                       const std::vector<double>& actions,
                       const OpponentTable& t) {
  const double a = actions[ai];
  return theta * (t.mass_below[ai] + 0.5 * t.tie_mass[ai]) -
         t.cost_below[ai] - a * (1.0 - t.mass_below[ai]);
}

int snap_action(double value, const std::vector<double>& actions) {
  if (!std::isfinite(value)) return static_cast<int>(actions.size()) - 1;
  const double spacing = actions.size() > 1 ? actions[1] - actions[0] : 1.0;
  const auto idx = static_cast<long>(std::llround(value / spacing));
  return static_cast<int>(
      std::clamp<long>(idx, 0, static_cast<long>(actions.size()) - 1));
}

}  // namespace

DiscreteOracleReport discrete_oracle_check(const TypeDistribution& dist,
                                           int n_types, int n_actions,
                                           const Profile& profile,
                                           double tail) {
  if (n_types < 1 || n_types > 64 || n_actions < 2 || n_actions > 1024)
    throw std::invalid_argument("discrete_oracle: grid limits are 64 x 1024");
  DiscreteOracleReport rep;
  rep.types = quantile_grid(dist, n_types, tail);

  double a_hi = 0.0;
  for (double th : rep.types) {
    const double s1 = profile.sigma1.eval(th);
    const double s2 = profile.sigma2.eval(th);
    if (std::isfinite(s1)) a_hi = std::max(a_hi, s1);
    if (std::isfinite(s2)) a_hi = std::max(a_hi, s2);
  }
  rep.actions = num::linspace(0.0, 1.5 * a_hi, n_actions);
  rep.action_spacing = rep.actions[1] - rep.actions[0];
  rep.gain_bound = 2.0 * rep.action_spacing * rep.types.back();

  const double w = 1.0 / n_types;
  std::vector<int> assigned1, assigned2;
  for (double th : rep.types) {
    assigned1.push_back(snap_action(profile.sigma1.eval(th), rep.actions));
    assigned2.push_back(snap_action(profile.sigma2.eval(th), rep.actions));
  }
  const OpponentTable t2 = summarize(assigned2, rep.actions, w);
  const OpponentTable t1 = summarize(assigned1, rep.actions, w);

  auto check_rows = [&](const std::vector<int>& mine, const OpponentTable& t,
                        std::vector<DiscreteOracleReport::Row>& rows) {
    for (int j = 0; j < n_types; ++j) {
      DiscreteOracleReport::Row row;
      row.theta = rep.types[static_cast<std::size_t>(j)];
      row.assigned = mine[static_cast<std::size_t>(j)];
      const double base = discrete_payoff(
          row.theta, static_cast<std::size_t>(row.assigned), rep.actions, t);
      double best = base;
      row.best = row.assigned;
      for (std::size_t a = 0; a < rep.actions.size(); ++a) {
        const double u = discrete_payoff(row.theta, a, rep.actions, t);
        if (u > best) {
          best = u;
          row.best = static_cast<int>(a);
        }
      }
      row.gain = best - base;
      rep.max_gain = std::max(rep.max_gain, row.gain);
      rows.push_back(row);
    }
  };
  check_rows(assigned1, t2, rep.rows_p1);
  check_rows(assigned2, t1, rep.rows_p2);
  return rep;
}

DiscreteOracleReport discrete_oracle_search(const TypeDistribution& dist,
                                            int n_types, int n_actions,
                                            double tail) {
  if (n_types < 1 || n_types > 64 || n_actions < 2 || n_actions > 1024)
    throw std::invalid_argument("discrete_oracle: grid limits are 64 x 1024");
  DiscreteOracleReport rep;
  rep.types = quantile_grid(dist, n_types, tail);

  // symmetric starting profile: sigma(theta) = integral of t f/(1-F)
  std::vector<double> sym;
  double acc = 0.0, prev = dist.support().lower;
  for (double th : rep.types) {
    acc += num::integrate(
        [&](double t) { return t * dist.pdf(t) / dist.survivor(t); }, prev, th,
        1e-10);
    sym.push_back(acc);
    prev = th;
  }
  rep.actions = num::linspace(0.0, 1.5 * sym.back(), n_actions);
  rep.action_spacing = rep.actions[1] - rep.actions[0];
  rep.gain_bound = 2.0 * rep.action_spacing * rep.types.back();

  const double w = 1.0 / n_types;
  std::vector<int> p1, p2;
  for (double s : sym) p1.push_back(snap_action(s, rep.actions));
  p2 = p1;

  auto best_response = [&](const OpponentTable& t, double theta) {
    std::size_t best = 0;
    double bu = discrete_payoff(theta, 0, rep.actions, t);
    for (std::size_t a = 1; a < rep.actions.size(); ++a) {
      const double u = discrete_payoff(theta, a, rep.actions, t);
      if (u > bu) {
        bu = u;
        best = a;
      }
    }
    return std::pair{static_cast<int>(best), bu};
  };

  for (rep.iterations = 1; rep.iterations <= 500; ++rep.iterations) {
    bool changed = false;
    rep.residual = 0.0;
    const OpponentTable t2 = summarize(p2, rep.actions, w);
    for (int j = 0; j < n_types; ++j) {
      auto [a, u] = best_response(t2, rep.types[static_cast<std::size_t>(j)]);
      const double cur = discrete_payoff(
          rep.types[static_cast<std::size_t>(j)],
          static_cast<std::size_t>(p1[static_cast<std::size_t>(j)]),
          rep.actions, t2);
      rep.residual = std::max(rep.residual, u - cur);
      if (a != p1[static_cast<std::size_t>(j)]) changed = true;
      p1[static_cast<std::size_t>(j)] = a;
    }
    const OpponentTable t1 = summarize(p1, rep.actions, w);
    for (int j = 0; j < n_types; ++j) {
      auto [a, u] = best_response(t1, rep.types[static_cast<std::size_t>(j)]);
      const double cur = discrete_payoff(
          rep.types[static_cast<std::size_t>(j)],
          static_cast<std::size_t>(p2[static_cast<std::size_t>(j)]),
          rep.actions, t1);
      rep.residual = std::max(rep.residual, u - cur);
      if (a != p2[static_cast<std::size_t>(j)]) changed = true;
      p2[static_cast<std::size_t>(j)] = a;
    }
    if (!changed) {
      rep.converged = true;
      break;
    }
  }
  rep.fixed_p1 = p1;
  rep.fixed_p2 = p2;
  return rep;
}

}  // namespace attrition
