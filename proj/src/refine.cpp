#include "attrition/refine.hpp"

#include <algorithm>
#include <cmath>

namespace attrition {

EquilibriumFamily perturbed_family(const TypeDistribution& dist,
                                   const PerturbationConfig& pc, double c) {
  return make_family(dist, pc.delta_eff(), c);
}

EquilibriumFamily perturbed_family_theta1(const TypeDistribution& dist,
                                          const PerturbationConfig& pc,
                                          double theta1) {
  return make_family_theta1(dist, pc.delta_eff(), theta1);
}

double equivalence_check(const TypeDistribution& dist, double delta, double c,
                         std::span<const double> grid) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("equivalence_check: delta must be in (0,1)");
  if (grid.size() < 2)
    throw std::invalid_argument("equivalence_check: grid too small");

  // shared anchor from the potential route
  EquilibriumFamily fam = make_family(dist, delta, c);
  const double th0 = grid[0];
  const double k0 = fam.hp.invert(fam.hp.value(th0) - c);

  auto rhs_al = [&dist, delta](double th, double k) -> double {
    if (!dist.support().contains(k))
      return std::numeric_limits<double>::quiet_NaN();
    const double dk = 1.0 - delta * dist.cdf(k);
    const double dt = 1.0 - delta * dist.cdf(th);
    return k * dk / dist.pdf(k) * dist.pdf(th) / (th * dt);
  };
  const double eps = 1.0 - delta;
  auto rhs_bt = [&dist, eps](double th, double k) -> double {
    if (!dist.support().contains(k))
      return std::numeric_limits<double>::quiet_NaN();
    const double dk = 1.0 - (1.0 - eps) * dist.cdf(k);
    const double dt = 1.0 - (1.0 - eps) * dist.cdf(th);
    return k * dk / dist.pdf(k) * dist.pdf(th) / (th * dt);
  };

  std::vector<double> targets(grid.begin() + 1, grid.end());
  num::OdeOptions opt;
  opt.rel_tol = 1e-11;  // two independent runs share a 1e-8 agreement budget
  opt.abs_tol = 1e-14;
  const auto al = num::integrate_ode(rhs_al, th0, k0, targets, opt);
  const auto bt = num::integrate_ode(rhs_bt, th0, k0, targets, opt);
  if (al.truncated || bt.truncated || al.y.size() != bt.y.size())
    throw std::runtime_error("equivalence_check: ODE integration truncated");
  double sup = 0.0;
  for (std::size_t i = 0; i < al.y.size(); ++i)
    sup = std::max(sup, std::abs(al.y[i] - bt.y[i]));
  return sup;
}

BoundedSelectionResult bounded_support_selection(const TypeDistribution& dist,
                                                 double delta) {
  const Support& s = dist.support();
  if (!s.bounded_above())
    throw std::invalid_argument(
        "bounded_support_selection: unbounded support; use "
        "unbounded_support_experiment");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument(
        "bounded_support_selection: delta must be in (0,1)");

  BoundedSelectionResult res;
  res.delta = delta;

  // k(upper) = upper makes the identity integral run over an empty interval
  const double k_at_upper = s.upper;
  res.forced_c = num::integrate(
      [&](double x) {
        return dist.pdf(x) / (x * dist.damped_survivor(x, delta));
      },
      k_at_upper, s.upper, 1e-12);

  // backward integration from just inside the upper corner
  const double eta = 1e-6 * s.width();
  const double start = s.upper - eta;
  auto rhs = [&dist, delta](double th, double k) -> double {
    if (!dist.support().contains(k))
      return std::numeric_limits<double>::quiet_NaN();
    return k * dist.damped_survivor(k, delta) / dist.pdf(k) * dist.pdf(th) /
           (th * dist.damped_survivor(th, delta));
  };
  std::vector<double> targets;
  for (int i = 1; i <= 64; ++i)
    targets.push_back(dist.quantile(0.99 * (1.0 - i / 64.0) + 0.005));
  std::sort(targets.begin(), targets.end());
  std::erase_if(targets, [&](double t) { return t >= start; });
  std::reverse(targets.begin(), targets.end());
  const auto trace = num::integrate_ode(rhs, start, start, targets);
  double dev = 0.0;
  for (std::size_t i = 0; i < trace.x.size(); ++i)
    dev = std::max(dev, std::abs(trace.y[i] - trace.x[i]));
  if (trace.truncated)
    throw std::runtime_error("bounded_support_selection: backward ODE collapsed");
  res.backward_identity_dev = dev;
  return res;
}

UnboundedExperimentResult unbounded_support_experiment(
    const TypeDistribution& dist, double delta, double c, double tail) {
  if (dist.support().bounded_above())
    throw std::invalid_argument(
        "unbounded_support_experiment: bounded support; use "
        "bounded_support_selection");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument(
        "unbounded_support_experiment: delta must be in (0,1)");
  if (c < 0.0)
    throw std::invalid_argument("unbounded_support_experiment: c must be >= 0");

  UnboundedExperimentResult res;
  res.delta = delta;
  res.c = c;
  try {
    EquilibriumFamily fam = make_family(dist, delta, c);
    res.lambda_upper = fam.hp.limits().upper;
    res.m_delta = c > 0.0 ? fam.p2_forever : kInf;

    auto grid = strategy_grid(fam, 257, tail);
    TypeMap map = TypeMap::from_inversion(fam, grid);
    StrategyCurve s1 = sigma1_from_map(map);
    res.a_bar_1 = s1.max_finite();

    if (c == 0.0) {
      res.note = "identity map: the partner image is unbounded, no gap opens";
      return res;
    }

    // Player-2 types above m_delta win surely above a_bar_1; measure the
    // gain of stepping back to a_bar_1 + step from the finite stand-in
    // 1.5 * a_bar_1 for their assigned infinite stop.
    StoppingTimeDistribution G1(dist, s1, 0.0);
    res.deviation_step = 1e-3 * res.a_bar_1;
    const double pullback = res.a_bar_1 + res.deviation_step;
    const double stand_in = 1.5 * res.a_bar_1;

    std::vector<double> devs = num::linspace(0.0, stand_in, 201);
    devs.push_back(pullback);
    std::sort(devs.begin(), devs.end());
    devs.erase(std::unique(devs.begin(), devs.end()), devs.end());
    std::vector<double> Gs(devs.size()), Is(devs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < devs.size(); ++i) {
      Gs[i] = G1.cdf(devs[i]);
      if (i > 0) {
        const double lo = std::min(devs[i - 1], G1.sup_finite_stop());
        const double hi = std::min(devs[i], G1.sup_finite_stop());
        if (hi > lo)
          acc += num::integrate(
              [&](double s) { return 1.0 - delta * G1.cdf(s); }, lo, hi, 1e-11);
        if (devs[i] > G1.sup_finite_stop())
          acc += (devs[i] - std::max(devs[i - 1], G1.sup_finite_stop())) *
                 (1.0 - delta * G1.cdf(devs[i]));
      }
      Is[i] = acc;
    }
    auto payoff = [&](double theta, std::size_t i) {
      return devs[i] == 0.0 ? theta * G1.atom_at_zero() / 2.0
                            : theta * Gs[i] - Is[i];
    };
    const std::size_t i_back =
        std::lower_bound(devs.begin(), devs.end(), pullback) - devs.begin();
    const std::size_t i_stand = devs.size() - 1;

    const double p_lo =
        dist.cdf(std::min(res.m_delta, dist.effective_upper(tail)));
    const double p_hi = 1.0 - tail;
    const int n_rows = 8;
    for (int i = 0; i < n_rows; ++i) {
      const double p = p_lo + (p_hi - p_lo) * (i + 0.5) / n_rows;
      if (!(p > p_lo)) continue;
      UnboundedExperimentResult::Row row;
      row.theta = dist.quantile(p);
      row.gain = payoff(row.theta, i_back) - payoff(row.theta, i_stand);
      row.best_action = pullback;
      double best = payoff(row.theta, i_back);
      for (std::size_t a = 0; a < devs.size(); ++a) {
        const double u = payoff(row.theta, a);
        if (u > best) {
          best = u;
          row.best_action = devs[a];
        }
      }
      res.max_gain = std::max(res.max_gain, row.gain);
      res.rows.push_back(row);
    }
  } catch (const std::exception& e) {
    res.ok = false;
    res.note = e.what();
  }
  return res;
}

SelectionExperiment selection_sweep(const TypeDistribution& dist,
                                    std::span<const double> deltas,
                                    std::span<const double> cs, double tail) {
  for (std::size_t i = 0; i + 1 < deltas.size(); ++i)
    if (!(deltas[i] < deltas[i + 1]))
      throw std::invalid_argument(
          "selection_sweep: delta schedule must increase toward 1");
  SelectionExperiment exp;
  exp.bounded = dist.support().bounded_above();
  for (double d : deltas) {
    if (exp.bounded) {
      exp.bounded_cells.push_back(bounded_support_selection(dist, d));
    } else {
      for (double c : cs)
        exp.unbounded_cells.push_back(
            unbounded_support_experiment(dist, d, c, tail));
    }
  }
  return exp;
}

}  // namespace attrition
