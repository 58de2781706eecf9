#include "attrition/equilibrium.hpp"

#include <algorithm>
#include <cmath>

namespace attrition {

namespace {

void check_grid(const std::vector<double>& grid) {
  if (grid.size() < 2)
    throw std::invalid_argument("grid: need at least two points");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1]))
      throw std::invalid_argument("grid: not strictly increasing");
}

EquilibriumFamily finish_family(HazardPotential hp, double c, double theta1) {
  const auto lim = hp.limits();
  EquilibriumFamily fam{std::move(hp), c, theta1,
                        lim.lower_divergent ? MultiplicityCase::A
                                            : MultiplicityCase::B};
  if (!lim.upper_divergent) {
    if (c > 0.0) {
      try {
        fam.p2_forever = fam.hp.invert(lim.upper - c);
      } catch (const RangeError&) {
        throw RangeError(Boundary::Upper,
                         "family: c exceeds the potential range");
      }
    } else if (c < 0.0) {
      try {
        fam.p1_upper = fam.hp.invert(lim.upper + c);
      } catch (const RangeError&) {
        throw RangeError(Boundary::Upper,
                         "family: c exceeds the potential range");
      }
    }
  }
  return fam;
}

}  // namespace

EquilibriumFamily make_family(TypeDistribution dist, double delta, double c) {
  HazardPotential hp(std::move(dist), delta);
  const auto& lim = hp.limits();
  double theta1 = hp.dist().support().lower;
  if (!lim.lower_divergent) {
    if (c < 0.0)
      throw RangeError(
          Boundary::Lower,
          "family: negative c with a finite lower potential limit; swap the "
          "player labels and use -c");
    if (c > 0.0) theta1 = hp.invert(lim.lower + c);
  }
  return finish_family(std::move(hp), c, theta1);
}

EquilibriumFamily make_family_theta1(TypeDistribution dist, double delta,
                                     double theta1) {
  HazardPotential hp(std::move(dist), delta);
  const auto& lim = hp.limits();
  const Support& s = hp.dist().support();
  if (!(theta1 >= s.lower) || !(theta1 < s.upper))
    throw RangeError(Boundary::Lower,
                     "family: theta1 outside [support lower, support upper)");
  if (lim.lower_divergent) {
    if (theta1 > s.lower)
      throw RangeError(
          Boundary::Lower,
          "family: the divergent lower potential limit pins theta1 to the "
          "support lower end; index this family by c instead");
    return finish_family(std::move(hp), 0.0, s.lower);
  }
  const double c = theta1 == s.lower ? 0.0 : hp.value(theta1) - lim.lower;
  return finish_family(std::move(hp), c, theta1);
}

// ---------------------------------------------------------------------------
// TypeMap

void TypeMap::build_interp() {
  std::vector<double> gx, gy;
  gx.reserve(grid_.size());
  gy.reserve(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!gy.empty() && !(values_[i] > gy.back())) continue;
    gx.push_back(grid_[i]);
    gy.push_back(values_[i]);
  }
  if (gx.size() >= 2) {
    interp_ = num::MonotoneCubic(gx, gy);
    inverse_interp_ = num::MonotoneCubic(gy, gx);
  }
}

TypeMap TypeMap::from_inversion(EquilibriumFamily fam,
                                std::vector<double> grid) {
  check_grid(grid);
  TypeMap map(std::move(fam), Source::Inversion);
  const auto& f = map.fam_;
  const bool closed = f.hp.closed_form();
  map.values_.reserve(grid.size());
  map.lambda_grid_.reserve(grid.size());

  // potential values along the grid, accumulated segment by segment when
  // there is no closed form
  double lam = f.hp.value(grid.front());
  map.lambda_grid_.push_back(lam);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (closed) {
      lam = f.hp.value(grid[i]);
    } else {
      lam += num::integrate([&](double x) { return f.hp.integrand(x); },
                            grid[i - 1], grid[i], 1e-13);
    }
    map.lambda_grid_.push_back(lam);
  }

  double prev_k = f.dist().support().lower;
  std::optional<HazardPotential::Anchor> anchor;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double k = f.hp.invert(map.lambda_grid_[i] - f.c, prev_k,
                                 std::max(prev_k, grid[i]), anchor);
    map.values_.push_back(k);
    prev_k = k;
    anchor = HazardPotential::Anchor{k, map.lambda_grid_[i] - f.c};
  }
  map.grid_ = std::move(grid);
  map.last_valid_ = map.grid_.back();
  return map;
}

TypeMap TypeMap::from_ode(EquilibriumFamily fam, double theta_start,
                          double k_start, std::vector<double> grid) {
  check_grid(grid);
  const Support& s = fam.dist().support();
  if (!s.contains(theta_start) || !s.contains_closed(k_start))
    throw DomainError("from_ode: start point outside the support");

  const TypeDistribution dist = fam.dist();
  const double delta = fam.delta();
  auto rhs = [&dist, delta](double th, double k) -> double {
    if (!dist.support().contains(k))
      return std::numeric_limits<double>::quiet_NaN();
    return k * dist.damped_survivor(k, delta) / dist.pdf(k) * dist.pdf(th) /
           (th * dist.damped_survivor(th, delta));
  };

  std::vector<double> below, above;
  for (double th : grid)
    (th < theta_start ? below : above).push_back(th);
  std::reverse(below.begin(), below.end());

  TypeMap map(std::move(fam), Source::Ode);
  num::OdeTrace back_tr, fwd_tr;
  if (!below.empty())
    back_tr = num::integrate_ode(rhs, theta_start, k_start, below);
  if (!above.empty())
    fwd_tr = num::integrate_ode(rhs, theta_start, k_start, above);

  for (auto it = back_tr.x.rbegin(); it != back_tr.x.rend(); ++it)
    map.grid_.push_back(*it);
  for (auto it = back_tr.y.rbegin(); it != back_tr.y.rend(); ++it)
    map.values_.push_back(*it);
  map.grid_.insert(map.grid_.end(), fwd_tr.x.begin(), fwd_tr.x.end());
  map.values_.insert(map.values_.end(), fwd_tr.y.begin(), fwd_tr.y.end());

  map.truncated_ = back_tr.truncated || fwd_tr.truncated;
  map.last_valid_ =
      fwd_tr.truncated ? fwd_tr.last_x
                       : (map.grid_.empty() ? theta_start : map.grid_.back());
  if (map.grid_.size() < 2)
    throw std::runtime_error("from_ode: integration collapsed immediately");
  map.build_interp();
  return map;
}

TypeMap TypeMap::from_direct(EquilibriumFamily fam, std::vector<double> grid,
                             std::function<double(double)> eval,
                             std::function<double(double)> inverse_eval) {
  check_grid(grid);
  TypeMap map(std::move(fam), Source::Direct);
  map.direct_ = std::move(eval);
  map.direct_inv_ = std::move(inverse_eval);
  map.values_.reserve(grid.size());
  for (double th : grid) map.values_.push_back(map.direct_(th));
  map.grid_ = std::move(grid);
  map.last_valid_ = map.grid_.back();
  return map;
}

TypeMap TypeMap::with_values(std::vector<double> values) const {
  if (values.size() != grid_.size())
    throw std::invalid_argument("with_values: size mismatch");
  TypeMap map(fam_, Source::Ode);
  map.grid_ = grid_;
  map.values_ = std::move(values);
  map.truncated_ = truncated_;
  map.last_valid_ = last_valid_;
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < map.values_.size(); ++i)
    if (!(map.values_[i] < map.values_[i + 1])) monotone = false;
  if (monotone) map.build_interp();
  return map;
}

double TypeMap::operator()(double theta) const {
  switch (source_) {
    case Source::Inversion:
      try {
        return fam_.hp.invert(fam_.hp.value(theta) - fam_.c);
      } catch (const RangeError& e) {
        throw RangeError(e.boundary(),
                         std::string("partner type out of support beyond the ") +
                             to_string(e.boundary()) + " boundary");
      }
    case Source::Direct:
      return direct_(theta);
    case Source::Ode:
      if (interp_.empty())
        throw std::logic_error("TypeMap: no interpolant available");
      return interp_(theta);
  }
  return 0.0;
}

double TypeMap::inverse(double theta2) const {
  switch (source_) {
    case Source::Inversion:
      try {
        return fam_.hp.invert(fam_.hp.value(theta2) + fam_.c);
      } catch (const RangeError& e) {
        throw RangeError(e.boundary(),
                         std::string("partner type out of support beyond the ") +
                             to_string(e.boundary()) + " boundary");
      }
    case Source::Direct:
      return direct_inv_(theta2);
    case Source::Ode:
      if (inverse_interp_.empty())
        throw std::logic_error("TypeMap: no interpolant available");
      return inverse_interp_(theta2);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// strategy curves

double StrategyCurve::max_finite() const {
  for (auto it = stop.rbegin(); it != stop.rend(); ++it)
    if (std::isfinite(*it)) return *it;
  return 0.0;
}

namespace {

// evaluate k(t) inside quadrature segment i of an inversion-sourced map,
// bracketed and anchored by the segment's endpoint values
double map_point(const TypeMap& map, double t, std::size_t seg, double k_lo,
                 double k_hi) {
  if (map.source() != TypeMap::Source::Inversion) return map(t);
  const auto& f = map.family();
  const double node = map.grid()[seg];
  const double lam_node = map.lambda_grid()[seg];
  double lam_t;
  if (f.hp.closed_form())
    lam_t = f.hp.value(t);
  else
    lam_t = lam_node + num::integrate(
                           [&](double x) { return f.hp.integrand(x); }, node,
                           t, 1e-13);
  return f.hp.invert(lam_t - f.c, k_lo, k_hi,
                     HazardPotential::Anchor{k_hi, lam_node - f.c});
}

StrategyCurve make_curve(std::vector<double> thetas, std::vector<double> stops,
                         double zero_cutoff, double forever) {
  StrategyCurve c;
  c.theta = std::move(thetas);
  c.stop = std::move(stops);
  c.zero_cutoff = zero_cutoff;
  c.forever_threshold = forever;

  std::vector<double> ix, iy;
  ix.reserve(c.theta.size());
  iy.reserve(c.theta.size());
  for (std::size_t i = 0; i < c.theta.size(); ++i) {
    if (!std::isfinite(c.stop[i])) break;
    if (!iy.empty() && !(c.stop[i] > iy.back())) continue;
    ix.push_back(c.theta[i]);
    iy.push_back(c.stop[i]);
  }
  auto interp = std::make_shared<num::MonotoneCubic>();
  if (ix.size() >= 2) *interp = num::MonotoneCubic(std::move(ix), std::move(iy));
  const double top = interp->empty() ? zero_cutoff : interp->x_back();
  c.eval = [interp, zero_cutoff, forever, top](double t) -> double {
    if (t >= forever) return kInf;
    if (t <= zero_cutoff) return 0.0;
    if (interp->empty()) return 0.0;
    if (t >= top) return interp->y_back();
    return (*interp)(t);
  };
  return c;
}

}  // namespace

StrategyCurve sigma1_from_map(const TypeMap& map) {
  const auto& fam = map.family();
  const TypeDistribution& dist = fam.dist();
  const double delta = fam.delta();
  const auto& grid = map.grid();
  const auto& kv = map.values();
  for (std::size_t i = 0; i + 1 < kv.size(); ++i)
    if (!(kv[i] < kv[i + 1]))
      throw std::invalid_argument("sigma1_from_map: map is not monotone");

  std::vector<double> thetas, stops;
  thetas.reserve(grid.size() + 1);
  stops.reserve(grid.size() + 1);
  thetas.push_back(fam.theta1_zero);
  stops.push_back(0.0);

  double acc = 0.0;
  double prev_t = fam.theta1_zero;
  double prev_k = dist.support().lower;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const double k_hi = kv[i];
    const double k_lo = prev_k;
    acc += num::integrate(
        [&](double x) {
          const double k = map_point(map, x, i, k_lo, k_hi);
          return k * dist.pdf(x) / dist.damped_survivor(x, delta);
        },
        prev_t, t, 1e-12);
    thetas.push_back(t);
    stops.push_back(acc);
    prev_t = t;
    prev_k = k_hi;
  }
  return make_curve(std::move(thetas), std::move(stops), fam.theta1_zero,
                    fam.p1_upper);
}

StrategyCurve sigma2_from_map(const TypeMap& map, const StrategyCurve& sigma1) {
  const auto& fam = map.family();
  if (sigma1.theta.size() != map.grid().size() + 1 ||
      sigma1.zero_cutoff != fam.theta1_zero)
    throw std::invalid_argument(
        "sigma2_from_map: sigma1 was not built from this map");
  const double lower = fam.dist().support().lower;

  std::vector<double> thetas, stops;
  thetas.reserve(map.values().size() + 1);
  stops.reserve(map.values().size() + 1);
  thetas.push_back(lower);
  stops.push_back(0.0);
  for (std::size_t i = 0; i < map.values().size(); ++i) {
    thetas.push_back(map.values()[i]);
    stops.push_back(sigma1.stop[i + 1]);
  }

  // evaluation goes through the monotone-cubic interpolant: it is free of
  // root-finding jitter, which the payoff quadratures downstream depend on
  return make_curve(std::move(thetas), std::move(stops), lower,
                    fam.p2_forever);
}

// ---------------------------------------------------------------------------
// closed-form families

namespace {

double uniform_sigma(double gamma, double theta) {
  if (std::abs(gamma - 1.0) < 1e-6) return -theta - std::log1p(-theta);
  return -std::log1p(theta * (gamma - 1.0)) / (gamma - 1.0) -
         std::log1p(-theta);
}

}  // namespace

double closed_form(const ClosedFamily& fam, double theta, int player) {
  if (player != 1 && player != 2)
    throw std::invalid_argument("closed_form: player must be 1 or 2");
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExpGamma>) {
          if (!(f.gamma > 0.0) || !(f.lambda > 0.0))
            throw std::invalid_argument("closed_form: bad ExpGamma parameters");
          if (!(theta >= 0.0))
            throw DomainError("closed_form: type outside support");
          const double g = player == 1 ? f.gamma : 1.0 / f.gamma;
          return f.lambda * g * theta * theta / 2.0;
        } else if constexpr (std::is_same_v<T, UniformGamma>) {
          if (!(f.gamma > 0.0))
            throw std::invalid_argument("closed_form: bad UniformGamma gamma");
          if (!(theta >= 0.0 && theta < 1.0))
            throw DomainError("closed_form: type outside support");
          const double g = player == 1 ? f.gamma : 1.0 / f.gamma;
          return uniform_sigma(g, theta);
        } else {
          if (!(f.theta_min > 0.0) || !(f.alpha > 0.0) ||
              !(f.theta1 >= f.theta_min))
            throw std::invalid_argument(
                "closed_form: bad ParetoTheta1 parameters");
          if (!(theta >= f.theta_min))
            throw DomainError("closed_form: type outside support");
          const double rho =
              (f.theta1 - f.theta_min) / (f.theta1 * f.theta_min);
          if (rho < 1e-9 / f.theta_min)  // theta1 at the lower end: symmetric
            return f.alpha * (theta - f.theta_min);
          const double scale = f.alpha / rho;
          const double denom0 = 1.0 + f.theta1 * rho;
          if (player == 1) {
            if (theta < f.theta1) return 0.0;
            return scale * std::log((1.0 + theta * rho) / denom0);
          }
          if (theta >= 1.0 / rho) return kInf;
          return scale * -std::log((1.0 - theta * rho) * denom0);
        }
      },
      fam);
}

double closed_family_constant(const ClosedFamily& fam) {
  return std::visit(
      [](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExpGamma>)
          return -f.lambda * std::log(f.gamma);
        else if constexpr (std::is_same_v<T, UniformGamma>)
          return -std::log(f.gamma);
        else
          return f.alpha * (1.0 / f.theta_min - 1.0 / f.theta1);
      },
      fam);
}

namespace {

EquilibriumFamily closed_family_to_family(const ClosedFamily& fam) {
  return std::visit(
      [](const auto& f) -> EquilibriumFamily {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExpGamma>)
          return make_family(TypeDistribution::exponential(f.lambda), 1.0,
                             -f.lambda * std::log(f.gamma));
        else if constexpr (std::is_same_v<T, UniformGamma>)
          return make_family(TypeDistribution::uniform01(), 1.0,
                             -std::log(f.gamma));
        else
          return make_family_theta1(
              TypeDistribution::pareto(f.theta_min, f.alpha), 1.0, f.theta1);
      },
      fam);
}

}  // namespace

TypeMap closed_form_map(const ClosedFamily& fam, std::vector<double> grid) {
  EquilibriumFamily ef = closed_family_to_family(fam);
  std::function<double(double)> eval, inv;
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExpGamma>) {
          const double g = f.gamma;
          eval = [g](double th) { return g * th; };
          inv = [g](double t2) { return t2 / g; };
        } else if constexpr (std::is_same_v<T, UniformGamma>) {
          const double g = f.gamma;
          eval = [g](double th) { return g * th / (1.0 + th * (g - 1.0)); };
          inv = [g](double t2) { return t2 / (g - t2 * (g - 1.0)); };
        } else {
          const double rho =
              (f.theta1 - f.theta_min) / (f.theta1 * f.theta_min);
          eval = [rho](double th) { return th / (1.0 + th * rho); };
          inv = [rho](double t2) { return t2 / (1.0 - t2 * rho); };
        }
      },
      fam);
  return TypeMap::from_direct(std::move(ef), std::move(grid), std::move(eval),
                              std::move(inv));
}

StrategyCurve closed_form_curve(const ClosedFamily& fam, int player,
                                std::vector<double> grid) {
  check_grid(grid);
  EquilibriumFamily ef = closed_family_to_family(fam);
  StrategyCurve c;
  c.zero_cutoff = player == 1 ? ef.theta1_zero : ef.dist().support().lower;
  c.forever_threshold = player == 1 ? ef.p1_upper : ef.p2_forever;
  c.theta = std::move(grid);
  c.stop.reserve(c.theta.size());
  for (double t : c.theta) c.stop.push_back(closed_form(fam, t, player));
  const ClosedFamily f = fam;
  const double cutoff = c.zero_cutoff;
  const double forever = c.forever_threshold;
  c.eval = [f, player, cutoff, forever](double t) -> double {
    if (t >= forever) return kInf;
    if (t <= cutoff) return 0.0;
    return closed_form(f, t, player);
  };
  return c;
}

// ---------------------------------------------------------------------------
// admissibility

AdmissibilityReport check_admissible(const TypeMap& map) {
  AdmissibilityReport rep;
  const auto& fam = map.family();
  const TypeDistribution& dist = fam.dist();
  const double delta = fam.delta();
  const auto& grid = map.grid();
  const auto& kv = map.values();

  rep.strictly_increasing = true;
  for (std::size_t i = 0; i + 1 < kv.size(); ++i)
    if (!(kv[i] < kv[i + 1])) rep.strictly_increasing = false;
  if (!rep.strictly_increasing) return rep;

  // (ii) ODE residual by central differences on interior grid points
  rep.ode_satisfied = true;
  const std::size_t lo = 2, hi = grid.size() > 4 ? grid.size() - 2 : 2;
  const std::size_t stride = std::max<std::size_t>(1, (hi - lo) / 64);
  try {
    for (std::size_t i = lo; i < hi; i += stride) {
      const double th = grid[i];
      double h = 6e-6 * std::max(1.0, std::abs(th));
      h = std::min(h, 0.5 * (th - fam.theta1_zero));
      if (fam.p1_upper < kInf) h = std::min(h, 0.5 * (fam.p1_upper - th));
      if (map.source() == TypeMap::Source::Ode)
        h = std::min(h, std::min(th - grid.front(), grid.back() - th));
      if (!(h > 0.0)) continue;
      const double k = map(th);
      const double kp = (map(th + h) - map(th - h)) / (2.0 * h);
      const double rhs = k * dist.damped_survivor(k, delta) / dist.pdf(k) *
                         dist.pdf(th) / (th * dist.damped_survivor(th, delta));
      const double resid = std::abs(kp - rhs);
      rep.max_ode_residual = std::max(rep.max_ode_residual, resid);
      if (resid > 1e-6 * (1.0 + std::abs(rhs))) rep.ode_satisfied = false;
    }
  } catch (const std::exception&) {
    rep.ode_satisfied = false;
  }

  // (iii) k -> support lower end at theta1_zero, Richardson-style
  const double theta_low = fam.theta1_zero;
  const double support_low = dist.support().lower;
  try {
    const double s = 1e-4 * std::max(1.0, theta_low);
    double p1 = theta_low + 0.5 * s;
    if (map.source() == TypeMap::Source::Ode)
      p1 = std::max(p1, grid.front());
    const double p2 = theta_low + 2.0 * (p1 - theta_low);
    const double extrap = 2.0 * map(p1) - map(p2);
    rep.boundary_gap = std::abs(extrap - support_low);
    rep.lower_boundary = rep.boundary_gap <= 1e-6 * (1.0 + support_low);
  } catch (const std::exception&) {
    rep.lower_boundary = false;
  }

  // (iv) finite sigma1 on interior grid points
  try {
    const StrategyCurve s1 = sigma1_from_map(map);
    rep.sigma_finite = true;
    for (std::size_t i = 1; i + 1 < s1.stop.size(); ++i)
      if (!std::isfinite(s1.stop[i])) rep.sigma_finite = false;
  } catch (const std::exception&) {
    rep.sigma_finite = false;
  }
  return rep;
}

std::vector<double> strategy_grid(const EquilibriumFamily& fam, int n,
                                  double tail) {
  if (n < 8) throw std::invalid_argument("strategy_grid: n too small");
  const TypeDistribution& dist = fam.dist();
  const double base = fam.theta1_zero;
  double hi = dist.effective_upper(tail);
  if (fam.p1_upper < kInf)
    hi = std::min(hi, base + (fam.p1_upper - base) * 0.999999);
  if (!(hi > base))
    throw RangeError(Boundary::Upper, "strategy_grid: empty active range");

  const double u_max = hi - base;
  const double u_min = u_max * 1e-8;
  const double u_mid = u_max * 0.3;
  const int n1 = n / 2, n2 = n - n1;

  std::vector<double> pts = num::log_spaced_offsets(base, u_min, u_mid, n1);
  const double p_lo = dist.cdf(base + u_mid);
  const double p_hi = dist.cdf(hi);
  for (int i = 1; i <= n2; ++i) {
    const double p = p_lo + (p_hi - p_lo) * i / n2;
    pts.push_back(dist.quantile(p));
  }
  pts.back() = hi;
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  out.reserve(pts.size());
  for (double p : pts)
    if (out.empty() || p > out.back()) out.push_back(p);
  return out;
}

}  // namespace attrition
