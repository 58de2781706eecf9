#include "attrition/hazard_potential.hpp"

#include <cmath>
#include <optional>

#include "attrition/numerics.hpp"

namespace attrition {

namespace {
constexpr double kEvalTol = 1e-10;   // spec tolerance for value()
constexpr double kStepTol = 1e-13;   // per-segment tolerance inside invert()
constexpr double kHugeTheta = 1e300;
}  // namespace

HazardPotential::HazardPotential(TypeDistribution dist, double delta)
    : HazardPotential(dist, dist.median(), delta) {}

HazardPotential::HazardPotential(TypeDistribution dist, double reference,
                                 double delta)
    : dist_(std::move(dist)), reference_(reference), delta_(delta) {
  if (!(delta_ >= 0.0 && delta_ <= 1.0))
    throw std::invalid_argument("HazardPotential: delta must be in [0,1]");
  if (!dist_.support().contains(reference_))
    throw DomainError("HazardPotential: reference not in the open support");
  clamp_lo_ = dist_.quantile(1e-12);
  clamp_hi_ = dist_.effective_upper(1e-12);
  limits_ = compute_limits();
}

double HazardPotential::integrand(double x) const {
  return dist_.pdf(x) / (x * dist_.damped_survivor(x, delta_));
}

bool HazardPotential::has_closed_form() const {
  using F = TypeDistribution::Family;
  switch (dist_.family()) {
    case F::Exponential:
    case F::Pareto:
      return delta_ == 1.0;
    case F::Uniform01:
      return true;
    case F::Tabulated:
      return false;
  }
  return false;
}

double HazardPotential::closed_value(double theta) const {
  using F = TypeDistribution::Family;
  switch (dist_.family()) {
    case F::Exponential:
      return dist_.lambda() * std::log(theta / reference_);
    case F::Pareto:
      return dist_.alpha() * (1.0 / reference_ - 1.0 / theta);
    case F::Uniform01:
      return std::log(theta / (1.0 - delta_ * theta)) -
             std::log(reference_ / (1.0 - delta_ * reference_));
    case F::Tabulated:
      break;
  }
  throw std::logic_error("closed_value: no closed form");
}

double HazardPotential::quad(double a, double b, double tol) const {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  const double base = dist_.support().lower;
  const double chunk_tol = std::max(tol / 48.0, 1e-14);
  double sum = 0.0, x = a;
  for (int guard = 0; x < b && guard < 4000; ++guard) {
    double next = base + 2.0 * (x - base);
    if (!(next > x) || next >= b) next = b;
    sum += num::integrate([this](double t) { return integrand(t); }, x, next,
                          chunk_tol);
    x = next;
  }
  return sign * sum;
}

double HazardPotential::value(double theta) const {
  if (!dist_.support().contains(theta))
    throw DomainError("hazard potential: point outside the open support");
  if (theta == reference_) return 0.0;
  if (has_closed_form()) return closed_value(theta);
  const double t = std::clamp(theta, clamp_lo_, clamp_hi_);
  return quad(reference_, t, kEvalTol);
}

PotentialLimits HazardPotential::compute_limits() const {
  using F = TypeDistribution::Family;
  const Support& s = dist_.support();
  PotentialLimits lim;
  switch (dist_.family()) {
    case F::Exponential:
      // density positive at 0, so the integrand behaves like lambda/x there
      lim.lower = -kInf;
      lim.lower_divergent = true;
      if (delta_ == 1.0) {
        lim.upper = kInf;
        lim.upper_divergent = true;
      } else {
        lim.upper_divergent = false;
        lim.upper = value(clamp_hi_);
      }
      return lim;
    case F::Uniform01:
      lim.lower = -kInf;
      lim.lower_divergent = true;
      if (delta_ == 1.0) {
        lim.upper = kInf;
        lim.upper_divergent = true;
      } else {
        lim.upper_divergent = false;
        lim.upper = std::log(1.0 / (1.0 - delta_)) -
                    std::log(reference_ / (1.0 - delta_ * reference_));
      }
      return lim;
    case F::Pareto:
      lim.lower_divergent = false;
      lim.upper_divergent = false;
      if (delta_ == 1.0) {
        lim.lower = dist_.alpha() * (1.0 / reference_ - 1.0 / s.lower);
        lim.upper = dist_.alpha() / reference_;
      } else {
        lim.lower = quad(reference_, s.lower, kEvalTol);
        lim.upper = value(clamp_hi_);
      }
      return lim;
    case F::Tabulated: {
      if (delta_ == 1.0) return probe_limits();
      PotentialLimits probed = probe_limits();
      // upper limit is finite for delta < 1 by the 1/(ref*(1-delta)) bound
      lim.lower = probed.lower;
      lim.lower_divergent = probed.lower_divergent;
      lim.upper_divergent = false;
      lim.upper = quad(reference_, s.upper, kEvalTol);
      return lim;
    }
  }
  return lim;
}

PotentialLimits HazardPotential::probe_limits(const ProbeConfig& cfg) const {
  const Support& s = dist_.support();
  PotentialLimits lim;

  auto probe = [&](Boundary end) {
    double x = reference_;
    double lam = 0.0;
    double last_increment = kInf;
    const double clamp = end == Boundary::Lower ? clamp_lo_ : clamp_hi_;
    for (int k = 0; k < cfg.refinements; ++k) {
      double x_next;
      if (end == Boundary::Lower) {
        x_next = s.lower + 0.5 * (x - s.lower);
        if (x_next <= clamp) break;
      } else if (s.bounded_above()) {
        x_next = s.upper - 0.5 * (s.upper - x);
        if (x_next >= clamp) break;
      } else {
        x_next = s.lower + 2.0 * (x - s.lower);
        if (x_next >= clamp) break;
      }
      const double seg = quad(x, x_next, kStepTol);
      lam += seg;
      last_increment = std::abs(seg);
      x = x_next;
    }
    const bool divergent = last_increment > cfg.increment_tol;
    if (divergent) return std::pair{end == Boundary::Lower ? -kInf : kInf, true};
    // extend the finite tail to the quantile clamp for a sharper value
    lam += quad(x, clamp, kStepTol);
    return std::pair{lam, false};
  };

  auto [lo, lo_div] = probe(Boundary::Lower);
  auto [hi, hi_div] = probe(Boundary::Upper);
  lim.lower = lo;
  lim.lower_divergent = lo_div;
  lim.upper = hi;
  lim.upper_divergent = hi_div;
  return lim;
}

bool HazardPotential::closed_form() const { return has_closed_form(); }

double HazardPotential::invert(double y) const {
  return invert(y, reference_, reference_);
}

double HazardPotential::invert(double y, double hint_lo, double hint_hi,
                               std::optional<Anchor> anchor) const {
  if (!limits_.lower_divergent && y <= limits_.lower)
    throw RangeError(Boundary::Lower,
                     "invert: value at or below the lower potential limit");
  if (!limits_.upper_divergent && y >= limits_.upper)
    throw RangeError(Boundary::Upper,
                     "invert: value at or above the upper potential limit");
  if (y == 0.0) return reference_;

  const Support& s = dist_.support();
  const bool closed = has_closed_form();
  const double floor_x =
      closed ? s.lower + (reference_ - s.lower) * 1e-308 : clamp_lo_;
  double cap_x;
  if (s.bounded_above())
    cap_x = closed ? std::nextafter(s.upper, s.lower) : clamp_hi_;
  else
    cap_x = closed ? kHugeTheta : clamp_hi_;

  // incremental evaluation: track one anchor with a known potential value
  double ax = reference_, alam = 0.0;
  if (anchor) {
    ax = anchor->x;
    alam = anchor->lambda;
  }
  auto eval_at = [&](double x) {
    if (closed) return closed_value(x);
    if (x == ax) return alam;
    alam += quad(ax, x, kStepTol);
    ax = x;
    return alam;
  };

  double lo = std::clamp(std::min(hint_lo, hint_hi), floor_x, cap_x);
  double hi = std::clamp(std::max(hint_lo, hint_hi), floor_x, cap_x);
  double flo = eval_at(lo);
  double fhi = lo == hi ? flo : eval_at(hi);

  // geometric expansion toward whichever end is needed
  for (int k = 0; flo > y; ++k) {
    if (lo <= floor_x || k > 2100) {
      if (limits_.lower_divergent) return floor_x;  // boundary saturation
      throw RangeError(Boundary::Lower, "invert: lower bracket exhausted");
    }
    hi = lo;
    fhi = flo;
    lo = std::max(floor_x, s.lower + 0.5 * (lo - s.lower));
    flo = eval_at(lo);
  }
  for (int k = 0; fhi < y; ++k) {
    if (hi >= cap_x || k > 2100) {
      if (limits_.upper_divergent) {
        if (!closed) return cap_x;  // boundary saturation
        throw RangeError(Boundary::Upper,
                         "invert: value beyond the representable range");
      }
      throw RangeError(Boundary::Upper, "invert: upper bracket exhausted");
    }
    lo = hi;
    flo = fhi;
    if (s.bounded_above())
      hi = std::min(cap_x, s.upper - 0.5 * (s.upper - hi));
    else
      hi = std::min(cap_x, s.lower + 2.0 * (hi - s.lower));
    fhi = eval_at(hi);
  }
  if (flo == y) return lo;
  if (fhi == y) return hi;

  // residual budget split between the solve and the incremental drift
  return num::solve_increasing(eval_at, lo, hi, y, 5e-11);
}

MultiplicityCase classify_case(const HazardPotential& hp) {
  if (hp.delta() != 1.0)
    throw std::invalid_argument(
        "classify_case: defined for the unperturbed potential (delta = 1)");
  return hp.limits().lower_divergent ? MultiplicityCase::A
                                     : MultiplicityCase::B;
}

}  // namespace attrition
