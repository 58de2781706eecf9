#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace attrition::num {

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kGK15Weights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double kG7Weights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
void gk15(F&& f, double a, double b, double& value, double& error,
          double& noise_floor) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kGK15Nodes[i]);
    fv[14 - i] = f(c + h * kGK15Nodes[i]);
  }
  fv[7] = f(c);
  double kron = 0.0, resabs = 0.0;
  double fmin = fv[0], fmax = fv[0];
  for (int i = 0; i < 15; ++i) {
    fmin = std::min(fmin, fv[i]);
    fmax = std::max(fmax, fv[i]);
  }
  for (int i = 0; i < 7; ++i) {
    kron += kGK15Weights[i] * (fv[i] + fv[14 - i]);
    resabs += kGK15Weights[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
  }
  kron += kGK15Weights[7] * fv[7];
  resabs += kGK15Weights[7] * std::abs(fv[7]);
  double gauss = kG7Weights[3] * fv[7];
  for (int i = 0; i < 3; ++i)
    gauss += kG7Weights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  const double mean = kron * 0.5;
  double resasc = kGK15Weights[7] * std::abs(fv[7] - mean);
  for (int i = 0; i < 7; ++i)
    resasc += kGK15Weights[i] *
              (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
  value = kron * h;
  const double ah = std::abs(h);
  resasc *= ah;
  double err = std::abs((kron - gauss) * h);
  // QUADPACK scaling: the raw |K-G| gap badly overstates the Kronrod error
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  // irreducible error: function-value rounding plus the node-placement
  // rounding (eps * |t| * f-variation), which dominates for steep
  // integrands near clamped singular endpoints far from zero
  constexpr double eps = 1.1e-16;
  noise_floor = 50.0 * eps * resabs * ah +
                eps * std::max(std::abs(a), std::abs(b)) * (fmax - fmin);
  error = std::max(err, noise_floor);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod quadrature of f over [a, b] to an absolute
/// tolerance. Segments get a tolerance share proportional to their length.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10,
                 int max_segments = 100000) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  struct Segment {
    double a, b;
    int depth;
  };
  std::vector<Segment> stack{{a, b, 0}};
  const double total_len = b - a;
  double sum = 0.0;
  int used = 0;
  while (!stack.empty()) {
    if (++used > max_segments)
      throw std::runtime_error("integrate: too many subdivisions");
    Segment s = stack.back();
    stack.pop_back();
    double v, e, floor;
    detail::gk15(f, s.a, s.b, v, e, floor);
    const double share = abs_tol * ((s.b - s.a) / total_len);
    const double mid = 0.5 * (s.a + s.b);
    // accept on tolerance, on hitting the rounding floor (subdividing a
    // noise-limited segment cannot improve it), or on exhausted width
    if (e <= share || e <= floor * (1.0 + 1e-12) || s.depth >= 52 ||
        mid <= s.a || mid >= s.b) {
      sum += v;
    } else {
      stack.push_back({s.a, mid, s.depth + 1});
      stack.push_back({mid, s.b, s.depth + 1});
    }
  }
  return sign * sum;
}

/// Root of f(x) = target for f increasing on [lo, hi]. Bisection with a
/// false-position (Illinois) acceleration step; converges once the residual
/// is within f_tol AND the bracket is tight relative to x (or the bracket
/// is exhausted at double precision).
template <class F>
double solve_increasing(F&& f, double lo, double hi, double target,
                        double f_tol = 1e-10, double x_rel = 1e-9,
                        int max_iter = 240) {
  double flo = f(lo) - target;
  double fhi = f(hi) - target;
  if (flo > 0.0 || fhi < 0.0)
    throw std::invalid_argument("solve_increasing: target not bracketed");
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  double best_x = std::abs(flo) < std::abs(fhi) ? lo : hi;
  double best_r = std::min(std::abs(flo), std::abs(fhi));
  bool use_secant = false;
  for (int it = 0; it < max_iter; ++it) {
    double x;
    if (use_secant && fhi > flo) {
      x = lo + (hi - lo) * (-flo) / (fhi - flo);
      const double margin = 0.01 * (hi - lo);
      x = std::clamp(x, lo + margin, hi - margin);
    } else {
      x = 0.5 * (lo + hi);
    }
    use_secant = !use_secant;
    if (x <= lo || x >= hi) break;  // bracket exhausted at double precision
    const double fx = f(x) - target;
    if (std::abs(fx) < best_r) {
      best_r = std::abs(fx);
      best_x = x;
    }
    if (std::abs(fx) <= f_tol &&
        hi - lo <= x_rel * (1.0 + std::abs(x)))
      return x;
    if (fx < 0.0) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
  }
  return best_x;
}

struct OdeOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0: derived from the first target gap
};

struct OdeTrace {
  std::vector<double> x;
  std::vector<double> y;
  bool truncated = false;
  double last_x = 0.0;
};

/// Scalar Dormand-Prince 5(4) integration that lands exactly on each target
/// abscissa. Targets must be strictly monotone, moving away from x0 in one
/// direction (backward integration is allowed). A right-hand side returning
/// a non-finite value rejects the step; when the step size collapses the
/// trace is truncated at the last reached target.
template <class RHS>
OdeTrace integrate_ode(RHS&& rhs, double x0, double y0,
                       std::span<const double> targets,
                       const OdeOptions& opt = {}) {
  OdeTrace trace;
  trace.last_x = x0;
  if (targets.empty()) return trace;
  const double dir = targets.back() > x0 ? 1.0 : -1.0;

  double x = x0, y = y0;
  std::size_t next = 0;
  if (targets[0] == x0) {
    trace.x.push_back(x0);
    trace.y.push_back(y0);
    next = 1;
  }
  if (next >= targets.size()) return trace;

  double h = opt.initial_step != 0.0
                 ? dir * std::abs(opt.initial_step)
                 : (targets[next] - x) / 16.0;
  if (h == 0.0) h = dir * 1e-8;

  auto try_rhs = [&](double xx, double yy, double& out) {
    out = rhs(xx, yy);
    return std::isfinite(out);
  };

  double k1;
  if (!try_rhs(x, y, k1)) {
    trace.truncated = true;
    return trace;
  }

  const int max_steps = 2000000;
  for (int step = 0; step < max_steps && next < targets.size(); ++step) {
    const double remaining = targets[next] - x;
    bool landing = false;
    if (std::abs(h) >= std::abs(remaining)) {
      h = remaining;
      landing = true;
    }
    const double h_min = std::max(std::abs(x), 1.0) * 1e-14;
    if (std::abs(h) < h_min && !landing) {
      trace.truncated = true;
      break;
    }

    double k2, k3, k4, k5, k6, k7;
    bool ok = try_rhs(x + h / 5, y + h * (k1 / 5), k2) &&
              try_rhs(x + 3 * h / 10, y + h * (3 * k1 / 40 + 9 * k2 / 40), k3) &&
              try_rhs(x + 4 * h / 5,
                      y + h * (44 * k1 / 45 - 56 * k2 / 15 + 32 * k3 / 9), k4) &&
              try_rhs(x + 8 * h / 9,
                      y + h * (19372 * k1 / 6561 - 25360 * k2 / 2187 +
                               64448 * k3 / 6561 - 212 * k4 / 729),
                      k5) &&
              try_rhs(x + h,
                      y + h * (9017 * k1 / 3168 - 355 * k2 / 33 +
                               46732 * k3 / 5247 + 49 * k4 / 176 -
                               5103 * k5 / 18656),
                      k6);
    double y5 = 0.0, y4 = 0.0;
    if (ok) {
      y5 = y + h * (35 * k1 / 384 + 500 * k3 / 1113 + 125 * k4 / 192 -
                    2187 * k5 / 6784 + 11 * k6 / 84);
      ok = try_rhs(x + h, y5, k7);
    }
    if (ok) {
      y4 = y + h * (5179 * k1 / 57600 + 7571 * k3 / 16695 + 393 * k4 / 640 -
                    92097 * k5 / 339200 + 187 * k6 / 2100 + k7 / 40);
    }
    if (!ok) {
      h *= 0.5;
      continue;
    }
    const double scale =
        opt.abs_tol + opt.rel_tol * std::max(std::abs(y), std::abs(y5));
    const double err = std::abs(y5 - y4) / scale;
    if (err <= 1.0) {
      x = landing ? targets[next] : x + h;
      y = y5;
      k1 = k7;  // first-same-as-last
      trace.last_x = x;
      if (landing) {
        trace.x.push_back(x);
        trace.y.push_back(y);
        ++next;
      }
    }
    const double factor =
        err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
  }
  if (next < targets.size()) trace.truncated = true;
  return trace;
}

/// C1 monotone piecewise-cubic Hermite interpolant of strictly increasing
/// data (harmonic-mean tangents, which keeps the derivative positive).
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double derivative(double x) const;
  double inverse(double y) const;

  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }
  double y_front() const { return y_.front(); }
  double y_back() const { return y_.back(); }
  bool empty() const { return x_.empty(); }

 private:
  std::size_t cell(double x) const;
  std::vector<double> x_, y_, m_;
};

std::vector<double> linspace(double a, double b, int n);
std::vector<double> log_spaced_offsets(double base, double u_min, double u_max,
                                       int n);

}  // namespace attrition::num
