#include "attrition/numerics.hpp"

#include <cmath>

namespace attrition::num {

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size() || x_.size() < 2)
    throw std::invalid_argument("MonotoneCubic: need two or more points");
  const std::size_t n = x_.size();
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dx = x_[i + 1] - x_[i];
    const double dy = y_[i + 1] - y_[i];
    if (dx <= 0.0 || dy <= 0.0)
      throw std::invalid_argument("MonotoneCubic: data not strictly increasing");
    d[i] = dy / dx;
  }
  m_.resize(n);
  m_[0] = d[0];
  m_[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i)
    m_[i] = 2.0 / (1.0 / d[i - 1] + 1.0 / d[i]);
}

std::size_t MonotoneCubic::cell(double x) const {
  if (x <= x_.front()) return 0;
  if (x >= x_.back()) return x_.size() - 2;
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double MonotoneCubic::operator()(double x) const {
  const std::size_t i = cell(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return y_[i] * (2 * t3 - 3 * t2 + 1) + h * m_[i] * (t3 - 2 * t2 + t) +
         y_[i + 1] * (-2 * t3 + 3 * t2) + h * m_[i + 1] * (t3 - t2);
}

double MonotoneCubic::derivative(double x) const {
  const std::size_t i = cell(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t;
  return y_[i] * (6 * t2 - 6 * t) / h + m_[i] * (3 * t2 - 4 * t + 1) +
         y_[i + 1] * (-6 * t2 + 6 * t) / h + m_[i + 1] * (3 * t2 - 2 * t);
}

double MonotoneCubic::inverse(double y) const {
  if (y <= y_.front()) return x_.front();
  if (y >= y_.back()) return x_.back();
  auto it = std::upper_bound(y_.begin(), y_.end(), y);
  const std::size_t i = static_cast<std::size_t>(it - y_.begin()) - 1;
  double lo = x_[i], hi = x_[i + 1];
  // plain bisection inside the cell; the cubic is strictly increasing there
  for (int k = 0; k < 90; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((*this)(mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 2) return {a};
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  out.back() = b;
  return out;
}

std::vector<double> log_spaced_offsets(double base, double u_min, double u_max,
                                       int n) {
  if (u_min <= 0.0 || u_max <= u_min)
    throw std::invalid_argument("log_spaced_offsets: bad offset range");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  const double l0 = std::log(u_min), l1 = std::log(u_max);
  for (int i = 0; i < n; ++i) {
    const double t = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
    out.push_back(base + std::exp(l0 + (l1 - l0) * t));
  }
  return out;
}

}  // namespace attrition::num
