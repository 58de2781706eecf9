#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace attrition {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Open interval of types (lower, upper); upper may be +inf, lower is finite.
struct Support {
  double lower = 0.0;
  double upper = kInf;

  bool bounded_above() const { return upper < kInf; }
  bool contains(double x) const { return x > lower && x < upper; }
  bool contains_closed(double x) const { return x >= lower && x <= upper; }
  double width() const { return upper - lower; }
};

enum class MultiplicityCase { A, B };
enum class Boundary { Lower, Upper };

inline const char* to_string(MultiplicityCase c) {
  return c == MultiplicityCase::A ? "A" : "B";
}
inline const char* to_string(Boundary b) {
  return b == Boundary::Lower ? "lower" : "upper";
}

/// Evaluation point outside the distribution support (or too close to it).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested value lies outside the reachable range; remembers which end.
class RangeError : public std::range_error {
 public:
  RangeError(Boundary b, const std::string& what)
      : std::range_error(what), boundary_(b) {}
  Boundary boundary() const { return boundary_; }

 private:
  Boundary boundary_;
};

}  // namespace attrition
