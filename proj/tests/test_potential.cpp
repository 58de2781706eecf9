#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "attrition/hazard_potential.hpp"
#include "oracles.hpp"

using namespace attrition;

namespace {

std::vector<std::array<double, 2>> triangular_table() {
  std::vector<std::array<double, 2>> pts;
  for (int i = 0; i <= 32; ++i) {
    const double x = i / 32.0;
    const double F = x <= 0.5 ? 2.0 * x * x : 1.0 - 2.0 * (1.0 - x) * (1.0 - x);
    pts.push_back({x, F});
  }
  return pts;
}

double quad_oracle(const HazardPotential& hp, double theta) {
  return oracles::simpson([&](double x) { return hp.integrand(x); },
                          hp.reference(), theta, 1e-12);
}

}  // namespace

TEST_CASE("closed-form values") {
  HazardPotential exp1(TypeDistribution::exponential(1.0), 1.0, 1.0);
  CHECK(exp1.value(M_E) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(exp1.value(exp1.reference()) == 0.0);

  HazardPotential uni(TypeDistribution::uniform01(), 0.5, 1.0);
  CHECK(uni.value(0.75) == doctest::Approx(std::log(3.0)).epsilon(1e-13));
  CHECK(uni.value(0.75) == doctest::Approx(quad_oracle(uni, 0.75)).epsilon(1e-9));

  // differences are reference-free: pareto(1,1) has value(4)-value(2) = 1/4
  HazardPotential par(TypeDistribution::pareto(1.0, 1.0), 1.0);
  CHECK(par.value(4.0) - par.value(2.0) ==
        doctest::Approx(0.25).epsilon(1e-13));
  CHECK(par.value(4.0) ==
        doctest::Approx(quad_oracle(par, 4.0)).epsilon(1e-9));
}

TEST_CASE("quadrature path agrees with the oracle at delta < 1") {
  HazardPotential hp(TypeDistribution::exponential(1.0), 0.7);
  for (double th : {0.2, 0.8, 2.0, 5.0})
    CHECK(hp.value(th) == doctest::Approx(quad_oracle(hp, th)).epsilon(1e-8));
}

TEST_CASE("rejects bad construction") {
  CHECK_THROWS_AS(
      HazardPotential(TypeDistribution::pareto(1.0, 1.0), 1.0, 1.0),
      DomainError);  // reference on the boundary
  CHECK_THROWS_AS(HazardPotential(TypeDistribution::uniform01(), 0.5, 1.5),
                  std::invalid_argument);
  HazardPotential hp(TypeDistribution::uniform01(), 0.5, 1.0);
  CHECK_THROWS_AS(hp.value(1.0), DomainError);
}

TEST_CASE("inversion") {
  HazardPotential exp1(TypeDistribution::exponential(1.0), 1.0, 1.0);
  CHECK(exp1.invert(1.0) == doctest::Approx(M_E).epsilon(1e-11));
  CHECK(exp1.invert(0.0) == 1.0);

  HazardPotential par(TypeDistribution::pareto(1.0, 1.0), 2.0, 1.0);
  const double y = par.value(4.0);
  CHECK(par.invert(y) == doctest::Approx(4.0).epsilon(1e-8));
  // residual contract
  for (double yy : {-0.3, -0.05, 0.1, 0.2, 0.4}) {
    CHECK(std::abs(par.value(par.invert(yy)) - yy) <= 1e-10);
  }
}

TEST_CASE("inversion range errors name the boundary") {
  HazardPotential par(TypeDistribution::pareto(1.0, 1.0), 2.0, 1.0);
  const auto lim = par.limits();
  CHECK_THROWS_WITH_AS(par.invert(lim.upper + 0.1), doctest::Contains("upper"),
                       RangeError);
  try {
    par.invert(lim.lower - 0.1);
    FAIL("expected a range error");
  } catch (const RangeError& e) {
    CHECK(e.boundary() == Boundary::Lower);
  }
}

TEST_CASE("invert is the left inverse of value across deltas") {
  for (double delta : {1.0, 0.9, 0.5}) {
    for (const auto& d :
         {TypeDistribution::exponential(1.0), TypeDistribution::uniform01(),
          TypeDistribution::pareto(1.0, 1.0)}) {
      HazardPotential hp(d, delta);
      for (int i = 0; i < 500; ++i) {
        const double p = 0.01 + 0.98 * (i + 0.5) / 500.0;
        const double th = d.quantile(p);
        const double back = hp.invert(hp.value(th));
        CHECK(std::abs(back - th) <= 1e-8 * (1.0 + std::abs(th)));
      }
    }
  }
}

TEST_CASE("boundary limits match the closed-form analysis") {
  HazardPotential e(TypeDistribution::exponential(1.0), 1.0);
  CHECK(e.limits().lower_divergent);
  CHECK(e.limits().upper_divergent);
  CHECK(e.limits().lower == -kInf);
  CHECK(e.limits().upper == kInf);

  HazardPotential u(TypeDistribution::uniform01(), 1.0);
  CHECK(u.limits().lower_divergent);
  CHECK(u.limits().upper_divergent);

  HazardPotential p(TypeDistribution::pareto(1.0, 1.0), 2.0, 1.0);
  CHECK_FALSE(p.limits().lower_divergent);
  CHECK_FALSE(p.limits().upper_divergent);
  CHECK(p.limits().lower == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(p.limits().upper == doctest::Approx(0.5).epsilon(1e-12));

  // damped uniform: lower still diverges, upper becomes finite
  HazardPotential ud(TypeDistribution::uniform01(), 0.5, 0.5);
  CHECK(ud.limits().lower_divergent);
  CHECK_FALSE(ud.limits().upper_divergent);
  CHECK(ud.limits().upper == doctest::Approx(std::log(3.0)).epsilon(1e-10));
  const double oracle = oracles::simpson(
      [&](double x) { return ud.integrand(x); }, 0.5, 1.0 - 1e-12, 1e-12);
  CHECK(ud.limits().upper == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("numeric probe agrees with the closed forms") {
  for (const auto& d :
       {TypeDistribution::exponential(1.0), TypeDistribution::uniform01(),
        TypeDistribution::pareto(1.0, 1.0)}) {
    HazardPotential hp(d, 1.0);
    const auto probed = hp.probe_limits();
    CHECK(probed.lower_divergent == hp.limits().lower_divergent);
    CHECK(probed.upper_divergent == hp.limits().upper_divergent);
    if (!probed.lower_divergent)
      CHECK(probed.lower == doctest::Approx(hp.limits().lower).epsilon(1e-6));
  }
}

TEST_CASE("classification") {
  HazardPotential e(TypeDistribution::exponential(1.0), 1.0);
  HazardPotential u(TypeDistribution::uniform01(), 1.0);
  HazardPotential p(TypeDistribution::pareto(1.0, 1.0), 1.0);
  CHECK(classify_case(e) == MultiplicityCase::A);
  CHECK(classify_case(u) == MultiplicityCase::A);
  CHECK(classify_case(p) == MultiplicityCase::B);
  HazardPotential damped(TypeDistribution::uniform01(), 0.9);
  CHECK_THROWS_AS(classify_case(damped), std::invalid_argument);

  // tabulated triangular: density vanishes linearly at 0, so the
  // lower limit converges (case B) even though the support touches zero
  HazardPotential tri(TypeDistribution::tabulated(triangular_table()), 1.0);
  CHECK(classify_case(tri) == MultiplicityCase::B);
  CHECK(tri.limits().upper_divergent);
}

TEST_CASE("damped potential is nondecreasing in delta above the reference") {
  for (const auto& d :
       {TypeDistribution::exponential(1.0), TypeDistribution::uniform01(),
        TypeDistribution::pareto(1.0, 1.0)}) {
    const double ref = d.median();
    HazardPotential h1(d, ref, 0.5), h2(d, ref, 0.9), h3(d, ref, 1.0);
    for (int i = 1; i <= 20; ++i) {
      const double p = d.cdf(ref) + (0.99 - d.cdf(ref)) * i / 21.0;
      const double th = d.quantile(p);
      CHECK(h1.value(th) <= h2.value(th) + 1e-12);
      CHECK(h2.value(th) <= h3.value(th) + 1e-12);
    }
  }
}

TEST_CASE("bounded support keeps the damped upper limit finite") {
  for (double delta : {0.5, 0.9, 0.99}) {
    HazardPotential u(TypeDistribution::uniform01(), delta);
    CHECK_FALSE(u.limits().upper_divergent);
    CHECK(std::isfinite(u.limits().upper));
    HazardPotential t(TypeDistribution::tabulated(triangular_table()), delta);
    CHECK_FALSE(t.limits().upper_divergent);
    CHECK(std::isfinite(t.limits().upper));
  }
}

TEST_CASE("limits bracket zero") {
  for (double delta : {1.0, 0.7}) {
    for (const auto& d :
         {TypeDistribution::exponential(1.0), TypeDistribution::uniform01(),
          TypeDistribution::pareto(1.0, 1.0)}) {
      HazardPotential hp(d, delta);
      CHECK(hp.limits().lower < 0.0);
      CHECK(hp.limits().upper > 0.0);
    }
  }
}
