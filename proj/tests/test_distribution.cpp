#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "attrition/distribution.hpp"
#include "oracles.hpp"

using namespace attrition;

namespace {

std::vector<std::array<double, 2>> triangular_table() {
  // triangular density on (0,1) peaking at 1/2: F = 2x^2 then 1-2(1-x)^2
  std::vector<std::array<double, 2>> pts;
  for (int i = 0; i <= 32; ++i) {
    const double x = i / 32.0;
    const double F = x <= 0.5 ? 2.0 * x * x : 1.0 - 2.0 * (1.0 - x) * (1.0 - x);
    pts.push_back({x, F});
  }
  return pts;
}

std::vector<TypeDistribution> all_families() {
  return {TypeDistribution::exponential(1.0), TypeDistribution::uniform01(),
          TypeDistribution::pareto(1.0, 1.0),
          TypeDistribution::tabulated(triangular_table())};
}

}  // namespace

TEST_CASE("cdf closed forms") {
  CHECK(TypeDistribution::exponential(1.0).cdf(0.0) == 0.0);
  CHECK(TypeDistribution::uniform01().cdf(0.5) == 0.5);
  auto pareto = TypeDistribution::pareto(1.0, 1.0);
  CHECK(pareto.cdf(2.0) == doctest::Approx(0.5).epsilon(1e-14));
  // oracle: quadrature of the density
  const double mass = oracles::simpson([&](double x) { return pareto.pdf(x); },
                                       1.0, 2.0, 1e-12);
  CHECK(pareto.cdf(2.0) == doctest::Approx(mass).epsilon(1e-9));
}

TEST_CASE("hazard closed forms") {
  CHECK(TypeDistribution::exponential(2.0).hazard(5.0) ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(TypeDistribution::pareto(1.0, 1.0).hazard(4.0) ==
        doctest::Approx(0.25).epsilon(1e-14));
  auto u = TypeDistribution::uniform01();
  CHECK(u.hazard(0.5) == doctest::Approx(2.0).epsilon(1e-12));
  // oracle: finite difference of -log survivor
  const double fd = oracles::central_diff(
      [&](double x) { return -std::log(u.survivor(x)); }, 0.5, 1e-6);
  CHECK(u.hazard(0.5) == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("effective_upper") {
  CHECK(TypeDistribution::uniform01().effective_upper(0.01) ==
        doctest::Approx(0.99).epsilon(1e-14));
  auto e = TypeDistribution::exponential(1.0);
  CHECK(e.effective_upper(std::exp(-8.0)) ==
        doctest::Approx(8.0).epsilon(1e-12));
  auto p = TypeDistribution::pareto(1.0, 1.0);
  CHECK(p.effective_upper(0.25) == doctest::Approx(4.0).epsilon(1e-12));
  // oracle: bisection on the cdf
  const double b = oracles::bisect([&](double x) { return e.cdf(x); }, 0.0,
                                   64.0, 1.0 - std::exp(-8.0));
  CHECK(e.effective_upper(std::exp(-8.0)) == doctest::Approx(b).epsilon(1e-10));
  const double bp = oracles::bisect([&](double x) { return p.cdf(x); }, 1.0,
                                    64.0, 0.75);
  CHECK(p.effective_upper(0.25) == doctest::Approx(bp).epsilon(1e-10));
}

TEST_CASE("domain errors") {
  auto e = TypeDistribution::exponential(1.0);
  CHECK_THROWS_AS(e.cdf(-0.5), DomainError);
  CHECK_THROWS_AS(e.hazard(0.0), DomainError);  // open support
  auto u = TypeDistribution::uniform01();
  CHECK_THROWS_AS(u.hazard(1.0 - 1e-15), DomainError);  // survivor too small
  CHECK_THROWS_AS(u.quantile(1.5), DomainError);
  CHECK_THROWS_AS(u.effective_upper(0.0), DomainError);
  CHECK_THROWS_AS(TypeDistribution::exponential(0.0), std::invalid_argument);
  CHECK_THROWS_AS(TypeDistribution::pareto(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("tabulated validation") {
  auto bad_ends = triangular_table();
  bad_ends.back()[1] = 0.9;
  CHECK_THROWS_AS(TypeDistribution::tabulated(bad_ends), std::invalid_argument);
  auto non_monotone = triangular_table();
  std::swap(non_monotone[3][1], non_monotone[4][1]);
  CHECK_THROWS_AS(TypeDistribution::tabulated(non_monotone),
                  std::invalid_argument);

  auto tri = TypeDistribution::tabulated(triangular_table());
  CHECK(tri.cdf(tri.support().lower) == 0.0);
  CHECK(tri.cdf(tri.support().upper) == 1.0);
  CHECK(tri.cdf(0.5) == doctest::Approx(0.5).epsilon(1e-12));
  // density stays strictly positive on the open support
  for (int i = 1; i < 200; ++i) CHECK(tri.pdf(i / 200.0) > 0.0);
}

TEST_CASE("pdf matches the cdf derivative") {
  std::mt19937 rng(20260810);
  for (const auto& d : all_families()) {
    std::uniform_real_distribution<double> unif(1e-3, 1.0 - 1e-3);
    for (int i = 0; i < 1000; ++i) {
      const double x = d.quantile(unif(rng));
      double h = 1e-6 * (1.0 + std::abs(x));
      const auto& s = d.support();
      h = std::min(h, 0.5 * (x - s.lower));
      if (s.bounded_above()) h = std::min(h, 0.5 * (s.upper - x));
      const double fd = (d.cdf(x + h) - d.cdf(x - h)) / (2.0 * h);
      CHECK(std::abs(fd - d.pdf(x)) <= 1e-6 * (1.0 + d.pdf(x)));
    }
  }
}

TEST_CASE("hazard times survivor equals pdf") {
  for (const auto& d :
       {TypeDistribution::exponential(0.7), TypeDistribution::uniform01(),
        TypeDistribution::pareto(2.0, 1.5)}) {
    for (int i = 1; i <= 50; ++i) {
      const double x = d.quantile(i / 51.0);
      CHECK(d.hazard(x) * d.survivor(x) ==
            doctest::Approx(d.pdf(x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("quantile inverts cdf on the central mass") {
  for (const auto& d : all_families()) {
    for (int i = 0; i <= 200; ++i) {
      const double p = 0.01 + 0.98 * i / 200.0;
      const double x = d.quantile(p);
      CHECK(d.quantile(d.cdf(x)) ==
            doctest::Approx(x).epsilon(1e-9));
    }
  }
}
