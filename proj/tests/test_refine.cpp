#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "attrition/refine.hpp"

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

std::vector<double> interior_grid(const TypeDistribution& d, double theta1,
                                  int n) {
  const double p0 = std::max(0.05, d.cdf(theta1) + 0.02);
  std::vector<double> g;
  for (int i = 0; i <= n; ++i) {
    const double th = d.quantile(p0 + (0.95 - p0) * i / n);
    if (g.empty() || th > g.back()) g.push_back(th);
  }
  return g;
}

}  // namespace

TEST_CASE("perturbation config normalizes both modes onto one damping") {
  CHECK(PerturbationConfig::al(0.7).delta_eff() == doctest::Approx(0.7));
  CHECK(PerturbationConfig::bt(0.3).delta_eff() == doctest::Approx(0.7));
  CHECK_THROWS_AS(PerturbationConfig::al(1.0), std::invalid_argument);
  CHECK_THROWS_AS(PerturbationConfig::bt(0.0), std::invalid_argument);
}

TEST_CASE("the two refinements build identical families") {
  auto dist = TypeDistribution::uniform01();
  auto al = perturbed_family(dist, PerturbationConfig::al(0.7), 0.2);
  auto bt = perturbed_family(dist, PerturbationConfig::bt(0.3), 0.2);
  auto grid = interior_grid(dist, 0.0, 100);
  auto ka = TypeMap::from_inversion(al, grid);
  auto kb = TypeMap::from_inversion(bt, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(ka.values()[i] - kb.values()[i]) < 1e-12);
}

TEST_CASE("the fully damped potential still orders types") {
  // delta_eff = 0 integrates f/x, which is strictly increasing
  auto fam = perturbed_family(TypeDistribution::uniform01(),
                              PerturbationConfig::al(0.0), 0.2);
  auto grid = interior_grid(fam.dist(), 0.0, 50);
  auto map = TypeMap::from_inversion(fam, grid);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    CHECK(map.values()[i] < map.values()[i + 1]);
}

TEST_CASE("c = 0 stays the identity under damping") {
  auto fam = perturbed_family(TypeDistribution::exponential(1.0),
                              PerturbationConfig::al(0.9), 0.0);
  auto grid = interior_grid(fam.dist(), 0.0, 50);
  auto map = TypeMap::from_inversion(fam, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(map.values()[i] == doctest::Approx(grid[i]).epsilon(1e-10));
}

TEST_CASE("equivalence of the two perturbed ODE forms") {
  SUBCASE("uniform") {
    auto d = TypeDistribution::uniform01();
    CHECK(equivalence_check(d, 0.5, 0.1, interior_grid(d, 0.0, 100)) < 1e-8);
  }
  SUBCASE("identity trajectory") {
    auto d = TypeDistribution::exponential(1.0);
    CHECK(equivalence_check(d, 0.6, 0.0, interior_grid(d, 0.0, 100)) < 1e-12);
  }
  SUBCASE("pareto") {
    auto d = TypeDistribution::pareto(1.0, 1.0);
    auto fam = make_family(d, 0.8, 0.3);
    CHECK(equivalence_check(d, 0.8, 0.3,
                            interior_grid(d, fam.theta1_zero, 100)) < 1e-8);
  }
  SUBCASE("twenty random draws") {
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      TypeDistribution d = TypeDistribution::uniform01();
      const int pick = trial % 3;
      if (pick == 1)
        d = TypeDistribution::exponential(0.5 + 1.5 * u01(rng));
      else if (pick == 2)
        d = TypeDistribution::pareto(0.5 + u01(rng), 0.8 + 2.0 * u01(rng));
      const double delta = 0.3 + 0.65 * u01(rng);
      HazardPotential hp(d, delta);
      const double lo_ref = hp.limits().lower_divergent
                                ? hp.value(d.quantile(0.02))
                                : hp.limits().lower;
      const double c = 0.02 + 0.4 * u01(rng) * (hp.limits().upper - lo_ref);
      auto fam = make_family(d, delta, c);
      const double sup =
          equivalence_check(d, delta, c, interior_grid(d, fam.theta1_zero, 80));
      CHECK(sup < 1e-8);
    }
  }
}

TEST_CASE("bounded-support selection forces c to zero") {
  for (double delta : {0.5, 0.9, 0.99}) {
    auto res = bounded_support_selection(TypeDistribution::uniform01(), delta);
    CHECK(std::abs(res.forced_c) <= 1e-12);
    CHECK(res.backward_identity_dev <= 1e-6);
  }
  auto tri = bounded_support_selection(
      TypeDistribution::tabulated(triangular_table()), 0.9);
  CHECK(std::abs(tri.forced_c) <= 1e-12);
  CHECK(tri.backward_identity_dev <= 1e-6);
}

TEST_CASE("selection preconditions route callers to the right experiment") {
  CHECK_THROWS_AS(
      bounded_support_selection(TypeDistribution::exponential(1.0), 0.9),
      std::invalid_argument);
  CHECK_THROWS_AS(
      unbounded_support_experiment(TypeDistribution::uniform01(), 0.9, 0.5),
      std::invalid_argument);
  CHECK_THROWS_AS(
      bounded_support_selection(TypeDistribution::uniform01(), 1.0),
      std::invalid_argument);
}

TEST_CASE("unbounded experiment reports the step-4 quantities") {
  auto res = unbounded_support_experiment(TypeDistribution::exponential(1.0),
                                          0.9, 0.5);
  REQUIRE(res.ok);
  CHECK(std::isfinite(res.m_delta));
  CHECK(std::isfinite(res.a_bar_1));
  CHECK(res.a_bar_1 <= res.m_delta / (1.0 - 0.9) + 1e-9);
  CHECK(res.rows.size() >= 4);
  // pulling back from the stand-in bid is strictly profitable under damping
  CHECK(res.max_gain > 0.0);
  // and the best responses of the stranded types cluster at the pullback
  for (const auto& row : res.rows)
    CHECK(row.best_action <= res.a_bar_1 + 2.0 * res.deviation_step);
}

TEST_CASE("c = 0 leaves no gap on unbounded supports") {
  auto res = unbounded_support_experiment(TypeDistribution::exponential(1.0),
                                          0.9, 0.0);
  REQUIRE(res.ok);
  CHECK(res.m_delta == kInf);
  CHECK(res.rows.empty());
}

TEST_CASE("pareto experiment shows the same clustering tension") {
  auto res = unbounded_support_experiment(TypeDistribution::pareto(1.0, 1.0),
                                          0.5, 0.3);
  REQUIRE(res.ok);
  CHECK(std::isfinite(res.m_delta));
  CHECK(res.max_gain > 0.0);
}

TEST_CASE("the damped potential respects the 1/(ref (1-delta)) bound") {
  auto d = TypeDistribution::exponential(1.0);
  for (double delta : {0.5, 0.9}) {
    HazardPotential hp(d, delta);
    const double bound = 1.0 / (hp.reference() * (1.0 - delta));
    double prev = 0.0;
    for (int k = 2; k <= 10; ++k) {
      const double th = d.effective_upper(std::pow(10.0, -k));
      const double v = hp.value(th);
      CHECK(v <= bound);
      CHECK(v >= prev - 1e-12);  // Cauchy: increments keep shrinking
      prev = v;
    }
  }
}

TEST_CASE("m_delta stays finite along the schedule") {
  double prev = 0.0;
  for (double delta : {0.5, 0.9, 0.99, 0.999}) {
    auto res = unbounded_support_experiment(TypeDistribution::exponential(1.0),
                                            delta, 0.5);
    REQUIRE(res.ok);
    CHECK(std::isfinite(res.m_delta));
    CHECK(res.m_delta > prev);  // the saturation point recedes as delta -> 1
    prev = res.m_delta;
  }
}

TEST_CASE("selection sweep records every requested cell") {
  SUBCASE("bounded support runs one cell per delta") {
    std::vector<double> deltas{0.5, 0.9};
    auto exp1 = selection_sweep(TypeDistribution::uniform01(), deltas, {});
    CHECK(exp1.bounded);
    CHECK(exp1.bounded_cells.size() == 2);
    for (const auto& c : exp1.bounded_cells)
      CHECK(std::abs(c.forced_c) <= 1e-12);
  }
  SUBCASE("unbounded support runs the full delta x c lattice") {
    std::vector<double> deltas{0.5, 0.9};
    std::vector<double> cs{0.1, 0.5, 1.0};
    auto exp2 = selection_sweep(TypeDistribution::exponential(1.0), deltas, cs);
    CHECK_FALSE(exp2.bounded);
    REQUIRE(exp2.unbounded_cells.size() == 6);
    for (const auto& cell : exp2.unbounded_cells) {
      CHECK(cell.ok);
      CHECK(cell.a_bar_1 <= cell.m_delta / (1.0 - cell.delta) + 1e-9);
    }
  }
  SUBCASE("a malformed schedule is rejected") {
    std::vector<double> bad{0.9, 0.5};
    CHECK_THROWS_AS(selection_sweep(TypeDistribution::uniform01(), bad, {}),
                    std::invalid_argument);
  }
}
