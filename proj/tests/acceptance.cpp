// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "attrition/io.hpp"

using namespace attrition;

namespace {

int failures = 0;

void criterion(int index, const std::string& name, double budget_s,
               const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
    ok = false;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (secs > budget_s) {
    ok = false;
    detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
  }
  std::printf("%s criterion %2d: %s (%.3f s / %.1f s)%s%s\n",
              ok ? "PASS" : "FAIL", index, name.c_str(), secs, budget_s,
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++failures;
}

std::vector<double> quantile_span(const TypeDistribution& d, double p_lo,
                                  double p_hi, int n) {
  std::vector<double> g;
  for (int i = 0; i <= n; ++i) {
    const double th = d.quantile(p_lo + (p_hi - p_lo) * i / n);
    if (g.empty() || th > g.back()) g.push_back(th);
  }
  return g;
}

std::string run_cli(const std::string& args, int& exit_code) {
  static int counter = 0;
  const std::string path = "acc_out_" + std::to_string(counter++) + ".txt";
  const std::string cmd = std::string(ATTRITION_CLI_PATH) + " " + args + " > " +
                          path + " 2>/dev/null";
  exit_code = WEXITSTATUS(std::system(cmd.c_str()));
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::remove(path.c_str());
  return ss.str();
}

}  // namespace

int main() {
  criterion(1, "exponential gamma=1/3 schedule values", 0.1, [](std::string& d) {
    const ExpGamma fam{1.0, 1.0 / 3.0};
    const double s1 = closed_form(fam, 2.0, 1);
    const double s2 = closed_form(fam, 2.0, 2);
    d = "sigma1(2)=" + io::fmt_sig(s1) + " sigma2(2)=" + io::fmt_sig(s2);
    return std::abs(s1 - 2.0 / 3.0) <= 1e-9 && std::abs(s2 - 6.0) <= 1e-9;
  });

  criterion(2, "pareto theta1=2 schedule values and threshold", 0.1,
            [](std::string& d) {
    const ParetoTheta1 fam{1.0, 1.0, 2.0};
    const double s1 = closed_form(fam, 3.0, 1);
    const double s2 = closed_form(fam, 1.5, 2);
    const double at_threshold = closed_form(fam, 2.0, 2);
    auto ef = make_family_theta1(TypeDistribution::pareto(1.0, 1.0), 1.0, 2.0);
    d = "sigma1(3)=" + io::fmt_sig(s1) + " sigma2(1.5)=" + io::fmt_sig(s2) +
        " threshold=" + io::fmt_sig(ef.p2_forever);
    return std::abs(s1 - 2.0 * std::log(1.25)) <= 1e-9 &&
           std::abs(s2 - 2.0 * std::log(2.0)) <= 1e-9 &&
           at_threshold == kInf && std::abs(ef.p2_forever - 2.0) <= 1e-9;
  });

  criterion(3, "classification with divergence flags and numeric probes", 1.0,
            [](std::string& d) {
    struct Row {
      TypeDistribution dist;
      MultiplicityCase expect;
      bool lower_divergent;
    };
    const Row rows[] = {
        {TypeDistribution::exponential(1.0), MultiplicityCase::A, true},
        {TypeDistribution::uniform01(), MultiplicityCase::A, true},
        {TypeDistribution::pareto(1.0, 1.0), MultiplicityCase::B, false}};
    bool ok = true;
    for (const auto& r : rows) {
      HazardPotential hp(r.dist, 1.0);
      const auto probed = hp.probe_limits();
      ok = ok && classify_case(hp) == r.expect &&
           hp.limits().lower_divergent == r.lower_divergent &&
           probed.lower_divergent == r.lower_divergent &&
           probed.upper_divergent == hp.limits().upper_divergent;
    }
    d = "exp=A uniform=A pareto=B, probes agree";
    return ok;
  });

  criterion(4, "integral identity residual on the three families", 2.0,
            [](std::string& d) {
    struct Row {
      ClosedFamily fam;
      std::vector<double> grid;
      double c;
    };
    const Row rows[] = {
        {ExpGamma{1.0, 1.0 / 3.0},
         quantile_span(TypeDistribution::exponential(1.0), 0.01, 0.99, 199),
         std::log(3.0)},
        {UniformGamma{0.5},
         quantile_span(TypeDistribution::uniform01(), 0.01, 0.99, 199),
         std::log(2.0)},
        {ParetoTheta1{1.0, 1.0, 2.0},
         quantile_span(TypeDistribution::pareto(1.0, 1.0), 0.51, 0.99, 199),
         0.5}};
    double worst_all = 0.0;
    for (const auto& r : rows) {
      auto map = closed_form_map(r.fam, r.grid);
      if (std::abs(closed_family_constant(r.fam) - r.c) > 1e-12) return false;
      const double res = integral_identity_residual(map);
      worst_all = std::max(worst_all, res);
      if (res >= 1e-6) return false;
    }
    d = "max residual " + io::fmt_sig(worst_all, 3);
    return true;
  });

  criterion(5, "ODE route agrees with potential inversion", 5.0,
            [](std::string& d) {
    struct Row {
      TypeDistribution dist;
      double c;
    };
    const Row rows[] = {{TypeDistribution::exponential(1.0), std::log(3.0)},
                        {TypeDistribution::uniform01(), std::log(2.0)},
                        {TypeDistribution::pareto(1.0, 1.0), 0.5}};
    double worst = 0.0;
    for (const auto& r : rows) {
      for (double delta : {1.0, 0.9}) {
        auto fam = make_family(r.dist, delta, r.c);
        const double p0 = std::max(0.025, r.dist.cdf(fam.theta1_zero) + 5e-3);
        auto grid = quantile_span(r.dist, p0, 0.975, 200);
        auto mi = TypeMap::from_inversion(fam, grid);
        auto mo =
            TypeMap::from_ode(fam, grid.front(), mi.values().front(), grid);
        if (mo.truncated() || mo.grid().size() != grid.size()) return false;
        for (std::size_t i = 0; i < grid.size(); ++i)
          worst = std::max(worst, std::abs(mo.values()[i] - mi.values()[i]));
      }
    }
    d = "sup-norm " + io::fmt_sig(worst, 3);
    return worst < 1e-6;
  });

  criterion(6, "best-response certification of the symmetric uniform", 10.0,
            [](std::string& d) {
    auto dist = TypeDistribution::uniform01();
    auto cg = num::linspace(1e-6, 1.0 - 1e-7, 800);
    Profile p{dist, closed_form_curve(UniformGamma{1.0}, 1, cg),
              closed_form_curve(UniformGamma{1.0}, 2, cg), 1.0, 0.0};
    auto thetas = quantile_grid(dist, 50, 1e-6);
    const double hi =
        1.5 * std::max(p.sigma1.max_finite(), p.sigma2.max_finite());
    auto r400 = best_response_gap(p, 1, thetas, num::linspace(0.0, hi, 400));
    auto r800 = best_response_gap(p, 1, thetas, num::linspace(0.0, hi, 800));
    d = "gain(400)=" + io::fmt_sig(r400.max_gain, 3) +
        " gain(800)=" + io::fmt_sig(r800.max_gain, 3);
    return r400.max_gain <= 1e-3 && r800.max_gain <= r400.max_gain + 1e-12;
  });

  criterion(7, "desk-scale multiplicity: gamma=1/3 and gamma=1 both certify",
            30.0, [](std::string& d) {
    auto dist = TypeDistribution::exponential(1.0);
    std::ostringstream note;
    for (double gamma : {1.0 / 3.0, 1.0}) {
      auto cg = num::linspace(1e-6, 16.0, 800);
      Profile p{dist, closed_form_curve(ExpGamma{1.0, gamma}, 1, cg),
                closed_form_curve(ExpGamma{1.0, gamma}, 2, cg), 1.0, 0.0};
      auto rep = discrete_oracle_check(dist, 32, 512, p, 1e-6);
      note << "gamma=" << io::fmt_sig(gamma, 3) << ": gain "
           << io::fmt_sig(rep.max_gain, 3) << " < bound "
           << io::fmt_sig(rep.gain_bound, 3) << "  ";
      if (!(rep.max_gain < rep.gain_bound)) return false;
    }
    d = note.str();
    return true;
  });

  criterion(8, "refinement equivalence on random draws + CLI bodies", 10.0,
            [](std::string& d) {
    std::mt19937 rng(20260810);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      TypeDistribution dist = TypeDistribution::uniform01();
      const int pick = trial % 3;
      if (pick == 1)
        dist = TypeDistribution::exponential(0.5 + 1.5 * u01(rng));
      else if (pick == 2)
        dist = TypeDistribution::pareto(0.5 + u01(rng), 0.8 + 2.0 * u01(rng));
      const double delta = 0.3 + 0.65 * u01(rng);
      HazardPotential hp(dist, delta);
      const double lo_ref = hp.limits().lower_divergent
                                ? hp.value(dist.quantile(0.02))
                                : hp.limits().lower;
      const double c = 0.02 + 0.4 * u01(rng) * (hp.limits().upper - lo_ref);
      auto fam = make_family(dist, delta, c);
      const double p0 = std::max(0.05, dist.cdf(fam.theta1_zero) + 0.02);
      auto grid = quantile_span(dist, p0, 0.95, 80);
      worst = std::max(worst, equivalence_check(dist, delta, c, grid));
    }
    if (!(worst < 1e-8)) {
      d = "sup-norm " + io::fmt_sig(worst, 3);
      return false;
    }
    int rc_al = 0, rc_bt = 0;
    const std::string uni = R"('{"family":"uniform01"}')";
    const std::string al =
        run_cli("refine --dist " + uni + " --mode al --delta 0.5,0.9,0.99",
                rc_al);
    const std::string bt = run_cli(
        "refine --dist " + uni + " --mode bt --epsilon 0.5,0.1,0.01", rc_bt);
    d = "ODE sup-norm " + io::fmt_sig(worst, 3) + ", CLI bodies " +
        (al == bt ? "identical" : "DIFFER");
    return rc_al == 0 && rc_bt == 0 && !al.empty() && al == bt;
  });

  criterion(9, "bounded-support selection forces C = 0", 5.0,
            [](std::string& d) {
    double worst_c = 0.0, worst_dev = 0.0;
    for (double delta : {0.5, 0.9, 0.99}) {
      auto res = bounded_support_selection(TypeDistribution::uniform01(), delta);
      worst_c = std::max(worst_c, std::abs(res.forced_c));
      worst_dev = std::max(worst_dev, res.backward_identity_dev);
    }
    d = "forced |C| <= " + io::fmt_sig(worst_c, 3) + ", backward dev " +
        io::fmt_sig(worst_dev, 3);
    return worst_c <= 1e-12 && worst_dev <= 1e-6;
  });

  criterion(10, "unbounded-support experiment (evidentiary)", 10.0,
            [](std::string& d) {
    auto res = unbounded_support_experiment(TypeDistribution::exponential(1.0),
                                            0.9, 0.5);
    if (!res.ok) return false;
    const bool bound_holds =
        res.a_bar_1 <= res.m_delta / (1.0 - res.delta) + 1e-9;
    d = "m_delta=" + io::fmt_sig(res.m_delta, 6) +
        " a_bar_1=" + io::fmt_sig(res.a_bar_1, 6) + " rows=" +
        std::to_string(res.rows.size()) + " max_gain=" +
        io::fmt_sig(res.max_gain, 3);
    return std::isfinite(res.m_delta) && bound_holds && res.rows.size() >= 4;
  });

  if (failures == 0)
    std::printf("all 10 acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures;
}
