// Command-line front end: classify a type distribution, construct and export
// equilibrium schedules, certify them against deviation search, and run the
// refinement selection sweeps.
//
// Exit codes: 0 success / verification pass, 1 verification fail,
// 2 config error, 3 parameter range error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "attrition/io.hpp"

using namespace attrition;

namespace {

struct GlobalOpts {
  std::string dist_spec;
  std::string out_path;
  std::string format = "csv";
  int grid = 512;
  double tail = 1e-6;
  int seed = 0;  // reserved, unused
};

TypeDistribution load_dist(const std::string& spec) {
  std::string text = spec;
  if (!spec.empty() && spec[0] == '@') {
    std::ifstream in(spec.substr(1));
    if (!in) throw std::invalid_argument("cannot open " + spec.substr(1));
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return io::dist_from_json(nlohmann::json::parse(text));
}

void emit(const GlobalOpts& g, const std::string& payload) {
  if (g.out_path.empty()) {
    std::cout << payload;
  } else {
    std::ofstream out(g.out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + g.out_path);
    out << payload;
  }
}

// family parameter: exactly one of gamma / c / theta1
struct FamilyParam {
  std::optional<double> gamma, c, theta1;

  void validate(const TypeDistribution& dist) const {
    const int given =
        int(gamma.has_value()) + int(c.has_value()) + int(theta1.has_value());
    if (given != 1)
      throw std::invalid_argument(
          "exactly one of --gamma, --c, --theta1 is required");
    using F = TypeDistribution::Family;
    if (gamma && dist.family() != F::Exponential &&
        dist.family() != F::Uniform01)
      throw std::invalid_argument(
          "--gamma applies to the exponential and uniform01 families only");
    if (gamma && !(*gamma > 0.0))
      throw RangeError(Boundary::Lower, "--gamma must be positive");
  }

  EquilibriumFamily build(const TypeDistribution& dist, double delta) const {
    validate(dist);
    if (theta1) return make_family_theta1(dist, delta, *theta1);
    double cc = c ? *c : 0.0;
    if (gamma) {
      // exponential: C = -lambda ln gamma; uniform: the potential difference
      // Lambda(theta) - Lambda(k) reduces to -ln gamma
      cc = dist.family() == TypeDistribution::Family::Exponential
               ? -dist.lambda() * std::log(*gamma)
               : -std::log(*gamma);
    }
    return make_family(dist, delta, cc);
  }
};

struct SolveOutput {
  std::vector<double> theta, k, s1, s2;
  double c = 0.0;
  double theta1_zero = 0.0;
  MultiplicityCase mcase = MultiplicityCase::A;
};

SolveOutput run_solve(const TypeDistribution& dist, const FamilyParam& par,
                      double delta, int grid_n, double tail) {
  EquilibriumFamily fam = par.build(dist, delta);

  // the zero-concession region (theta below theta1_zero) still has finite
  // Player-2 stops, so it gets its own slice of the output grid
  int n_lower = 0;
  if (fam.theta1_zero > dist.support().lower) n_lower = grid_n / 4;
  auto grid = strategy_grid(fam, grid_n - n_lower, tail);
  TypeMap map = TypeMap::from_inversion(fam, grid);
  StrategyCurve s1 = sigma1_from_map(map);
  StrategyCurve s2 = sigma2_from_map(map, s1);

  SolveOutput out;
  out.c = map.family().c;
  out.theta1_zero = map.family().theta1_zero;
  out.mcase = map.family().mcase;
  const double p1 = dist.cdf(fam.theta1_zero);
  for (int j = 0; j < n_lower; ++j) {
    const double th = dist.quantile(p1 * (j + 0.5) / n_lower);
    out.theta.push_back(th);
    out.k.push_back(dist.support().lower);
    out.s1.push_back(0.0);
    out.s2.push_back(s2.eval(th));
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.theta.push_back(grid[i]);
    out.k.push_back(map.values()[i]);
    out.s1.push_back(s1.stop[i + 1]);  // stop[0] is the theta1_zero anchor
    out.s2.push_back(s2.eval(grid[i]));
  }
  return out;
}

std::string solve_payload(const GlobalOpts& g, const SolveOutput& sol) {
  if (g.format == "csv") {
    std::ostringstream os;
    io::write_strategy_csv(os, sol.theta, sol.k, sol.s1, sol.s2);
    return os.str();
  }
  if (g.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < sol.theta.size(); ++i)
      rows.push_back({{"theta", io::json_num(sol.theta[i])},
                      {"k", io::json_num(sol.k[i])},
                      {"sigma1", io::json_num(sol.s1[i])},
                      {"sigma2", io::json_num(sol.s2[i])}});
    nlohmann::json j;
    j["c"] = io::json_num(sol.c);
    j["theta1_zero"] = io::json_num(sol.theta1_zero);
    j["case"] = to_string(sol.mcase);
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
  }
  if (g.format == "svg") {
    io::PlotSeries p1{"sigma1", sol.theta, sol.s1, false};
    io::PlotSeries p2{"sigma2", sol.theta, sol.s2, true};
    return io::render_plot_svg("stopping schedules", {p1, p2});
  }
  throw std::invalid_argument("unknown format " + g.format);
}

int cmd_classify(const GlobalOpts& g) {
  TypeDistribution dist = load_dist(g.dist_spec);
  HazardPotential hp(dist, 1.0);
  const auto lim = hp.limits();
  const auto probed = hp.probe_limits();
  nlohmann::json j;
  j["theta_lower"] = io::json_num(dist.support().lower);
  j["theta_upper"] = dist.support().bounded_above()
                         ? io::json_num(dist.support().upper)
                         : nlohmann::json("inf");
  j["lambda_lower"] = lim.lower_divergent ? nlohmann::json("-inf")
                                          : io::json_num(lim.lower);
  j["lambda_lower_divergent"] = lim.lower_divergent;
  j["lambda_upper"] =
      lim.upper_divergent ? nlohmann::json("inf") : io::json_num(lim.upper);
  j["lambda_upper_divergent"] = lim.upper_divergent;
  j["probe_agrees"] = probed.lower_divergent == lim.lower_divergent &&
                      probed.upper_divergent == lim.upper_divergent;
  j["case"] = to_string(classify_case(hp));
  emit(g, j.dump(2) + "\n");
  return 0;
}

int cmd_solve(const GlobalOpts& g, const FamilyParam& par, double delta) {
  TypeDistribution dist = load_dist(g.dist_spec);
  const auto t0 = std::chrono::steady_clock::now();
  SolveOutput sol = run_solve(dist, par, delta, g.grid, g.tail);
  emit(g, solve_payload(g, sol));
  const auto ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  io::log_info("solve: " + std::to_string(sol.theta.size()) + " rows in " +
               std::to_string(ms) + " ms");
  return 0;
}

int cmd_verify(const GlobalOpts& g, const FamilyParam& par, double delta,
               int n_types, int n_devs, bool tamper, double tol_override) {
  TypeDistribution dist = load_dist(g.dist_spec);
  EquilibriumFamily fam = par.build(dist, delta);
  auto grid = strategy_grid(fam, g.grid, g.tail);
  TypeMap map = TypeMap::from_inversion(fam, grid);
  StrategyCurve s1 = sigma1_from_map(map);
  StrategyCurve s2 = sigma2_from_map(map, s1);

  if (tamper) {
    // test hook: double Player 1's schedule, which destroys optimality
    auto base = s1.eval;
    s1.eval = [base](double t) { return 2.0 * base(t); };
    for (auto& v : s1.stop) v *= 2.0;
  }

  Profile profile{dist, s1, s2, delta, 0.0};
  auto thetas = quantile_grid(dist, n_types, g.tail);
  const double a_hi = 1.5 * std::max(s1.max_finite(), s2.max_finite());
  auto devs = num::linspace(0.0, a_hi, n_devs);

  VerificationReport r1 = best_response_gap(profile, 1, thetas, devs);
  VerificationReport r2 = best_response_gap(profile, 2, thetas, devs);
  const double residual = integral_identity_residual(map);

  VerificationReport& worst = r1.max_gain >= r2.max_gain ? r1 : r2;
  worst.identity_residual = residual;
  if (tol_override > 0.0) worst.gain_tolerance = tol_override;
  nlohmann::json j = io::report_to_json(worst);
  j["c"] = io::json_num(fam.c);
  j["max_gain_p1"] = io::json_num(r1.max_gain);
  j["max_gain_p2"] = io::json_num(r2.max_gain);
  emit(g, j.dump(2) + "\n");
  return std::max(r1.max_gain, r2.max_gain) <= worst.gain_tolerance ? 0 : 1;
}

int cmd_refine(const GlobalOpts& g, const std::string& mode,
               const std::vector<double>& deltas,
               const std::vector<double>& epsilons, std::vector<double> cs) {
  TypeDistribution dist = load_dist(g.dist_spec);
  std::vector<double> schedule;
  if (mode == "al") {
    if (deltas.empty())
      throw std::invalid_argument("--mode al needs a --delta schedule");
    schedule = deltas;
  } else if (mode == "bt") {
    if (epsilons.empty())
      throw std::invalid_argument("--mode bt needs an --epsilon schedule");
    for (double e : epsilons)
      schedule.push_back(PerturbationConfig::bt(e).delta_eff());
  } else {
    throw std::invalid_argument("--mode must be al or bt");
  }
  for (double d : schedule)
    if (!(d > 0.0 && d < 1.0))
      throw RangeError(Boundary::Upper,
                       "refine: effective delta must lie in (0,1)");
  if (cs.empty()) cs = {0.1, 0.5, 1.0};

  SelectionExperiment exp = selection_sweep(dist, schedule, cs, g.tail);
  std::cout << io::render_experiment_table(exp);
  if (!g.out_path.empty()) {
    std::ofstream out(g.out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + g.out_path);
    out << io::experiment_to_json(exp).dump(2) << "\n";
  }
  return 0;
}

int cmd_plot(const GlobalOpts& g, const FamilyParam& par, double delta,
             double ymax) {
  TypeDistribution dist = load_dist(g.dist_spec);
  SolveOutput sol = run_solve(dist, par, delta, g.grid, g.tail);
  io::PlotSeries p1{"sigma1", sol.theta, sol.s1, false};
  io::PlotSeries p2{"sigma2", sol.theta, sol.s2, true};
  emit(g, io::render_plot_svg("stopping schedules", {p1, p2}, ymax));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"war-of-attrition equilibrium toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOpts g;
  app.add_option("--dist", g.dist_spec,
                 "distribution spec, JSON literal or @file")
      ->required();
  app.add_option("--out", g.out_path, "output path (default: stdout)");
  app.add_option("--format", g.format, "csv|json|svg");
  app.add_option("--grid", g.grid, "strategy grid size")
      ->check(CLI::Range(8, 100000));
  app.add_option("--tail", g.tail, "upper tail mass truncation");
  app.add_option("--seed", g.seed, "reserved");

  FamilyParam par;
  double delta = 1.0;
  double ymax = 0.0;
  int n_types = 50, n_devs = 400;
  bool tamper = false;
  double tol_override = 0.0;
  std::string mode = "al";
  std::vector<double> deltas, epsilons, cs;

  auto add_family_opts = [&](CLI::App* cmd) {
    cmd->add_option_function<double>(
        "--gamma", [&par](double v) { par.gamma = v; },
        "aggressiveness ratio (exponential/uniform families)");
    cmd->add_option_function<double>(
        "--c", [&par](double v) { par.c = v; }, "integral-identity constant");
    cmd->add_option_function<double>(
        "--theta1", [&par](double v) { par.theta1 = v; },
        "highest Player-1 type conceding at zero");
    cmd->add_option("--delta", delta, "winner-cost damping (1 = unperturbed)");
  };

  CLI::App* classify = app.add_subcommand("classify", "hazard-potential case");
  CLI::App* solve = app.add_subcommand("solve", "construct one equilibrium");
  add_family_opts(solve);
  CLI::App* verify =
      app.add_subcommand("verify", "deviation search + identity residual");
  add_family_opts(verify);
  verify->add_option("--types", n_types, "type grid size");
  verify->add_option("--deviations", n_devs, "deviation grid size");
  verify->add_flag("--tamper", tamper, "test hook: double sigma1");
  verify->add_option("--tolerance", tol_override, "override the gain bound");
  CLI::App* refine = app.add_subcommand("refine", "selection sweep");
  refine->add_option("--mode", mode, "al|bt");
  refine->add_option("--delta", deltas, "AL schedule")->delimiter(',');
  refine->add_option("--epsilon", epsilons, "BT schedule")->delimiter(',');
  refine->add_option("--c", cs, "constants for unbounded supports")
      ->delimiter(',');
  CLI::App* plot = app.add_subcommand("plot", "SVG of the schedules");
  add_family_opts(plot);
  plot->add_option("--ymax", ymax, "vertical axis cap (0 = auto)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*classify) return cmd_classify(g);
    if (*solve) return cmd_solve(g, par, delta);
    if (*verify)
      return cmd_verify(g, par, delta, n_types, n_devs, tamper, tol_override);
    if (*refine) return cmd_refine(g, mode, deltas, epsilons, cs);
    if (*plot) return cmd_plot(g, par, delta, ymax);
  } catch (const RangeError& e) {
    std::cerr << "range error (" << to_string(e.boundary()) << "): " << e.what()
              << '\n';
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "range error: " << e.what() << '\n';
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
