#include "attrition/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

namespace attrition::io {

TypeDistribution dist_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    throw std::invalid_argument("distribution spec: missing \"family\"");
  const std::string family = j["family"].get<std::string>();
  auto num_field = [&](const char* name) {
    if (!j.contains(name) || !j[name].is_number())
      throw std::invalid_argument(std::string("distribution spec: missing ") +
                                  name);
    return j[name].get<double>();
  };
  if (family == "exponential")
    return TypeDistribution::exponential(num_field("lambda"));
  if (family == "uniform01") return TypeDistribution::uniform01();
  if (family == "pareto")
    return TypeDistribution::pareto(num_field("theta_min"),
                                    num_field("alpha"));
  if (family == "tabulated") {
    if (!j.contains("points") || !j["points"].is_array())
      throw std::invalid_argument("distribution spec: missing points");
    std::vector<std::array<double, 2>> pts;
    for (const auto& p : j["points"]) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
          !p[1].is_number())
        throw std::invalid_argument("distribution spec: bad point entry");
      pts.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return TypeDistribution::tabulated(std::move(pts));
  }
  throw std::invalid_argument("distribution spec: unknown family " + family);
}

nlohmann::json dist_to_json(const TypeDistribution& d) {
  using F = TypeDistribution::Family;
  nlohmann::json j;
  switch (d.family()) {
    case F::Exponential:
      j["family"] = "exponential";
      j["lambda"] = d.lambda();
      break;
    case F::Uniform01:
      j["family"] = "uniform01";
      break;
    case F::Pareto:
      j["family"] = "pareto";
      j["theta_min"] = d.theta_min();
      j["alpha"] = d.alpha();
      break;
    case F::Tabulated: {
      j["family"] = "tabulated";
      auto pts = nlohmann::json::array();
      for (const auto& p : d.points()) pts.push_back({p[0], p[1]});
      j["points"] = std::move(pts);
      break;
    }
  }
  return j;
}

std::string fmt_sig(double x, int digits) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

nlohmann::json json_num(double x) {
  if (!std::isfinite(x)) return fmt_sig(x);
  return std::strtod(fmt_sig(x).c_str(), nullptr);
}

void write_strategy_csv(std::ostream& os, const std::vector<double>& theta,
                        const std::vector<double>& k,
                        const std::vector<double>& sigma1,
                        const std::vector<double>& sigma2) {
  os << "theta,k,sigma1,sigma2\n";
  for (std::size_t i = 0; i < theta.size(); ++i)
    os << fmt_sig(theta[i]) << ',' << fmt_sig(k[i]) << ',' << fmt_sig(sigma1[i])
       << ',' << fmt_sig(sigma2[i]) << '\n';
}

namespace {

std::string tick_label(double v) { return fmt_sig(v, 4); }

}  // namespace

std::string render_plot_svg(const std::string& title,
                            const std::vector<PlotSeries>& series,
                            double ymax_hint) {
  const double W = 640, H = 480;
  const double ml = 64, mr = 16, mt = 32, mb = 48;

  double xmin = kInf, xmax = -kInf, ymax = 0.0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmax > xmin)) {
    xmin = 0.0;
    xmax = 1.0;
  }
  if (ymax_hint > 0.0) ymax = ymax_hint;
  if (!(ymax > 0.0)) ymax = 1.0;

  auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr);
  };
  auto py = [&](double y) { return H - mb - y / ymax * (H - mt - mb); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"14\">"
     << title << "</text>\n";
  // axes
  os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
     << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
     << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4;
    const double yv = ymax * i / 4;
    os << "<line x1=\"" << px(xv) << "\" y1=\"" << H - mb << "\" x2=\""
       << px(xv) << "\" y2=\"" << H - mb + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - mb + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << tick_label(xv) << "</text>\n";
    os << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << ml
       << "\" y2=\"" << py(yv) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << tick_label(yv) << "</text>\n";
  }
  os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 10
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\">Type \xce\xb8</text>\n";
  os << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\" transform=\"rotate(-90 16 "
     << (mt + H - mb) / 2 << ")\">Stopping point a_i</text>\n";

  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  int ci = 0;
  for (const auto& s : series) {
    os << "<polyline fill=\"none\" stroke=\"" << colors[ci % 4]
       << "\" stroke-width=\"1.6\"";
    if (s.dashed) os << " stroke-dasharray=\"7 4\"";
    os << " points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || s.y[i] > ymax) break;  // fight-forever cut
      if (!first) os << ' ';
      os << fmt_sig(px(s.x[i]), 7) << ',' << fmt_sig(py(s.y[i]), 7);
      first = false;
    }
    os << "\"/>\n";
    os << "<line x1=\"" << ml + 12 << "\" y1=\"" << mt + 14 + 18 * ci
       << "\" x2=\"" << ml + 44 << "\" y2=\"" << mt + 14 + 18 * ci
       << "\" stroke=\"" << colors[ci % 4] << "\" stroke-width=\"1.6\""
       << (s.dashed ? " stroke-dasharray=\"7 4\"" : "") << "/>\n";
    os << "<text x=\"" << ml + 50 << "\" y=\"" << mt + 18 + 18 * ci
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
       << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
  return os.str();
}

nlohmann::json report_to_json(const VerificationReport& rep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"theta", json_num(r.theta)},
                    {"assigned", json_num(r.assigned)},
                    {"best", json_num(r.best_action)},
                    {"gain", json_num(r.gain)}});
  nlohmann::json j;
  j["player"] = rep.player;
  j["max_gain"] = json_num(rep.max_gain);
  j["identity_residual"] = json_num(rep.identity_residual);
  j["rows"] = std::move(rows);
  j["tolerances"] = {{"max_gain", json_num(rep.gain_tolerance)},
                     {"payoff_quadrature", 1e-9},
                     {"identity_residual", 1e-6}};
  return j;
}

nlohmann::json experiment_to_json(const SelectionExperiment& exp) {
  nlohmann::json cells = nlohmann::json::array();
  if (exp.bounded) {
    for (const auto& c : exp.bounded_cells)
      cells.push_back({{"delta", json_num(c.delta)},
                       {"forced_C", json_num(c.forced_c)},
                       {"backward_identity_dev",
                        json_num(c.backward_identity_dev)}});
  } else {
    for (const auto& c : exp.unbounded_cells) {
      nlohmann::json cell = {{"delta", json_num(c.delta)},
                             {"C", json_num(c.c)},
                             {"m_delta", json_num(c.m_delta)},
                             {"a_bar_1", json_num(c.a_bar_1)},
                             {"max_gain", json_num(c.max_gain)}};
      if (!c.ok) cell["error"] = c.note;
      cells.push_back(std::move(cell));
    }
  }
  nlohmann::json j;
  j["bounded_support"] = exp.bounded;
  j["cells"] = std::move(cells);
  return j;
}

std::string render_experiment_table(const SelectionExperiment& exp) {
  std::ostringstream os;
  auto col = [&](const std::string& s, int w) {
    os << s;
    for (int i = static_cast<int>(s.size()); i < w; ++i) os << ' ';
  };
  if (exp.bounded) {
    col("delta", 12);
    col("forced_C", 16);
    col("backward_dev", 16);
    os << '\n';
    for (const auto& c : exp.bounded_cells) {
      col(fmt_sig(c.delta), 12);
      col(fmt_sig(c.forced_c), 16);
      col(fmt_sig(c.backward_identity_dev), 16);
      os << '\n';
    }
    bool all_zero = true;
    for (const auto& c : exp.bounded_cells)
      if (std::abs(c.forced_c) > 1e-12) all_zero = false;
    if (all_zero && !exp.bounded_cells.empty())
      os << "unique C=0 at every delta\n";
  } else {
    col("delta", 12);
    col("C", 12);
    col("m_delta", 16);
    col("a_bar_1", 16);
    col("max_gain", 16);
    os << '\n';
    for (const auto& c : exp.unbounded_cells) {
      col(fmt_sig(c.delta), 12);
      col(fmt_sig(c.c), 12);
      if (c.ok) {
        col(fmt_sig(c.m_delta), 16);
        col(fmt_sig(c.a_bar_1), 16);
        col(fmt_sig(c.max_gain), 16);
      } else {
        col("error", 16);
        col("-", 16);
        col("-", 16);
      }
      os << '\n';
    }
  }
  return os.str();
}

int log_level() {
  static const int level = [] {
    const char* v = std::getenv("ATTRITION_LOG");
    if (!v) return 0;
    const std::string s(v);
    if (s == "debug") return 2;
    if (s == "info") return 1;
    return 0;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[info] " << msg << '\n';
}

void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[debug] " << msg << '\n';
}

}  // namespace attrition::io
