#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "attrition/refine.hpp"

namespace attrition::io {

/// Parse a distribution spec:
///   {"family":"exponential","lambda":1.0} | {"family":"uniform01"} |
///   {"family":"pareto","theta_min":1.0,"alpha":1.0} |
///   {"family":"tabulated","points":[[theta,F],...]}
TypeDistribution dist_from_json(const nlohmann::json& j);
nlohmann::json dist_to_json(const TypeDistribution& d);

/// Fixed 12-significant-digit rendering; infinities become the literals
/// "inf" / "-inf" so files diff identically across platforms.
std::string fmt_sig(double x, int digits = 12);
/// Double rounded to 12 significant digits (for reproducible JSON payloads).
nlohmann::json json_num(double x);

void write_strategy_csv(std::ostream& os, const std::vector<double>& theta,
                        const std::vector<double>& k,
                        const std::vector<double>& sigma1,
                        const std::vector<double>& sigma2);

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  bool dashed = false;
};
std::string render_plot_svg(const std::string& title,
                            const std::vector<PlotSeries>& series,
                            double ymax_hint = 0.0);

nlohmann::json report_to_json(const VerificationReport& rep);
nlohmann::json experiment_to_json(const SelectionExperiment& exp);
/// Plain-text table keyed by the effective damping level only, so the two
/// refinement modes render byte-identical bodies.
std::string render_experiment_table(const SelectionExperiment& exp);

/// 0 = silent, 1 = info, 2 = debug; from the ATTRITION_LOG environment
/// variable, read once.
int log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace attrition::io
