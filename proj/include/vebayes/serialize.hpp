#pragma once

#include <string>

#include "json.hpp"

#include "vebayes/report.hpp"

namespace vebayes {

// json-doc output. Numbers are emitted with round-trip precision, so
// summary_from_json(summary_to_json(s)) == s.
nlohmann::json summary_to_json(const PosteriorSummary& s);
PosteriorSummary summary_from_json(const nlohmann::json& j);
nlohmann::json report_to_json(const Report& report);
std::string render_json(const Report& report);

// csv-plot output, columns endpoint,series,value,density.
//
// Density series: pooled_ve, two_arm_ve, two_arm_vaccine_rate,
// two_arm_placebo_rate. Marker rows leave density empty: threshold (the rule's
// VE thresholds), pooled_bi_lower/upper and two_arm_bi_lower/upper.
std::string render_csv_plot(const Report& report);

// Static SVG of the pooled VE posterior densities, one panel per endpoint,
// with BI bounds and the regulatory thresholds marked. Falls back to the
// two-arm VE density when an endpoint has no pooled summary.
std::string render_svg(const Report& report);

}  // namespace vebayes
