#include "vebayes/serialize.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "vebayes/cli.hpp"
#include "vebayes/errors.hpp"

namespace vebayes {

using nlohmann::json;

namespace {

json grid_to_json(const DensityGrid& grid) {
    json arr = json::array();
    for (const auto& p : grid) arr.push_back(json::array({p.value, p.density}));
    return arr;
}

DensityGrid grid_from_json(const json& j) {
    DensityGrid grid;
    grid.reserve(j.size());
    for (const auto& p : j) grid.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return grid;
}

json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

std::optional<double> optional_from_json(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

std::string csv_number(double v) { return fmt::format("{:.10g}", v); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

std::string series_prefix(ModelTag model) {
    return model == ModelTag::Pooled ? "pooled" : "two_arm";
}

}  // namespace

json summary_to_json(const PosteriorSummary& s) {
    json j;
    j["endpoint"] = s.endpoint;
    j["model"] = std::string(to_string(s.model));
    j["observed_ve"] = optional_number(s.observed_ve);
    j["posterior_mean_ve"] = optional_number(s.posterior_mean_ve);
    j["posterior_median_ve"] = s.posterior_median_ve;
    j["interval"] = {{"lower", s.interval.lower},
                     {"upper", s.interval.upper},
                     {"level", s.interval.level},
                     {"method", std::string(to_string(s.interval.method))}};
    json probs = json::array();
    for (const auto& tp : s.threshold_probs) {
        probs.push_back({{"threshold", tp.threshold}, {"probability", tp.probability}});
    }
    j["threshold_probs"] = probs;
    j["density"] = grid_to_json(s.density);
    if (s.model == ModelTag::TwoArm) {
        j["vaccine_rate_density"] = grid_to_json(s.vaccine_rate_density);
        j["placebo_rate_density"] = grid_to_json(s.placebo_rate_density);
    }
    return j;
}

PosteriorSummary summary_from_json(const json& j) {
    PosteriorSummary s;
    s.endpoint = j.at("endpoint").get<std::string>();
    s.model = model_tag_from_string(j.at("model").get<std::string>());
    s.observed_ve = optional_from_json(j, "observed_ve");
    s.posterior_mean_ve = optional_from_json(j, "posterior_mean_ve");
    s.posterior_median_ve = j.at("posterior_median_ve").get<double>();
    const json& iv = j.at("interval");
    s.interval = {iv.at("lower").get<double>(), iv.at("upper").get<double>(),
                  iv.at("level").get<double>(),
                  interval_method_from_string(iv.at("method").get<std::string>())};
    for (const auto& tp : j.at("threshold_probs")) {
        s.threshold_probs.push_back(
            {tp.at("threshold").get<double>(), tp.at("probability").get<double>()});
    }
    s.density = grid_from_json(j.at("density"));
    if (j.contains("vaccine_rate_density")) {
        s.vaccine_rate_density = grid_from_json(j.at("vaccine_rate_density"));
    }
    if (j.contains("placebo_rate_density")) {
        s.placebo_rate_density = grid_from_json(j.at("placebo_rate_density"));
    }
    return s;
}

json report_to_json(const Report& report) {
    const Rounding rounding = report.rounding;
    json doc;
    doc["format"] = "vebayes-report";
    doc["version"] = report.provenance.version;

    const auto& cfg = report.provenance.config;
    json models = json::array();
    for (ModelTag m : report.provenance.models) models.push_back(std::string(to_string(m)));
    doc["config"] = {{"models", models},
                     {"level", cfg.level},
                     {"thresholds", cfg.thresholds},
                     {"mc_samples", cfg.mc_samples},
                     {"seed", cfg.seed},
                     {"grid_points", cfg.grid_points},
                     {"prior", {{"a", report.provenance.prior.a()}, {"b", report.provenance.prior.b()}}},
                     {"rounding", std::string(to_string(rounding))}};
    doc["rule"] = {{"min_observed_ve", report.rule.min_observed_ve},
                   {"min_interval_lower", report.rule.min_interval_lower}};

    json data = json::array();
    for (const auto& d : report.provenance.data) {
        json e = {{"label", d.label()},
                  {"vaccine_cases", d.vaccine_cases()},
                  {"total_cases", d.total_cases()},
                  {"placebo_cases", d.placebo_cases()}};
        if (d.has_arm_sizes()) {
            e["vaccine_participants"] = d.vaccine_participants();
            e["placebo_participants"] = d.placebo_participants();
        }
        data.push_back(e);
    }
    doc["data"] = data;

    json endpoints = json::array();
    for (const auto& s : report.summaries) {
        json e = summary_to_json(s);
        json display = {{"interval", format_interval(s.interval, rounding)},
                        {"posterior_median_ve", format_ve_percent(s.posterior_median_ve, rounding)}};
        if (s.observed_ve) display["observed_ve"] = format_ve_percent(*s.observed_ve, rounding);
        if (s.posterior_mean_ve) {
            display["posterior_mean_ve"] = format_ve_percent(*s.posterior_mean_ve, rounding);
        }
        e["display"] = display;

        json statements = json::array();
        for (const auto& st : report.statements) {
            if (st.endpoint == s.endpoint && st.model == s.model) statements.push_back(st.text);
        }
        e["statements"] = statements;

        for (const auto& v : report.verdicts) {
            if (v.endpoint != s.endpoint || v.model != s.model) continue;
            e["regulatory_verdict"] = {{"pass", v.verdict.pass},
                                       {"observed_available", v.verdict.observed_available},
                                       {"observed_ok", v.verdict.observed_ok},
                                       {"lower_bound_ok", v.verdict.lower_bound_ok},
                                       {"standard_level", v.verdict.standard_level}};
        }
        for (const auto& d : report.disclosures) {
            if (d.endpoint != s.endpoint || d.model != s.model) continue;
            e["model_disclosure"] = {{"parameter", d.parameter},
                                     {"likelihood", d.likelihood},
                                     {"prior", d.prior},
                                     {"transform", d.transform},
                                     {"posterior", d.posterior},
                                     {"notes", d.notes}};
        }
        endpoints.push_back(e);
    }
    doc["endpoints"] = endpoints;

    json checks = json::array();
    for (const auto& c : report.reference_checks) {
        checks.push_back({{"endpoint", c.endpoint},
                          {"model", std::string(to_string(c.model))},
                          {"quantity", c.quantity},
                          {"reported", c.reported},
                          {"computed", c.computed},
                          {"matches", c.matches}});
    }
    doc["reference_checks"] = checks;
    doc["notes"] = report.notes;
    return doc;
}

std::string render_json(const Report& report) { return report_to_json(report).dump(2) + "\n"; }

std::string render_csv_plot(const Report& report) {
    std::string out = "endpoint,series,value,density\n";
    auto emit_grid = [&](const std::string& endpoint, const std::string& series,
                         const DensityGrid& grid) {
        for (const auto& p : grid) {
            out += fmt::format("{},{},{},{}\n", csv_field(endpoint), series, csv_number(p.value),
                               csv_number(p.density));
        }
    };
    auto emit_marker = [&](const std::string& endpoint, const std::string& series, double value) {
        out += fmt::format("{},{},{},\n", csv_field(endpoint), series, csv_number(value));
    };

    for (const auto& s : report.summaries) {
        const std::string prefix = series_prefix(s.model);
        emit_grid(s.endpoint, prefix + "_ve", s.density);
        if (s.model == ModelTag::TwoArm) {
            emit_grid(s.endpoint, prefix + "_vaccine_rate", s.vaccine_rate_density);
            emit_grid(s.endpoint, prefix + "_placebo_rate", s.placebo_rate_density);
        }
        emit_marker(s.endpoint, prefix + "_bi_lower", s.interval.lower);
        emit_marker(s.endpoint, prefix + "_bi_upper", s.interval.upper);
    }
    std::vector<std::string> endpoints;
    for (const auto& s : report.summaries) {
        if (std::find(endpoints.begin(), endpoints.end(), s.endpoint) == endpoints.end()) {
            endpoints.push_back(s.endpoint);
        }
    }
    for (const auto& e : endpoints) {
        emit_marker(e, "threshold", report.rule.min_interval_lower);
        emit_marker(e, "threshold", report.rule.min_observed_ve);
    }
    return out;
}

std::string render_svg(const Report& report) {
    std::vector<const PosteriorSummary*> panels;
    for (const auto& s : report.summaries) {
        const bool has_pooled = std::any_of(
            report.summaries.begin(), report.summaries.end(), [&](const auto& o) {
                return o.endpoint == s.endpoint && o.model == ModelTag::Pooled;
            });
        if (s.model == ModelTag::Pooled || !has_pooled) panels.push_back(&s);
    }

    constexpr double kPanelW = 420.0;
    constexpr double kPanelH = 300.0;
    constexpr double kMargin = 40.0;
    const double width = kPanelW * static_cast<double>(panels.size());
    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
        "font-family=\"sans-serif\" font-size=\"11\">\n",
        width, kPanelH);

    for (std::size_t i = 0; i < panels.size(); ++i) {
        const PosteriorSummary& s = *panels[i];
        const double x0 = kPanelW * static_cast<double>(i);
        // VE axis spans the thresholds and the density window.
        double vmin = std::min(report.rule.min_interval_lower, s.density.front().value) - 0.05;
        double vmax = std::min(1.0, s.density.back().value + 0.02);
        double dmax = 0.0;
        for (const auto& p : s.density) dmax = std::max(dmax, p.density);
        if (dmax <= 0.0) dmax = 1.0;
        const auto px = [&](double v) {
            return x0 + kMargin + (v - vmin) / (vmax - vmin) * (kPanelW - 2 * kMargin);
        };
        const auto py = [&](double d) {
            return kPanelH - kMargin - d / (1.05 * dmax) * (kPanelH - 2 * kMargin);
        };

        out += fmt::format("<g>\n<text x=\"{:.1f}\" y=\"18\">{} ({}) posterior density of VE</text>\n",
                           x0 + kMargin, s.endpoint, to_string(s.model));
        out += fmt::format(
            "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"black\"/>\n",
            px(vmin), py(0.0), px(vmax), py(0.0));
        for (double tick = std::ceil(vmin * 10.0) / 10.0; tick <= vmax + 1e-9; tick += 0.1) {
            out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.1f}</text>\n",
                               px(tick), py(0.0) + 14.0, tick);
        }
        std::string path;
        for (const auto& p : s.density) {
            path += fmt::format("{}{:.2f},{:.2f} ", path.empty() ? "M" : "L", px(p.value),
                                py(p.density));
        }
        out += fmt::format("<path d=\"{}\" fill=\"none\" stroke=\"blue\" stroke-width=\"1.5\"/>\n", path);
        for (double bound : {s.interval.lower, s.interval.upper}) {
            out += fmt::format(
                "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"red\"/>\n",
                px(bound), py(0.0), py(1.05 * dmax));
        }
        for (double t : {report.rule.min_interval_lower, report.rule.min_observed_ve}) {
            out += fmt::format(
                "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"black\" "
                "stroke-dasharray=\"3,3\"/>\n",
                px(t), py(0.0), py(1.05 * dmax));
        }
        out += fmt::format("<text x=\"{:.1f}\" y=\"34\" fill=\"red\">{:g}% BI {}</text>\n</g>\n",
                           x0 + kMargin, 100.0 * s.interval.level, format_interval(s.interval, report.rounding));
    }
    out += "</svg>\n";
    return out;
}

}  // namespace vebayes
