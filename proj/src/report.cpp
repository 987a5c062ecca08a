#include "vebayes/report.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/core.h>

#include "vebayes/errors.hpp"

namespace vebayes {

namespace {

auto order_key(const std::string& endpoint, ModelTag model) {
    return std::tuple(endpoint, static_cast<int>(model));
}

std::string model_heading(ModelTag model) {
    return model == ModelTag::Pooled ? "pooled case-split model" : "two-arm model";
}

std::string trim_trailing_zeros(std::string s) {
    if (s.find('.') == std::string::npos) return s;
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

std::string format_level(double level) {
    return trim_trailing_zeros(fmt::format("{:.2f}", 100.0 * level)) + "%";
}

const PosteriorSummary* find_summary(const std::vector<PosteriorSummary>& summaries,
                                     const std::string& endpoint, ModelTag model) {
    for (const auto& s : summaries) {
        if (s.endpoint == endpoint && s.model == model) return &s;
    }
    return nullptr;
}

void add_check(std::vector<ReferenceCheck>& out, const std::string& endpoint, ModelTag model,
               std::string quantity, std::optional<double> reported_pct,
               std::optional<double> computed, Rounding rounding) {
    if (!reported_pct || !computed) return;
    ReferenceCheck check;
    check.endpoint = endpoint;
    check.model = model;
    check.quantity = std::move(quantity);
    check.reported = fmt::format("{:.1f}", *reported_pct);
    check.computed = format_ve_percent(*computed, rounding);
    check.matches = check.reported == check.computed;
    out.push_back(std::move(check));
}

}  // namespace

std::string_view to_string(Rounding r) noexcept {
    return r == Rounding::TruncateTowardZero ? "truncate" : "half-away";
}

Rounding rounding_from_string(std::string_view s) {
    if (s == "truncate") return Rounding::TruncateTowardZero;
    if (s == "half-away") return Rounding::HalfAwayFromZero;
    throw ValidationError(fmt::format("unknown rounding mode '{}'", s));
}

std::string format_ve_percent(double ve, Rounding rounding) {
    // Tenths of a percent. Snap values that are a representation error away
    // from a tenth (0.95 * 1000 == 949.9999999999999) before cutting.
    double tenths = ve * 1000.0;
    const double nearest = std::round(tenths);
    if (std::fabs(tenths - nearest) < 1e-7) tenths = nearest;
    tenths = rounding == Rounding::TruncateTowardZero ? std::trunc(tenths) : std::round(tenths);
    if (tenths == 0.0) tenths = 0.0;  // no "-0.0"
    return fmt::format("{:.1f}", tenths / 10.0);
}

std::string format_interval(const CredibleInterval& interval, Rounding rounding) {
    return fmt::format("({}, {})", format_ve_percent(interval.lower, rounding),
                       format_ve_percent(interval.upper, rounding));
}

std::string format_probability(double p) {
    if (p >= 0.9999) return ">0.9999";
    if (p < 0.0001) return p <= 0.0 ? "0" : "<0.0001";
    return trim_trailing_zeros(fmt::format("{:.4f}", p));
}

std::string format_threshold(double threshold) {
    return trim_trailing_zeros(fmt::format("{:.1f}", 100.0 * threshold)) + "%";
}

std::string render_statement(double threshold, double probability) {
    return fmt::format(
        "Given the observed efficacy data, there is a probability of {} that the true "
        "vaccine efficacy is greater than {}.",
        format_probability(probability), format_threshold(threshold));
}

std::string render_interval_statement(const CredibleInterval& interval, Rounding rounding) {
    return fmt::format(
        "With {} probability, the true vaccine efficacy is greater than {}% and less than "
        "{}%, given the observed trial data.",
        format_level(interval.level), format_ve_percent(interval.lower, rounding),
        format_ve_percent(interval.upper, rounding));
}

void RegulatoryRule::validate() const {
    if (!(min_observed_ve > 0.0 && min_observed_ve < 1.0) ||
        !(min_interval_lower > 0.0 && min_interval_lower < 1.0)) {
        throw ValidationError("regulatory rule thresholds must lie in (0, 1)");
    }
}

RegulatoryVerdict evaluate_regulatory_rule(const RegulatoryRule& rule, double observed_ve,
                                           const CredibleInterval& interval) {
    RegulatoryVerdict v;
    v.observed_available = !std::isnan(observed_ve);
    v.observed_ok = v.observed_available && observed_ve >= rule.min_observed_ve;
    v.lower_bound_ok = interval.lower > rule.min_interval_lower;
    v.pass = v.observed_ok && v.lower_bound_ok;
    v.standard_level = std::fabs(interval.level - 0.95) < 1e-12;
    return v;
}

std::string format_beta(const BetaParams& p) {
    return fmt::format("Beta({:.10g}, {:.10g})", p.a(), p.b());
}

std::string ModelDisclosure::text() const {
    std::string out = fmt::format("Model: {} (endpoint {})\n", model_heading(model), endpoint);
    out += fmt::format("  Parameter:  {}\n", parameter);
    out += fmt::format("  Likelihood: {}\n", likelihood);
    out += fmt::format("  Prior:      {}\n", prior);
    out += fmt::format("  Transform:  {}\n", transform);
    out += fmt::format("  Posterior:  {}\n", posterior);
    for (const auto& n : notes) out += fmt::format("  Note: {}\n", n);
    return out;
}

ModelDisclosure disclose_pooled(const PooledModel& model, const TrialCounts& data) {
    const BetaParams post = pooled_posterior(model, data);
    ModelDisclosure d;
    d.endpoint = data.label();
    d.model = ModelTag::Pooled;
    d.parameter =
        "theta = probability that an observed case comes from the vaccine group";
    d.likelihood = fmt::format("X | N, theta ~ Binomial(N, theta) with X = {} vaccine-group "
                               "cases of N = {} total cases",
                               data.vaccine_cases(), data.total_cases());
    d.prior = fmt::format("theta ~ {}", format_beta(model.prior));
    d.transform = "theta = (1 - VE) / (2 - VE), equivalently VE = 1 - theta / (1 - theta)";
    d.posterior = fmt::format("theta | X, N ~ {}", format_beta(post));
    return d;
}

ModelDisclosure disclose_two_arm(const TrialCounts& data) {
    const ArmPosteriors arms = arm_posteriors(TwoArmModel{}, data);
    ModelDisclosure d;
    d.endpoint = data.label();
    d.model = ModelTag::TwoArm;
    d.parameter = "p1, p2 = infection probabilities in the vaccine and placebo groups";
    d.likelihood = fmt::format(
        "X1 | N1, p1 ~ Binomial(N1, p1) with X1 = {}, N1 = {}; independently "
        "X2 | N2, p2 ~ Binomial(N2, p2) with X2 = {}, N2 = {}",
        data.vaccine_cases(), data.vaccine_participants(), data.placebo_cases(),
        data.placebo_participants());
    d.prior = "independent improper priors on p1 and p2, f(p) proportional to p^-1 (1 - p)^-1";
    d.transform = "VE = 1 - p1 / p2";
    d.posterior = fmt::format("p1 ~ {}, p2 ~ {}, independent", format_beta(arms.vaccine),
                              format_beta(arms.placebo));
    d.notes.push_back(
        "posterior Beta(X, N - X) is the form used here; a flat prior f(p) = 1 would give "
        "Beta(X + 1, N - X + 1) instead");
    d.notes.push_back("VE summaries come from Monte Carlo draws of 1 - p1 / p2");
    return d;
}

ModelDisclosure disclose_model(ModelTag model, const BetaParams& prior, const TrialCounts& data) {
    if (model == ModelTag::Pooled) return disclose_pooled(PooledModel{prior}, data);
    return disclose_two_arm(data);
}

Report assemble_report(std::vector<PosteriorSummary> summaries, const RegulatoryRule& rule,
                       std::vector<ModelDisclosure> disclosures, Provenance provenance,
                       Rounding rounding, std::span<const ReportedValues> reported) {
    if (summaries.empty()) throw ValidationError("a report needs at least one endpoint summary");
    rule.validate();

    Report r;
    r.rule = rule;
    r.rounding = rounding;
    r.provenance = std::move(provenance);

    std::stable_sort(summaries.begin(), summaries.end(), [](const auto& x, const auto& y) {
        return order_key(x.endpoint, x.model) < order_key(y.endpoint, y.model);
    });
    std::stable_sort(disclosures.begin(), disclosures.end(), [](const auto& x, const auto& y) {
        return order_key(x.endpoint, x.model) < order_key(y.endpoint, y.model);
    });
    std::stable_sort(r.provenance.data.begin(), r.provenance.data.end(),
                     [](const auto& x, const auto& y) { return x.label() < y.label(); });

    for (const auto& s : summaries) {
        for (const auto& tp : s.threshold_probs) {
            r.statements.push_back({s.endpoint, s.model, render_statement(tp.threshold, tp.probability)});
        }
        r.statements.push_back({s.endpoint, s.model, render_interval_statement(s.interval, rounding)});
        const double observed = s.observed_ve.value_or(std::nan(""));
        r.verdicts.push_back({s.endpoint, s.model, evaluate_regulatory_rule(rule, observed, s.interval)});
    }

    for (const auto& rv : reported) {
        const PosteriorSummary* s = find_summary(summaries, rv.endpoint, rv.model);
        if (s == nullptr) continue;
        add_check(r.reference_checks, rv.endpoint, rv.model, "observed VE", rv.observed_ve_pct,
                  s->observed_ve, rounding);
        add_check(r.reference_checks, rv.endpoint, rv.model, "posterior mean VE",
                  rv.posterior_mean_ve_pct, s->posterior_mean_ve, rounding);
        add_check(r.reference_checks, rv.endpoint, rv.model, "BI lower", rv.interval_lower_pct,
                  s->interval.lower, rounding);
        add_check(r.reference_checks, rv.endpoint, rv.model, "BI upper", rv.interval_upper_pct,
                  s->interval.upper, rounding);
    }
    std::stable_sort(r.reference_checks.begin(), r.reference_checks.end(),
                     [](const auto& x, const auto& y) {
                         return order_key(x.endpoint, x.model) < order_key(y.endpoint, y.model);
                     });

    r.notes.push_back(
        "All intervals are Bayesian credible intervals (BI): given the observed trial data, "
        "the true VE lies inside with the stated probability.");
    r.notes.push_back(
        "The regulatory lower-bound check is applied to the 95% BI; the guidance wording "
        "refers to a confidence interval.");
    r.notes.push_back(
        "Posterior mean and posterior median of VE are reported separately; they differ "
        "because the VE posterior is skewed.");
    if (std::any_of(r.reference_checks.begin(), r.reference_checks.end(),
                    [](const auto& c) { return !c.matches; })) {
        r.notes.push_back(
            "Some reported reference values differ from the computed values; see the "
            "reference comparison.");
    }

    r.summaries = std::move(summaries);
    r.disclosures = std::move(disclosures);
    return r;
}

std::string render_text(const Report& report) {
    const Rounding rounding = report.rounding;
    std::string out = "Bayesian vaccine efficacy report\n";
    out += "================================\n\n";

    for (const auto& s : report.summaries) {
        out += fmt::format("Endpoint {} ({})\n", s.endpoint, model_heading(s.model));
        out += std::string(60, '-') + "\n";

        out += "1) Posterior probabilities of efficacy\n";
        for (const auto& tp : s.threshold_probs) {
            out += fmt::format("   Pr(VE > {} | data) = {}\n", format_threshold(tp.threshold),
                               format_probability(tp.probability));
            out += fmt::format("   {}\n", render_statement(tp.threshold, tp.probability));
        }

        out += fmt::format("2) {} Bayesian credible interval (BI) for VE: {} [{}]\n",
                           format_level(s.interval.level), format_interval(s.interval, rounding),
                           to_string(s.interval.method));
        out += fmt::format("   {}\n", render_interval_statement(s.interval, rounding));
        if (s.observed_ve) {
            out += fmt::format("   Observed VE (1 - IRR): {}%\n",
                               format_ve_percent(*s.observed_ve, rounding));
        }
        if (s.posterior_mean_ve) {
            out += fmt::format("   Posterior mean VE: {}%\n",
                               format_ve_percent(*s.posterior_mean_ve, rounding));
        } else {
            out += "   Posterior mean VE: undefined (diverges)\n";
        }
        out += fmt::format("   Posterior median VE: {}%\n",
                           format_ve_percent(s.posterior_median_ve, rounding));

        out += "3) Posterior distribution against regulatory thresholds\n";
        if (!s.density.empty()) {
            const auto mode = std::max_element(
                s.density.begin(), s.density.end(),
                [](const auto& x, const auto& y) { return x.density < y.density; });
            out += fmt::format("   Density grid: {} points over VE {}% to {}%, mode near {}%\n",
                               s.density.size(), format_ve_percent(s.density.front().value, rounding),
                               format_ve_percent(s.density.back().value, rounding),
                               format_ve_percent(mode->value, rounding));
        }
        for (const auto& v : report.verdicts) {
            if (v.endpoint != s.endpoint || v.model != s.model) continue;
            const auto& vd = v.verdict;
            out += fmt::format("   Observed VE >= {}: {}\n", format_threshold(report.rule.min_observed_ve),
                               vd.observed_available ? (vd.observed_ok ? "yes" : "no")
                                                     : "unavailable");
            out += fmt::format("   BI lower bound > {}: {}\n",
                               format_threshold(report.rule.min_interval_lower),
                               vd.lower_bound_ok ? "yes" : "no");
            out += fmt::format("   Regulatory rule: {}{}\n", vd.pass ? "PASS" : "FAIL",
                               vd.standard_level ? "" : " (non-standard BI level)");
        }

        out += "4) Complete model\n";
        for (const auto& d : report.disclosures) {
            if (d.endpoint != s.endpoint || d.model != s.model) continue;
            std::string text = d.text();
            std::string indented;
            std::size_t start = 0;
            while (start < text.size()) {
                const std::size_t end = text.find('\n', start);
                indented += "   " + text.substr(start, end - start) + "\n";
                start = end == std::string::npos ? text.size() : end + 1;
            }
            out += indented;
        }
        out += "\n";
    }

    if (!report.reference_checks.empty()) {
        out += "Reference comparison (reported vs computed, percent)\n";
        for (const auto& c : report.reference_checks) {
            out += fmt::format("   {} {} {}: reported {}, computed {} -> {}\n", c.endpoint,
                               to_string(c.model), c.quantity, c.reported, c.computed,
                               c.matches ? "match" : "DIFFERS");
        }
        out += "\n";
    }

    out += "Notes\n";
    for (const auto& n : report.notes) out += fmt::format("   - {}\n", n);
    out += "\n";

    const auto& p = report.provenance;
    out += "Provenance\n";
    for (const auto& d : p.data) {
        out += fmt::format("   {}: X = {}, N = {}", d.label(), d.vaccine_cases(), d.total_cases());
        if (d.has_arm_sizes()) {
            out += fmt::format(", N1 = {}, N2 = {}", d.vaccine_participants(),
                               d.placebo_participants());
        }
        out += "\n";
    }
    std::string thresholds;
    for (double t : p.config.thresholds) {
        if (!thresholds.empty()) thresholds += ",";
        thresholds += fmt::format("{}", t);
    }
    out += fmt::format("   level = {}, thresholds = {}, mc-samples = {}, seed = {}, grid-points = {}\n",
                       p.config.level, thresholds, p.config.mc_samples, p.config.seed,
                       p.config.grid_points);
    out += fmt::format("   pooled prior = {}, rounding = {}\n", format_beta(p.prior),
                       to_string(rounding));
    out += fmt::format("   vebayes {}\n", p.version);
    return out;
}

}  // namespace vebayes
