#pragma once

// Bayesian reporting: probability statements, credible intervals labelled as
// BI, posterior densities against regulatory thresholds, and full model
// disclosure.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vebayes/inference.hpp"
#include "vebayes/models.hpp"

namespace vebayes {

// How VE percentages are cut to one decimal when rendered. Internal values are
// never rounded.
enum class Rounding { TruncateTowardZero, HalfAwayFromZero };

std::string_view to_string(Rounding r) noexcept;
Rounding rounding_from_string(std::string_view s);

// VE fraction → percent at exactly one decimal, e.g. 0.90352 → "90.3".
std::string format_ve_percent(double ve, Rounding rounding);
// "(90.3, 97.6)"
std::string format_interval(const CredibleInterval& interval, Rounding rounding);
// Probabilities at up to four decimals; >= 0.9999 renders as ">0.9999" and
// values below 0.0001 as "<0.0001".
std::string format_probability(double p);
// VE threshold as a percent with trailing ".0" dropped: 0.3 → "30%".
std::string format_threshold(double threshold);

// "Given the observed efficacy data, there is a probability of {Y} that the
// true vaccine efficacy is greater than {X}."
std::string render_statement(double threshold, double probability);
// Probability reading of a credible interval.
std::string render_interval_statement(const CredibleInterval& interval, Rounding rounding);

struct RegulatoryRule {
    double min_observed_ve = 0.5;
    double min_interval_lower = 0.3;

    void validate() const;
};

struct RegulatoryVerdict {
    bool observed_available = true;
    bool observed_ok = false;
    bool lower_bound_ok = false;
    bool pass = false;
    // False when the interval level is not 95%; the verdict is then advisory.
    bool standard_level = true;
};

// Pass iff observed VE >= rule.min_observed_ve and interval.lower >
// rule.min_interval_lower.
RegulatoryVerdict evaluate_regulatory_rule(const RegulatoryRule& rule, double observed_ve,
                                           const CredibleInterval& interval);

struct ModelDisclosure {
    std::string endpoint;
    ModelTag model = ModelTag::Pooled;
    std::string likelihood;
    std::string prior;
    std::string parameter;
    std::string transform;
    std::string posterior;
    std::vector<std::string> notes;

    std::string text() const;
};

std::string format_beta(const BetaParams& p);

ModelDisclosure disclose_pooled(const PooledModel& model, const TrialCounts& data);
ModelDisclosure disclose_two_arm(const TrialCounts& data);
// Dispatches on the model tag; `prior` is ignored for the two-arm model, whose
// prior is fixed.
ModelDisclosure disclose_model(ModelTag model, const BetaParams& prior, const TrialCounts& data);

// Values printed elsewhere for the same data (percent, as printed), compared
// against the computed values at the report's rounding.
struct ReportedValues {
    std::string endpoint;
    ModelTag model = ModelTag::Pooled;
    std::optional<double> observed_ve_pct;
    std::optional<double> posterior_mean_ve_pct;
    std::optional<double> interval_lower_pct;
    std::optional<double> interval_upper_pct;
};

struct ReferenceCheck {
    std::string endpoint;
    ModelTag model = ModelTag::Pooled;
    std::string quantity;
    std::string reported;
    std::string computed;
    bool matches = false;
};

struct Statement {
    std::string endpoint;
    ModelTag model = ModelTag::Pooled;
    std::string text;
};

struct EndpointVerdict {
    std::string endpoint;
    ModelTag model = ModelTag::Pooled;
    RegulatoryVerdict verdict;
};

struct Provenance {
    std::vector<TrialCounts> data;
    InferenceConfig config;
    BetaParams prior{kDefaultPriorA, kDefaultPriorB};
    std::vector<ModelTag> models;
    std::string version;
};

struct Report {
    std::vector<PosteriorSummary> summaries;
    std::vector<ModelDisclosure> disclosures;
    std::vector<Statement> statements;
    std::vector<EndpointVerdict> verdicts;
    std::vector<ReferenceCheck> reference_checks;
    std::vector<std::string> notes;
    RegulatoryRule rule;
    Rounding rounding = Rounding::TruncateTowardZero;
    Provenance provenance;
};

// Binds summaries, verdicts, statements and disclosures into one report,
// ordered by (endpoint label, model). Throws ValidationError when `summaries`
// is empty.
Report assemble_report(std::vector<PosteriorSummary> summaries, const RegulatoryRule& rule,
                       std::vector<ModelDisclosure> disclosures, Provenance provenance,
                       Rounding rounding = Rounding::TruncateTowardZero,
                       std::span<const ReportedValues> reported = {});

// Human-readable report with the four reporting blocks per endpoint.
std::string render_text(const Report& report);

}  // namespace vebayes
