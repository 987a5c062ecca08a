#include <cmath>
#include <regex>
#include <string>

#include "doctest.h"
#include "vebayes/errors.hpp"
#include "vebayes/report.hpp"

using namespace vebayes;

namespace {

const TrialCounts kVe1 = TrialCounts::from_arms("VE1", 8, 18198, 162, 18325);
const TrialCounts kVe2 = TrialCounts::from_arms("VE2", 9, 19965, 169, 20172);

InferenceConfig small_config() {
    InferenceConfig cfg;
    cfg.mc_samples = 100'000;
    cfg.grid_points = 64;
    return cfg;
}

Report make_report(std::span<const ReportedValues> reported = {},
                   Rounding rounding = Rounding::TruncateTowardZero) {
    const auto cfg = small_config();
    std::vector<PosteriorSummary> summaries;
    std::vector<ModelDisclosure> disclosures;
    // Deliberately out of order: assembly sorts by (endpoint, model).
    for (const auto* data : {&kVe2, &kVe1}) {
        summaries.push_back(summarize_two_arm(TwoArmModel{}, *data, cfg));
        summaries.push_back(summarize_pooled(PooledModel{}, *data, cfg));
        disclosures.push_back(disclose_two_arm(*data));
        disclosures.push_back(disclose_pooled(PooledModel{}, *data));
    }
    Provenance prov;
    prov.data = {kVe1, kVe2};
    prov.config = cfg;
    prov.models = {ModelTag::Pooled, ModelTag::TwoArm};
    prov.version = "test";
    return assemble_report(std::move(summaries), RegulatoryRule{}, std::move(disclosures), prov,
                           rounding, reported);
}

}  // namespace

TEST_CASE("percent formatting under both rounding rules") {
    CHECK(format_ve_percent(0.9035199, Rounding::TruncateTowardZero) == "90.3");
    CHECK(format_ve_percent(0.9762552, Rounding::TruncateTowardZero) == "97.6");
    CHECK(format_ve_percent(0.9787, Rounding::TruncateTowardZero) == "97.8");
    CHECK(format_ve_percent(0.9787, Rounding::HalfAwayFromZero) == "97.9");
    CHECK(format_ve_percent(0.94630, Rounding::TruncateTowardZero) == "94.6");
    CHECK(format_ve_percent(-0.0004, Rounding::TruncateTowardZero) == "0.0");
    CHECK(format_ve_percent(-0.1234, Rounding::HalfAwayFromZero) == "-12.3");
    CHECK(format_ve_percent(-0.1235, Rounding::HalfAwayFromZero) == "-12.4");

    CHECK(format_interval({0.9035199081, 0.9762552403, 0.95}, Rounding::TruncateTowardZero) ==
          "(90.3, 97.6)");
    CHECK(format_interval({0.8995054129, 0.9733209532, 0.95}, Rounding::TruncateTowardZero) ==
          "(89.9, 97.3)");
    CHECK(rounding_from_string("half-away") == Rounding::HalfAwayFromZero);
    CHECK(to_string(Rounding::TruncateTowardZero) == "truncate");
    CHECK_THROWS_AS(rounding_from_string("banker"), ValidationError);
}

TEST_CASE("probability and threshold formatting") {
    CHECK(format_probability(0.98139) == "0.9814");
    CHECK(format_probability(0.5) == "0.5");
    CHECK(format_probability(0.99995) == ">0.9999");
    CHECK(format_probability(1.0) == ">0.9999");
    CHECK(format_probability(0.00004) == "<0.0001");
    CHECK(format_probability(0.0) == "0");
    CHECK(format_threshold(0.3) == "30%");
    CHECK(format_threshold(0.9) == "90%");
    CHECK(format_threshold(0.925) == "92.5%");
}

TEST_CASE("statement template") {
    CHECK(render_statement(0.9, 0.98139) ==
          "Given the observed efficacy data, there is a probability of 0.9814 that the true "
          "vaccine efficacy is greater than 90%.");
    CHECK(render_statement(0.3, 0.999999) ==
          "Given the observed efficacy data, there is a probability of >0.9999 that the true "
          "vaccine efficacy is greater than 30%.");
    CHECK(render_interval_statement({0.9035199081, 0.9762552403, 0.95},
                                    Rounding::TruncateTowardZero) ==
          "With 95% probability, the true vaccine efficacy is greater than 90.3% and less than "
          "97.6%, given the observed trial data.");
}

TEST_CASE("regulatory rule examples") {
    const RegulatoryRule rule;
    const auto pass = evaluate_regulatory_rule(rule, 0.95, {0.903, 0.976, 0.95});
    CHECK(pass.pass);
    CHECK(pass.observed_ok);
    CHECK(pass.lower_bound_ok);

    const auto low_lower = evaluate_regulatory_rule(rule, 0.6, {0.25, 0.8, 0.95});
    CHECK_FALSE(low_lower.pass);
    CHECK(low_lower.observed_ok);
    CHECK_FALSE(low_lower.lower_bound_ok);

    const auto low_observed = evaluate_regulatory_rule(rule, 0.45, {0.35, 0.6, 0.95});
    CHECK_FALSE(low_observed.pass);
    CHECK_FALSE(low_observed.observed_ok);

    // Boundaries: observed uses >=, lower bound uses strict >.
    CHECK(evaluate_regulatory_rule(rule, 0.5, {0.31, 0.7, 0.95}).pass);
    CHECK_FALSE(evaluate_regulatory_rule(rule, 0.7, {0.3, 0.9, 0.95}).pass);

    const auto odd_level = evaluate_regulatory_rule(rule, 0.95, {0.9, 0.97, 0.9});
    CHECK_FALSE(odd_level.standard_level);

    const auto missing = evaluate_regulatory_rule(rule, std::nan(""), {0.9, 0.97, 0.95});
    CHECK_FALSE(missing.observed_available);
    CHECK_FALSE(missing.pass);

    CHECK_THROWS_AS((RegulatoryRule{1.2, 0.3}.validate()), ValidationError);
}

TEST_CASE("regulatory verdict is monotone in the lower bound and observed VE") {
    const RegulatoryRule rule;
    bool seen_pass = false;
    for (double lower = 0.0; lower < 0.9; lower += 0.01) {
        const bool p = evaluate_regulatory_rule(rule, 0.8, {lower, 0.95, 0.95}).pass;
        if (seen_pass) CHECK(p);
        seen_pass = seen_pass || p;
    }
    seen_pass = false;
    for (double obs = 0.0; obs < 1.0; obs += 0.01) {
        const bool p = evaluate_regulatory_rule(rule, obs, {0.4, 0.95, 0.95}).pass;
        if (seen_pass) CHECK(p);
        seen_pass = seen_pass || p;
    }
}

TEST_CASE("model disclosures name every component") {
    const auto pooled = disclose_pooled(PooledModel{}, kVe1);
    const auto text = pooled.text();
    CHECK(text.find("theta ~ Beta(0.700102, 1)") != std::string::npos);
    CHECK(text.find("Beta(8.700102, 163)") != std::string::npos);
    CHECK(text.find("X = 8") != std::string::npos);
    CHECK(text.find("N = 170") != std::string::npos);
    CHECK(text.find("VE = 1 - theta / (1 - theta)") != std::string::npos);

    const auto arm = disclose_two_arm(kVe1).text();
    CHECK(arm.find("Beta(8, 18190)") != std::string::npos);
    CHECK(arm.find("Beta(162, 18163)") != std::string::npos);
    CHECK(arm.find("VE = 1 - p1 / p2") != std::string::npos);
    CHECK(arm.find("improper") != std::string::npos);

    CHECK(disclose_model(ModelTag::Pooled, BetaParams(1, 1), kVe1).prior == "theta ~ Beta(1, 1)");
    CHECK(disclose_model(ModelTag::TwoArm, BetaParams(1, 1), kVe1).prior ==
          disclose_two_arm(kVe1).prior);
    CHECK(format_beta(BetaParams(8.700102, 163)) == "Beta(8.700102, 163)");
}

TEST_CASE("assembled report: order, blocks and wording") {
    const auto report = make_report();
    REQUIRE(report.summaries.size() == 4);
    CHECK(report.summaries[0].endpoint == "VE1");
    CHECK(report.summaries[0].model == ModelTag::Pooled);
    CHECK(report.summaries[1].model == ModelTag::TwoArm);
    CHECK(report.summaries[3].endpoint == "VE2");
    CHECK(report.statements.size() == 16);  // three thresholds plus the interval, per summary
    CHECK(report.verdicts.size() == 4);
    for (const auto& v : report.verdicts) CHECK(v.verdict.pass);

    const auto text = render_text(report);
    CHECK(text.find("1) Posterior probabilities of efficacy") != std::string::npos);
    CHECK(text.find("2) 95% Bayesian credible interval (BI) for VE: (90.3, 97.6)") !=
          std::string::npos);
    CHECK(text.find("(89.9, 97.3)") != std::string::npos);
    CHECK(text.find("3) Posterior distribution against regulatory thresholds") !=
          std::string::npos);
    CHECK(text.find("4) Complete model") != std::string::npos);
    CHECK(text.find("Observed VE (1 - IRR): 95.0%") != std::string::npos);
    CHECK(text.find("Posterior mean VE: 94.6%") != std::string::npos);
    CHECK_FALSE(std::regex_search(text, std::regex("\\bCI\\b")));
    CHECK(text.find("confidence interval for VE") == std::string::npos);

    CHECK(render_text(make_report()) == text);
}

TEST_CASE("reference comparison flags mismatches") {
    std::vector<ReportedValues> reported(2);
    reported[0] = {"VE1", ModelTag::Pooled, 95.0, 94.6, 90.3, 97.6};
    reported[1] = {"VE2", ModelTag::Pooled, 94.6, 94.3, 89.9, 97.3};
    const auto report = make_report(reported);
    REQUIRE(report.reference_checks.size() == 8);
    int differs = 0;
    for (const auto& c : report.reference_checks) {
        if (!c.matches) {
            ++differs;
            CHECK(c.endpoint == "VE2");
            CHECK(c.quantity == "posterior mean VE");
            CHECK(c.reported == "94.3");
            CHECK(c.computed == "94.2");
        }
    }
    CHECK(differs == 1);
    bool noted = false;
    for (const auto& n : report.notes) noted = noted || n.find("differ from the computed") != std::string::npos;
    CHECK(noted);
    CHECK(render_text(report).find("DIFFERS") != std::string::npos);

    // Half-away rounding turns the VE2 mean into a match.
    const auto half = make_report(reported, Rounding::HalfAwayFromZero);
    for (const auto& c : half.reference_checks) {
        if (c.quantity == "posterior mean VE") CHECK(c.matches);
    }
}

TEST_CASE("assembly rejects empty input") {
    CHECK_THROWS_AS(assemble_report({}, RegulatoryRule{}, {}, Provenance{}), ValidationError);
}
