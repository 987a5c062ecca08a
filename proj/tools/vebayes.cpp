// Command-line front end for the vaccine-efficacy posterior models.

#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "vebayes/cli.hpp"
#include "vebayes/errors.hpp"

namespace {

std::vector<double> parse_thresholds(const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) {
            throw vebayes::ValidationError("--thresholds: cannot parse '" + item + "'");
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian posterior summaries and reports for vaccine-efficacy trials"};
    app.set_version_flag("--version", std::string(vebayes::version()));

    vebayes::RunConfig config;
    config.threads = std::max(1u, std::thread::hardware_concurrency());
    std::string input;
    std::string model = "both";
    std::string format = "text";
    std::string rounding = "truncate";
    std::string thresholds = "0.3,0.5,0.9";
    std::string out;
    std::string svg;

    app.add_option("input", input, "Trial data document (JSON)")->required();
    app.add_option("--model", model, "Models to run")
        ->check(CLI::IsMember({"pooled", "two-arm", "both"}))
        ->capture_default_str();
    app.add_option("--level", config.inference.level, "Credible level of the BI")
        ->capture_default_str();
    app.add_option("--thresholds", thresholds, "Comma-separated VE thresholds (fractions)")
        ->capture_default_str();
    auto* mc_samples = app.add_option("--mc-samples", config.inference.mc_samples,
                                      "Monte Carlo draws for the two-arm model")
                           ->capture_default_str();
    auto* seed = app.add_option("--seed", config.inference.seed, "Monte Carlo seed")
                     ->capture_default_str();
    app.add_option("--grid-points", config.inference.grid_points, "Density grid resolution")
        ->capture_default_str();
    app.add_option("--prior-a", config.prior_a, "First shape of the pooled-model prior")
        ->capture_default_str();
    app.add_option("--prior-b", config.prior_b, "Second shape of the pooled-model prior")
        ->capture_default_str();
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"text", "json-doc", "csv-plot"}))
        ->capture_default_str();
    app.add_option("--out", out, "Output file (default: standard output)");
    app.add_option("--svg", svg, "Also write a density plot as SVG to this path");
    app.add_option("--rounding", rounding, "How VE percentages are cut to one decimal")
        ->check(CLI::IsMember({"truncate", "half-away"}))
        ->capture_default_str();
    app.add_option("--threads", config.threads,
                   "Worker threads for Monte Carlo draws (results do not depend on it)");
    app.add_option("--min-observed-ve", config.rule.min_observed_ve,
                   "Regulatory rule: minimum observed VE")
        ->capture_default_str();
    app.add_option("--min-bi-lower", config.rule.min_interval_lower,
                   "Regulatory rule: BI lower bound must exceed this")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : vebayes::kExitValidation;
    }

    try {
        config.input = input;
        config.models = vebayes::model_selection_from_string(model);
        config.format = vebayes::output_format_from_string(format);
        config.rounding = vebayes::rounding_from_string(rounding);
        config.inference.thresholds = parse_thresholds(thresholds);
        if (!out.empty()) config.out = out;
        if (!svg.empty()) config.svg = svg;
        config.mc_options_given = mc_samples->count() > 0 || seed->count() > 0;
    } catch (const vebayes::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return vebayes::kExitValidation;
    }
    return vebayes::run(config, std::cout, std::cerr);
}
