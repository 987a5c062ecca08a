#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vebayes/errors.hpp"
#include "vebayes/inference.hpp"
#include "vebayes/report.hpp"

namespace vebayes {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

// Input document error; the message carries line or field context.
class ParseError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

struct EndpointInput {
    TrialCounts counts;
    std::string description;
    std::vector<ReportedValues> reported;
};

// Parses the JSON trial-data document (schema in docs/input-format.md).
// `source` names the document in error messages.
std::vector<EndpointInput> parse_input(std::string_view text, std::string_view source = "<input>");
std::vector<EndpointInput> parse_input_file(const std::filesystem::path& path);

enum class ModelSelection { Pooled, TwoArm, Both };
enum class OutputFormat { Text, JsonDoc, CsvPlot };

ModelSelection model_selection_from_string(std::string_view s);
OutputFormat output_format_from_string(std::string_view s);
std::string_view to_string(ModelSelection m) noexcept;
std::string_view to_string(OutputFormat f) noexcept;

struct RunConfig {
    ModelSelection models = ModelSelection::Both;
    InferenceConfig inference;
    double prior_a = kDefaultPriorA;
    double prior_b = kDefaultPriorB;
    RegulatoryRule rule;
    Rounding rounding = Rounding::TruncateTowardZero;
    std::filesystem::path input;
    OutputFormat format = OutputFormat::Text;
    std::optional<std::filesystem::path> out;  // standard output when empty
    std::optional<std::filesystem::path> svg;
    unsigned threads = 1;
    // Set when Monte Carlo options were given explicitly; they are ignored
    // with a warning if only the pooled model runs.
    bool mc_options_given = false;
};

// Builds the report for a configuration without writing anything.
Report build_report(const RunConfig& config, const std::vector<EndpointInput>& inputs);
std::string render(const Report& report, OutputFormat format);

// Runs the full pipeline. Output goes to config.out (or `out`) only once
// everything has succeeded; diagnostics go to `err`. Returns 0 on success, 1
// on validation errors, 2 on numerical failures.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

std::string_view version() noexcept;

}  // namespace vebayes
