#include "vebayes/cli.hpp"

#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/core.h>

#include "json.hpp"
#include "vebayes/errors.hpp"
#include "vebayes/serialize.hpp"

#ifndef VEBAYES_VERSION
#define VEBAYES_VERSION "0.0.0"
#endif

namespace vebayes {

using nlohmann::json;

namespace {

// Field accessors that report a dotted path on failure.
class Reader {
public:
    explicit Reader(std::string_view source) : source_(source) {}

    [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
        throw ParseError(fmt::format("{}: {}: {}", source_, path, msg));
    }

    const json& object(const json& parent, const std::string& path, const char* key) const {
        if (!parent.contains(key)) fail(path, fmt::format("missing field '{}'", key));
        const json& v = parent.at(key);
        if (!v.is_object()) fail(path + "." + key, "expected an object");
        return v;
    }

    std::int64_t count(const json& parent, const std::string& path, const char* key) const {
        if (!parent.contains(key)) fail(path, fmt::format("missing field '{}'", key));
        const json& v = parent.at(key);
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
            fail(path + "." + key, fmt::format("expected a non-negative integer, got {}", v.dump()));
        }
        return v.get<std::int64_t>();
    }

    std::optional<double> number(const json& parent, const std::string& path, const char* key) const {
        if (!parent.contains(key)) return std::nullopt;
        const json& v = parent.at(key);
        if (!v.is_number()) fail(path + "." + key, "expected a number");
        return v.get<double>();
    }

    void only_keys(const json& obj, const std::string& path,
                   std::initializer_list<std::string_view> allowed) const {
        for (const auto& [key, _] : obj.items()) {
            bool ok = false;
            for (auto a : allowed) ok = ok || key == a;
            if (!ok) fail(path, fmt::format("unknown field '{}'", key));
        }
    }

private:
    std::string source_;
};

ReportedValues parse_reported(const Reader& rd, const json& j, const std::string& path,
                              const std::string& label, ModelTag model) {
    if (!j.is_object()) rd.fail(path, "expected an object");
    rd.only_keys(j, path, {"observed_ve", "posterior_mean_ve", "interval"});
    ReportedValues rv;
    rv.endpoint = label;
    rv.model = model;
    rv.observed_ve_pct = rd.number(j, path, "observed_ve");
    rv.posterior_mean_ve_pct = rd.number(j, path, "posterior_mean_ve");
    if (j.contains("interval")) {
        const json& iv = j.at("interval");
        if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
            rd.fail(path + ".interval", "expected [lower, upper] in percent");
        }
        rv.interval_lower_pct = iv[0].get<double>();
        rv.interval_upper_pct = iv[1].get<double>();
    }
    return rv;
}

EndpointInput parse_endpoint(const Reader& rd, const json& e, const std::string& path) {
    if (!e.is_object()) rd.fail(path, "expected an object");
    rd.only_keys(e, path, {"label", "description", "pooled", "arms", "reported"});
    if (!e.contains("label") || !e.at("label").is_string() ||
        e.at("label").get<std::string>().empty()) {
        rd.fail(path, "missing or empty 'label'");
    }
    const std::string label = e.at("label").get<std::string>();
    std::string description;
    if (e.contains("description")) {
        if (!e.at("description").is_string()) rd.fail(path + ".description", "expected a string");
        description = e.at("description").get<std::string>();
    }

    const bool has_pooled = e.contains("pooled");
    const bool has_arms = e.contains("arms");
    if (!has_pooled && !has_arms) rd.fail(path, "needs 'pooled' counts, 'arms' counts or both");

    std::optional<std::int64_t> x, n;
    if (has_pooled) {
        const json& p = rd.object(e, path, "pooled");
        const std::string pp = path + ".pooled";
        rd.only_keys(p, pp, {"vaccine_cases", "total_cases"});
        x = rd.count(p, pp, "vaccine_cases");
        n = rd.count(p, pp, "total_cases");
    }

    std::int64_t x1 = 0, n1 = 0, x2 = 0, n2 = 0;
    if (has_arms) {
        const json& a = rd.object(e, path, "arms");
        const std::string ap = path + ".arms";
        rd.only_keys(a, ap, {"vaccine", "placebo"});
        const json& v = rd.object(a, ap, "vaccine");
        const json& pl = rd.object(a, ap, "placebo");
        rd.only_keys(v, ap + ".vaccine", {"cases", "participants"});
        rd.only_keys(pl, ap + ".placebo", {"cases", "participants"});
        x1 = rd.count(v, ap + ".vaccine", "cases");
        n1 = rd.count(v, ap + ".vaccine", "participants");
        x2 = rd.count(pl, ap + ".placebo", "cases");
        n2 = rd.count(pl, ap + ".placebo", "participants");
        if (has_pooled && (*x != x1 || *n - *x != x2)) {
            rd.fail(path, fmt::format("inconsistent counts: pooled X={}, N={} implies {} vaccine "
                                      "and {} placebo cases, arms give {} and {}",
                                      *x, *n, *x, *n - *x, x1, x2));
        }
        if (!has_pooled) {
            x = x1;
            n = x1 + x2;
        }
    }

    std::optional<TrialCounts> counts;
    try {
        counts.emplace(label, *x, *n, n1, n2);
    } catch (const ValidationError& err) {
        rd.fail(path, err.what());
    }

    EndpointInput in{*counts, description, {}};
    if (e.contains("reported")) {
        const json& r = rd.object(e, path, "reported");
        const std::string rp = path + ".reported";
        rd.only_keys(r, rp, {"pooled", "two-arm"});
        if (r.contains("pooled")) {
            in.reported.push_back(parse_reported(rd, r.at("pooled"), rp + ".pooled", label, ModelTag::Pooled));
        }
        if (r.contains("two-arm")) {
            in.reported.push_back(parse_reported(rd, r.at("two-arm"), rp + ".two-arm", label, ModelTag::TwoArm));
        }
    }
    return in;
}

}  // namespace

std::vector<EndpointInput> parse_input(std::string_view text, std::string_view source) {
    const Reader rd(source);
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(fmt::format("{}: malformed document: {}", source, e.what()));
    }
    if (!doc.is_object()) rd.fail("$", "expected a top-level object");
    rd.only_keys(doc, "$", {"title", "endpoints"});
    if (!doc.contains("endpoints") || !doc.at("endpoints").is_array()) {
        rd.fail("$", "missing 'endpoints' array");
    }
    const json& eps = doc.at("endpoints");
    if (eps.empty()) rd.fail("$.endpoints", "endpoint list is empty");

    std::vector<EndpointInput> out;
    std::set<std::string> labels;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const std::string path = fmt::format("$.endpoints[{}]", i);
        EndpointInput in = parse_endpoint(rd, eps[i], path);
        if (!labels.insert(in.counts.label()).second) {
            rd.fail(path, fmt::format("duplicate endpoint label '{}'", in.counts.label()));
        }
        out.push_back(std::move(in));
    }
    return out;
}

std::vector<EndpointInput> parse_input_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(fmt::format("{}: cannot open input file", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_input(buf.str(), path.string());
}

ModelSelection model_selection_from_string(std::string_view s) {
    if (s == "pooled") return ModelSelection::Pooled;
    if (s == "two-arm") return ModelSelection::TwoArm;
    if (s == "both") return ModelSelection::Both;
    throw ValidationError(fmt::format("unknown model selection '{}'", s));
}

OutputFormat output_format_from_string(std::string_view s) {
    if (s == "text") return OutputFormat::Text;
    if (s == "json-doc") return OutputFormat::JsonDoc;
    if (s == "csv-plot") return OutputFormat::CsvPlot;
    throw ValidationError(fmt::format("unknown output format '{}'", s));
}

std::string_view to_string(ModelSelection m) noexcept {
    switch (m) {
        case ModelSelection::Pooled: return "pooled";
        case ModelSelection::TwoArm: return "two-arm";
        case ModelSelection::Both: return "both";
    }
    return "both";
}

std::string_view to_string(OutputFormat f) noexcept {
    switch (f) {
        case OutputFormat::Text: return "text";
        case OutputFormat::JsonDoc: return "json-doc";
        case OutputFormat::CsvPlot: return "csv-plot";
    }
    return "text";
}

std::string_view version() noexcept { return VEBAYES_VERSION; }

Report build_report(const RunConfig& config, const std::vector<EndpointInput>& inputs) {
    config.inference.validate();
    config.rule.validate();
    std::optional<PooledModel> pooled;
    try {
        pooled = PooledModel{BetaParams(config.prior_a, config.prior_b)};
    } catch (const DomainError& e) {
        throw ValidationError(fmt::format("invalid prior: {}", e.what()));
    }
    const bool run_pooled = config.models != ModelSelection::TwoArm;
    const bool run_two_arm = config.models != ModelSelection::Pooled;

    std::vector<PosteriorSummary> summaries;
    std::vector<ModelDisclosure> disclosures;
    std::vector<ReportedValues> reported;
    Provenance prov;
    prov.config = config.inference;
    prov.prior = pooled->prior;
    prov.version = std::string(version());
    if (run_pooled) prov.models.push_back(ModelTag::Pooled);
    if (run_two_arm) prov.models.push_back(ModelTag::TwoArm);

    for (const auto& in : inputs) {
        prov.data.push_back(in.counts);
        if (run_pooled) {
            summaries.push_back(summarize_pooled(*pooled, in.counts, config.inference));
            disclosures.push_back(disclose_pooled(*pooled, in.counts));
        }
        if (run_two_arm) {
            summaries.push_back(
                summarize_two_arm(TwoArmModel{}, in.counts, config.inference, config.threads));
            disclosures.push_back(disclose_two_arm(in.counts));
        }
        for (const auto& rv : in.reported) reported.push_back(rv);
    }
    return assemble_report(std::move(summaries), config.rule, std::move(disclosures),
                           std::move(prov), config.rounding, reported);
}

std::string render(const Report& report, OutputFormat format) {
    switch (format) {
        case OutputFormat::Text: return render_text(report);
        case OutputFormat::JsonDoc: return render_json(report);
        case OutputFormat::CsvPlot: return render_csv_plot(report);
    }
    return render_text(report);
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError(fmt::format("{}: cannot open for writing", path.string()));
    f << content;
    if (!f) throw ValidationError(fmt::format("{}: write failed", path.string()));
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        const auto inputs = parse_input_file(config.input);
        if (config.models == ModelSelection::Pooled && config.mc_options_given) {
            err << "warning: Monte Carlo options are ignored when only the pooled model runs\n";
        }
        const Report report = build_report(config, inputs);
        const std::string body = render(report, config.format);
        std::string svg;
        if (config.svg) svg = render_svg(report);

        if (config.out) {
            write_file(*config.out, body);
        } else {
            out << body;
        }
        if (config.svg) write_file(*config.svg, svg);
        return kExitOk;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace vebayes
