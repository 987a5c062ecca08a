#include "vebayes/inference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <fmt/core.h>

#include "vebayes/errors.hpp"

namespace vebayes {

namespace {

void check_level(double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw DomainError(fmt::format("credible level must be in (0, 1), got {}", level));
    }
}

void check_sample_count(std::span<const double> draws) {
    if (draws.size() < kMinMcSamples) {
        throw InsufficientSamplesError(fmt::format(
            "Monte Carlo summary needs at least {} draws, got {}", kMinMcSamples,
            draws.size()));
    }
}

double clamp_theta(double theta) {
    return std::clamp(theta, kThetaClamp, 1.0 - kThetaClamp);
}

std::vector<double> sorted_copy(std::span<const double> draws) {
    std::vector<double> sorted(draws.begin(), draws.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted;
}

DensityGrid even_grid(double lo, double hi, std::size_t points, auto&& density) {
    DensityGrid grid(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        const double v = i + 1 == points ? hi : lo + step * static_cast<double>(i);
        grid[i] = {v, density(v)};
    }
    return grid;
}

void check_grid_points(std::size_t points) {
    if (points < kMinGridPoints) {
        throw DomainError(
            fmt::format("density grid needs at least {} points, got {}", kMinGridPoints, points));
    }
}

}  // namespace

std::string_view to_string(IntervalMethod m) noexcept {
    return m == IntervalMethod::ExactQuantile ? "exact-quantile" : "monte-carlo";
}

std::string_view to_string(ModelTag m) noexcept {
    return m == ModelTag::Pooled ? "pooled" : "two-arm";
}

IntervalMethod interval_method_from_string(std::string_view s) {
    if (s == "exact-quantile") return IntervalMethod::ExactQuantile;
    if (s == "monte-carlo") return IntervalMethod::MonteCarlo;
    throw ValidationError(fmt::format("unknown interval method '{}'", s));
}

ModelTag model_tag_from_string(std::string_view s) {
    if (s == "pooled") return ModelTag::Pooled;
    if (s == "two-arm") return ModelTag::TwoArm;
    throw ValidationError(fmt::format("unknown model '{}'", s));
}

void InferenceConfig::validate() const {
    if (!(level > 0.0 && level < 1.0)) {
        throw ValidationError(fmt::format("level must be in (0, 1), got {}", level));
    }
    for (double t : thresholds) {
        if (!(t < 1.0) || !std::isfinite(t)) {
            throw ValidationError(fmt::format("VE threshold must be finite and < 1, got {}", t));
        }
    }
    if (mc_samples < kMinMcSamples) {
        throw ValidationError(
            fmt::format("mc-samples must be at least {}, got {}", kMinMcSamples, mc_samples));
    }
    if (grid_points < kMinGridPoints) {
        throw ValidationError(
            fmt::format("grid-points must be at least {}, got {}", kMinGridPoints, grid_points));
    }
}

CredibleInterval pooled_interval(const BetaParams& posterior, double level) {
    check_level(level);
    // VE is decreasing in θ: the upper θ quantile gives the lower VE bound.
    const double theta_hi = clamp_theta(beta_quantile(0.5 * (1.0 + level), posterior));
    const double theta_lo = clamp_theta(beta_quantile(0.5 * (1.0 - level), posterior));
    return {ve_from_theta(theta_hi), ve_from_theta(theta_lo), level,
            IntervalMethod::ExactQuantile};
}

double pooled_threshold_prob(const BetaParams& posterior, double threshold) {
    return reg_inc_beta(theta_from_ve(threshold), posterior);
}

double pooled_mean_ve(const BetaParams& posterior) {
    // E[θ/(1-θ)] = a / (b - 1) for θ ~ Beta(a, b).
    if (!(posterior.b() > 1.0)) {
        throw DomainError(fmt::format(
            "posterior mean of VE diverges for second shape b = {} <= 1", posterior.b()));
    }
    return 1.0 - posterior.a() / (posterior.b() - 1.0);
}

double pooled_median_ve(const BetaParams& posterior) {
    return ve_from_theta(clamp_theta(beta_quantile(0.5, posterior)));
}

DensityGrid pooled_density_grid(const BetaParams& posterior, std::size_t points) {
    check_grid_points(points);
    const double tail = 0.5 * (1.0 - kDensityWindowMass);
    const double lo = ve_from_theta(clamp_theta(beta_quantile(1.0 - tail, posterior)));
    const double hi = ve_from_theta(clamp_theta(beta_quantile(tail, posterior)));
    return even_grid(lo, hi, points, [&](double ve) {
        return beta_pdf(theta_from_ve(ve), posterior) * theta_ve_jacobian(ve);
    });
}

std::vector<double> two_arm_ve_draws(const ArmPosteriors& arms, const InferenceConfig& cfg,
                                     unsigned threads) {
    const std::size_t n = cfg.mc_samples;
    std::vector<double> draws(n);
    const std::size_t chunks = (n + kMcChunkSize - 1) / kMcChunkSize;

    auto fill_chunk = [&](std::size_t chunk) {
        Xoshiro256 rng = SeededStream{cfg.seed, chunk}.generator();
        const std::size_t begin = chunk * kMcChunkSize;
        const std::size_t end = std::min(n, begin + kMcChunkSize);
        for (std::size_t i = begin; i < end; ++i) {
            const double p1 = sample_beta_one(arms.vaccine, rng);
            const double p2 = sample_beta_one(arms.placebo, rng);
            draws[i] = 1.0 - p1 / p2;
        }
    };

    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) fill_chunk(c);
        return draws;
    }
    std::atomic<std::size_t> next_chunk{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t c = next_chunk++; c < chunks; c = next_chunk++) fill_chunk(c);
        });
    }
    pool.clear();  // joins
    return draws;
}

double mc_quantile(std::span<const double> sorted_draws, double p) {
    if (sorted_draws.empty()) throw InsufficientSamplesError("empty sample");
    const double h = static_cast<double>(sorted_draws.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted_draws.size()) return sorted_draws.back();
    const double frac = h - static_cast<double>(lo);
    return sorted_draws[lo] + frac * (sorted_draws[lo + 1] - sorted_draws[lo]);
}

CredibleInterval mc_interval(std::span<const double> draws, double level) {
    check_level(level);
    check_sample_count(draws);
    const auto sorted = sorted_copy(draws);
    return {mc_quantile(sorted, 0.5 * (1.0 - level)), mc_quantile(sorted, 0.5 * (1.0 + level)),
            level, IntervalMethod::MonteCarlo};
}

double mc_threshold_prob(std::span<const double> draws, double threshold) {
    check_sample_count(draws);
    const auto above = std::count_if(draws.begin(), draws.end(),
                                     [threshold](double v) { return v > threshold; });
    return static_cast<double>(above) / static_cast<double>(draws.size());
}

double mc_mean(std::span<const double> draws) {
    check_sample_count(draws);
    // Neumaier compensated summation.
    double sum = 0.0;
    double comp = 0.0;
    for (double v : draws) {
        const double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    return (sum + comp) / static_cast<double>(draws.size());
}

DensityGrid mc_density_grid(std::span<const double> draws, std::size_t points) {
    check_grid_points(points);
    check_sample_count(draws);
    const auto sorted = sorted_copy(draws);
    const double tail = 0.5 * (1.0 - kDensityWindowMass);
    double lo = mc_quantile(sorted, tail);
    double hi = mc_quantile(sorted, 1.0 - tail);
    if (!(hi > lo)) {
        const double pad = 1e-6 * std::max(1.0, std::fabs(lo));
        lo -= pad;
        hi += pad;
    }
    const double width = (hi - lo) / static_cast<double>(points);
    std::vector<std::size_t> counts(points, 0);
    std::size_t inside = 0;
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), lo);
    const auto last = std::upper_bound(sorted.begin(), sorted.end(), hi);
    for (auto it = first; it != last; ++it) {
        auto bin = static_cast<std::size_t>((*it - lo) / width);
        counts[std::min(bin, points - 1)] += 1;
        ++inside;
    }
    DensityGrid grid(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i].value = lo + (static_cast<double>(i) + 0.5) * width;
        grid[i].density =
            static_cast<double>(counts[i]) / (static_cast<double>(inside) * width);
    }
    return grid;
}

DensityGrid beta_density_grid(const BetaParams& p, std::size_t points) {
    check_grid_points(points);
    const double tail = 0.5 * (1.0 - kDensityWindowMass);
    const double lo = beta_quantile(tail, p);
    const double hi = beta_quantile(1.0 - tail, p);
    return even_grid(lo, hi, points, [&](double x) { return beta_pdf(x, p); });
}

double integrate_grid(const DensityGrid& grid) {
    double area = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        area += 0.5 * (grid[i].density + grid[i - 1].density) *
                (grid[i].value - grid[i - 1].value);
    }
    return area;
}

PosteriorSummary summarize_pooled(const PooledModel& model, const TrialCounts& data,
                                  const InferenceConfig& cfg) {
    cfg.validate();
    const BetaParams post = pooled_posterior(model, data);
    PosteriorSummary s;
    s.endpoint = data.label();
    s.model = ModelTag::Pooled;
    if (data.has_arm_sizes() && data.placebo_cases() > 0) s.observed_ve = observed_ve(data);
    if (post.b() > 1.0) s.posterior_mean_ve = pooled_mean_ve(post);
    s.posterior_median_ve = pooled_median_ve(post);
    s.interval = pooled_interval(post, cfg.level);
    for (double t : cfg.thresholds) s.threshold_probs.push_back({t, pooled_threshold_prob(post, t)});
    s.density = pooled_density_grid(post, cfg.grid_points);
    return s;
}

PosteriorSummary summarize_two_arm(const TwoArmModel& model, const TrialCounts& data,
                                   const InferenceConfig& cfg, unsigned threads) {
    cfg.validate();
    const ArmPosteriors arms = arm_posteriors(model, data);
    const auto draws = two_arm_ve_draws(arms, cfg, threads);
    const auto sorted = sorted_copy(draws);
    PosteriorSummary s;
    s.endpoint = data.label();
    s.model = ModelTag::TwoArm;
    s.observed_ve = observed_ve(data);
    s.posterior_mean_ve = mc_mean(draws);
    s.posterior_median_ve = mc_quantile(sorted, 0.5);
    s.interval = {mc_quantile(sorted, 0.5 * (1.0 - cfg.level)),
                  mc_quantile(sorted, 0.5 * (1.0 + cfg.level)), cfg.level,
                  IntervalMethod::MonteCarlo};
    for (double t : cfg.thresholds) s.threshold_probs.push_back({t, mc_threshold_prob(sorted, t)});
    s.density = mc_density_grid(sorted, cfg.grid_points);
    s.vaccine_rate_density = beta_density_grid(arms.vaccine, cfg.grid_points);
    s.placebo_rate_density = beta_density_grid(arms.placebo, cfg.grid_points);
    return s;
}

}  // namespace vebayes
