#pragma once

// Posterior summaries: exact for the pooled model, Monte Carlo for the two-arm
// model. All VE quantities are fractions (0.95 == 95%).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vebayes/betacalc.hpp"
#include "vebayes/models.hpp"

namespace vebayes {

enum class IntervalMethod { ExactQuantile, MonteCarlo };
enum class ModelTag { Pooled, TwoArm };

std::string_view to_string(IntervalMethod m) noexcept;
std::string_view to_string(ModelTag m) noexcept;
IntervalMethod interval_method_from_string(std::string_view s);
ModelTag model_tag_from_string(std::string_view s);

struct CredibleInterval {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;
    IntervalMethod method = IntervalMethod::ExactQuantile;

    friend bool operator==(const CredibleInterval&, const CredibleInterval&) = default;
};

struct InferenceConfig {
    double level = 0.95;
    std::vector<double> thresholds = {0.3, 0.5, 0.9};
    std::size_t mc_samples = 1'000'000;
    std::uint64_t seed = 0;
    std::size_t grid_points = 512;

    // Throws ValidationError when a field is out of range.
    void validate() const;
};

inline constexpr std::size_t kMinMcSamples = 10'000;
inline constexpr std::size_t kMinGridPoints = 16;
// Draws are produced in chunks of this size; chunk k uses stream index k.
inline constexpr std::size_t kMcChunkSize = 65'536;
// Central probability mass covered by density grids.
inline constexpr double kDensityWindowMass = 0.9999;

struct DensityPoint {
    double value = 0.0;
    double density = 0.0;

    friend bool operator==(const DensityPoint&, const DensityPoint&) = default;
};
using DensityGrid = std::vector<DensityPoint>;

struct ThresholdProbability {
    double threshold = 0.0;
    double probability = 0.0;

    friend bool operator==(const ThresholdProbability&, const ThresholdProbability&) = default;
};

struct PosteriorSummary {
    std::string endpoint;
    ModelTag model = ModelTag::Pooled;
    std::optional<double> observed_ve;        // absent without participant counts
    std::optional<double> posterior_mean_ve;  // absent when the mean diverges
    double posterior_median_ve = 0.0;
    CredibleInterval interval;
    std::vector<ThresholdProbability> threshold_probs;
    DensityGrid density;
    // Two-arm only: posterior densities of the vaccine and placebo infection rates.
    DensityGrid vaccine_rate_density;
    DensityGrid placebo_rate_density;

    friend bool operator==(const PosteriorSummary&, const PosteriorSummary&) = default;
};

// --- pooled model, exact ---

CredibleInterval pooled_interval(const BetaParams& posterior, double level);
// Pr(VE > threshold | data) = I_{θ(threshold)}(a, b).
double pooled_threshold_prob(const BetaParams& posterior, double threshold);
// E[VE] = 1 - a / (b - 1); throws DomainError when b <= 1 (mean diverges).
double pooled_mean_ve(const BetaParams& posterior);
double pooled_median_ve(const BetaParams& posterior);
// Density of VE on the central window, by change of variables from θ.
DensityGrid pooled_density_grid(const BetaParams& posterior, std::size_t points);

// --- two-arm model, Monte Carlo ---

// cfg.mc_samples draws of 1 - p1/p2. The result depends only on
// (seed, mc_samples); `threads` only changes how chunks are scheduled.
std::vector<double> two_arm_ve_draws(const ArmPosteriors& arms, const InferenceConfig& cfg,
                                     unsigned threads = 1);

// Equal-tailed interval from empirical quantiles (linear interpolation between
// order statistics, h = (n - 1) p).
CredibleInterval mc_interval(std::span<const double> draws, double level);
double mc_quantile(std::span<const double> sorted_draws, double p);
// Fraction of draws strictly above the threshold.
double mc_threshold_prob(std::span<const double> draws, double threshold);
double mc_mean(std::span<const double> draws);
// Fixed-width histogram over the central window of the draws, normalized to
// unit area; values are bin centres.
DensityGrid mc_density_grid(std::span<const double> draws, std::size_t points);

// Beta density on its central window (per-arm infection-rate curves).
DensityGrid beta_density_grid(const BetaParams& p, std::size_t points);

// Trapezoidal integral of a density grid.
double integrate_grid(const DensityGrid& grid);

// --- whole-endpoint summaries ---

PosteriorSummary summarize_pooled(const PooledModel& model, const TrialCounts& data,
                                  const InferenceConfig& cfg);
PosteriorSummary summarize_two_arm(const TwoArmModel& model, const TrialCounts& data,
                                   const InferenceConfig& cfg, unsigned threads = 1);

}  // namespace vebayes
