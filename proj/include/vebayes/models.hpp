#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "vebayes/betacalc.hpp"

namespace vebayes {

// Observed data for one efficacy endpoint.
//
// The pooled view is (X, N): X cases in the vaccine arm out of N cases in
// total. The per-arm view is (X1, N1, X2, N2) with X1 = X and X2 = N - X, so
// both views describe the same cases. N1/N2 are participant counts; they may
// be zero when only the pooled model is needed.
class TrialCounts {
public:
    TrialCounts(std::string label, std::int64_t vaccine_cases, std::int64_t total_cases,
                std::int64_t vaccine_participants = 0,
                std::int64_t placebo_participants = 0);

    // Builds counts from the per-arm view (X1, N1, X2, N2).
    static TrialCounts from_arms(std::string label, std::int64_t x1, std::int64_t n1,
                                 std::int64_t x2, std::int64_t n2);

    const std::string& label() const noexcept { return label_; }
    std::int64_t vaccine_cases() const noexcept { return x_; }
    std::int64_t total_cases() const noexcept { return n_; }
    std::int64_t placebo_cases() const noexcept { return n_ - x_; }
    std::int64_t vaccine_participants() const noexcept { return n1_; }
    std::int64_t placebo_participants() const noexcept { return n2_; }
    bool has_arm_sizes() const noexcept { return n1_ > 0 && n2_ > 0; }

    friend bool operator==(const TrialCounts&, const TrialCounts&) = default;

private:
    std::string label_;
    std::int64_t x_;
    std::int64_t n_;
    std::int64_t n1_;
    std::int64_t n2_;
};

// Prior Beta(0.700102, 1) on the case-split parameter θ.
inline constexpr double kDefaultPriorA = 0.700102;
inline constexpr double kDefaultPriorB = 1.0;

// Binomial model on the case split: X | N, θ ~ Bin(N, θ), θ ~ Beta(prior).
// θ is the probability that an observed case came from the vaccine arm.
struct PooledModel {
    BetaParams prior{kDefaultPriorA, kDefaultPriorB};
};

// Independent binomials per arm, X_i | N_i, p_i ~ Bin(N_i, p_i), with arm
// posteriors p_i ~ Beta(X_i, N_i - X_i). That posterior corresponds to the
// improper prior p^-1 (1-p)^-1, not to a flat prior (which would give
// Beta(X_i + 1, N_i - X_i + 1)).
struct TwoArmModel {};

struct ArmPosteriors {
    BetaParams vaccine;
    BetaParams placebo;
};

// Interval endpoints on θ are clamped to (ε, 1 - ε) before mapping to VE.
inline constexpr double kThetaClamp = 1e-15;

// θ = (1 - VE) / (2 - VE). Requires ve < 1.
double theta_from_ve(double ve);
// VE = 1 - θ / (1 - θ). Requires θ in (0, 1).
double ve_from_theta(double theta);
// Derivative magnitude |dθ/dVE| = 1 / (2 - VE)^2.
double theta_ve_jacobian(double ve);

BetaParams pooled_posterior(const PooledModel& model, const TrialCounts& data);
ArmPosteriors arm_posteriors(const TwoArmModel& model, const TrialCounts& data);

// 1 - (X1/N1) / (X2/N2), as a fraction.
double observed_ve(const TrialCounts& data);

}  // namespace vebayes
