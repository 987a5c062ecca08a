#include "vebayes/models.hpp"

#include <cmath>

#include <fmt/core.h>

#include "vebayes/errors.hpp"

namespace vebayes {

TrialCounts::TrialCounts(std::string label, std::int64_t vaccine_cases,
                         std::int64_t total_cases, std::int64_t vaccine_participants,
                         std::int64_t placebo_participants)
    : label_(std::move(label)),
      x_(vaccine_cases),
      n_(total_cases),
      n1_(vaccine_participants),
      n2_(placebo_participants) {
    if (x_ < 0 || n_ < 0 || n1_ < 0 || n2_ < 0) {
        throw ValidationError(fmt::format("endpoint '{}': counts must be non-negative", label_));
    }
    if (x_ > n_) {
        throw ValidationError(fmt::format(
            "endpoint '{}': vaccine cases X={} exceed total cases N={}", label_, x_, n_));
    }
    if (n1_ > 0 && x_ > n1_) {
        throw ValidationError(fmt::format(
            "endpoint '{}': vaccine cases X1={} exceed vaccine participants N1={}", label_,
            x_, n1_));
    }
    if (n2_ > 0 && n_ - x_ > n2_) {
        throw ValidationError(fmt::format(
            "endpoint '{}': placebo cases X2={} exceed placebo participants N2={}", label_,
            n_ - x_, n2_));
    }
    if ((n1_ > 0) != (n2_ > 0)) {
        throw ValidationError(fmt::format(
            "endpoint '{}': participant counts must be given for both arms or neither", label_));
    }
}

TrialCounts TrialCounts::from_arms(std::string label, std::int64_t x1, std::int64_t n1,
                                   std::int64_t x2, std::int64_t n2) {
    if (x1 < 0 || x2 < 0) {
        throw ValidationError(fmt::format("endpoint '{}': counts must be non-negative", label));
    }
    if (n1 <= 0 || n2 <= 0) {
        throw ValidationError(
            fmt::format("endpoint '{}': arm participant counts must be positive", label));
    }
    return TrialCounts(std::move(label), x1, x1 + x2, n1, n2);
}

double theta_from_ve(double ve) {
    if (!(ve < 1.0)) {
        throw DomainError(fmt::format("theta_from_ve requires VE < 1, got {}", ve));
    }
    return (1.0 - ve) / (2.0 - ve);
}

double ve_from_theta(double theta) {
    if (!(theta > 0.0 && theta < 1.0)) {
        throw DomainError(fmt::format("ve_from_theta requires theta in (0, 1), got {}", theta));
    }
    // 1 - θ/(1-θ) written as a single quotient to avoid cancellation near VE = 0.
    return (1.0 - 2.0 * theta) / (1.0 - theta);
}

double theta_ve_jacobian(double ve) {
    if (!(ve < 1.0)) throw DomainError("theta_ve_jacobian requires VE < 1");
    const double d = 2.0 - ve;
    return 1.0 / (d * d);
}

BetaParams pooled_posterior(const PooledModel& model, const TrialCounts& data) {
    const auto x = static_cast<double>(data.vaccine_cases());
    const auto n = static_cast<double>(data.total_cases());
    return {model.prior.a() + x, model.prior.b() + n - x};
}

ArmPosteriors arm_posteriors(const TwoArmModel&, const TrialCounts& data) {
    if (!data.has_arm_sizes()) {
        throw ValidationError(fmt::format(
            "endpoint '{}': two-arm model needs participant counts N1 and N2", data.label()));
    }
    const auto check = [&](int arm, std::int64_t x, std::int64_t n) {
        if (x == 0 || x == n) {
            throw ImproperPosteriorError(
                arm, fmt::format("endpoint '{}': improper posterior for arm {} "
                                 "(X{}={}, N{}={} gives a zero beta shape)",
                                 data.label(), arm, arm, x, arm, n));
        }
    };
    const std::int64_t x1 = data.vaccine_cases();
    const std::int64_t n1 = data.vaccine_participants();
    const std::int64_t x2 = data.placebo_cases();
    const std::int64_t n2 = data.placebo_participants();
    check(1, x1, n1);
    check(2, x2, n2);
    return {BetaParams(static_cast<double>(x1), static_cast<double>(n1 - x1)),
            BetaParams(static_cast<double>(x2), static_cast<double>(n2 - x2))};
}

double observed_ve(const TrialCounts& data) {
    if (!data.has_arm_sizes()) {
        throw ValidationError(fmt::format(
            "endpoint '{}': observed VE needs participant counts N1 and N2", data.label()));
    }
    if (data.placebo_cases() == 0) {
        throw ValidationError(fmt::format(
            "endpoint '{}': placebo arm has no cases, incidence rate ratio is undefined",
            data.label()));
    }
    const double rate1 = static_cast<double>(data.vaccine_cases()) /
                         static_cast<double>(data.vaccine_participants());
    const double rate2 = static_cast<double>(data.placebo_cases()) /
                         static_cast<double>(data.placebo_participants());
    return 1.0 - rate1 / rate2;
}

}  // namespace vebayes
