#pragma once

// Beta-distribution numerics: log-gamma, the regularized incomplete beta
// function, its inverse and seeded beta sampling. Everything here is a pure
// function of its arguments.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace vebayes {

// Shape pair of a beta distribution. Construction rejects non-positive or
// non-finite shapes with DomainError.
class BetaParams {
public:
    BetaParams(double a, double b);

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double mean() const noexcept { return a_ / (a_ + b_); }

    friend bool operator==(const BetaParams&, const BetaParams&) = default;

private:
    double a_;
    double b_;
};

// ln Γ(x) for x > 0.
//
// x < 10: Lanczos approximation (g = 7, 9 terms), relative error ~1e-15.
// x >= 10: Stirling series through the x^-9 term; truncation error is below
// 1/(1188 x^9) < 1e-12 at x = 10 and falls off quickly.
double log_gamma(double x);

// ln B(a, b). Uses Stirling corrections when both shapes are large so that the
// huge lnΓ terms cancel analytically rather than in floating point.
double log_beta(double a, double b);

// Beta(a, b) density at x in [0, 1]; +inf at an endpoint where the density
// diverges.
double beta_pdf(double x, const BetaParams& p);

// I_x(a, b). Modified Lentz continued fraction, evaluated on whichever side of
// the mean converges fastest; converged when the relative update is below
// 1e-15. Throws DomainError for x outside [0, 1] and NumericalError if the
// fraction has not converged after 10000 terms.
double reg_inc_beta(double x, const BetaParams& p);

// Inverse of I_x(a, b) in x. Safeguarded Newton iteration: a normal
// approximation seeds the first iterate, the bracket [lo, hi] is tightened
// every step and any Newton step leaving it is replaced by bisection.
// Converges to |I_x - q| <= 1e-12 or to adjacent doubles; throws
// NumericalError after 200 iterations otherwise.
double beta_quantile(double q, const BetaParams& p);

inline constexpr int kQuantileMaxIterations = 200;

// xoshiro256** seeded from a 64-bit value through splitmix64.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed) noexcept;

    std::uint64_t next() noexcept;
    // Advances by 2^128 steps.
    void jump() noexcept;
    // Uniform on the open interval (0, 1).
    double uniform() noexcept;

private:
    std::array<std::uint64_t, 4> s_;
};

// Identifies a reproducible draw sequence. Stream k of a seed starts 2^128*k
// steps into the generator sequence, so distinct streams never overlap.
struct SeededStream {
    std::uint64_t seed = 0;
    std::uint64_t index = 0;

    Xoshiro256 generator() const noexcept;
};

double sample_standard_normal(Xoshiro256& rng) noexcept;
// Gamma(shape, 1) by Marsaglia-Tsang squeeze/rejection; shapes below one use
// Gamma(shape + 1) * U^(1/shape).
double sample_gamma(double shape, Xoshiro256& rng);
// One Beta(a, b) draw as G_a / (G_a + G_b).
double sample_beta_one(const BetaParams& p, Xoshiro256& rng);

// n independent Beta(a, b) draws from the given stream.
std::vector<double> sample_beta(const BetaParams& p, const SeededStream& stream,
                                std::size_t n);

}  // namespace vebayes
