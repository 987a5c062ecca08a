#include "vebayes/betacalc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/core.h>

#include "vebayes/errors.hpp"

namespace vebayes {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 ln(2π)

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
constexpr double kLanczosG = 7.0;

constexpr double kStirlingCutoff = 10.0;

// lnΓ(x) - [(x - 1/2) ln x - x + 0.5 ln 2π] for x >= 10.
double stirling_correction(double x) {
    const double r = 1.0 / x;
    const double r2 = r * r;
    return r * (1.0 / 12.0 -
                r2 * (1.0 / 360.0 -
                      r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 / 1188.0))));
}

double lanczos_log_gamma(double x) {
    // Γ(x) = Γ(z + 1) with z = x - 1.
    const double z = x - 1.0;
    double sum = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) {
        sum += kLanczos[i] / (z + static_cast<double>(i));
    }
    const double t = z + kLanczosG + 0.5;
    return kHalfLog2Pi + (z + 0.5) * std::log(t) - t + std::log(sum);
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double x, double a, double b) {
    constexpr int kMaxTerms = 10000;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxTerms; ++m) {
        const double dm = m;
        const double m2 = 2.0 * dm;
        double aa = dm * (b - dm) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + dm) * (qab + dm) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw NumericalError(fmt::format(
        "incomplete beta continued fraction did not converge (x={}, a={}, b={})",
        x, a, b));
}

// Acklam-style rational approximation of the standard normal quantile; only
// used to seed the root finder, so ~1e-3 accuracy is plenty.
double approx_normal_quantile(double p) {
    const double pl = std::min(p, 1.0 - p);
    const double t = std::sqrt(-2.0 * std::log(pl));
    const double z =
        t - (2.515517 + 0.802853 * t + 0.010328 * t * t) /
                (1.0 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t * t * t);
    return p < 0.5 ? -z : z;
}

double initial_quantile_guess(double q, double a, double b) {
    const double s = a + b;
    const double mean = a / s;
    const double sd = std::sqrt(a * b / (s * s * (s + 1.0)));
    const double x = mean + approx_normal_quantile(q) * sd;
    if (x > 0.0 && x < 1.0) return x;
    // Tail approximations I_x ≈ x^a / (a B) near 0 and 1 - (1-x)^b / (b B) near 1.
    const double lb = log_beta(a, b);
    if (x <= 0.0) return std::min(0.5, std::exp((std::log(q) + std::log(a) + lb) / a));
    return std::max(0.5, -std::expm1((std::log1p(-q) + std::log(b) + lb) / b));
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

BetaParams::BetaParams(double a, double b) : a_(a), b_(b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError(
            fmt::format("beta shapes must be positive and finite, got ({}, {})", a, b));
    }
}

double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError(fmt::format("log_gamma requires x > 0, got {}", x));
    }
    if (x < 0.5) return lanczos_log_gamma(x + 1.0) - std::log(x);
    if (x < kStirlingCutoff) return lanczos_log_gamma(x);
    return (x - 0.5) * std::log(x) - x + kHalfLog2Pi + stirling_correction(x);
}

double log_beta(double a, double b) {
    const double p = std::min(a, b);
    const double q = std::max(a, b);
    if (!(p > 0.0)) throw DomainError("log_beta requires positive shapes");
    const double pq = p + q;
    if (p >= kStirlingCutoff) {
        const double corr =
            stirling_correction(p) + stirling_correction(q) - stirling_correction(pq);
        return -0.5 * std::log(q) + kHalfLog2Pi + corr + (p - 0.5) * std::log(p / pq) +
               q * std::log1p(-p / pq);
    }
    if (q >= kStirlingCutoff) {
        const double corr = stirling_correction(q) - stirling_correction(pq);
        return log_gamma(p) + corr + p - p * std::log(pq) +
               (q - 0.5) * std::log1p(-p / pq);
    }
    return log_gamma(p) + log_gamma(q) - log_gamma(pq);
}

double beta_pdf(double x, const BetaParams& p) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError(fmt::format("beta_pdf requires x in [0, 1], got {}", x));
    }
    const double a = p.a();
    const double b = p.b();
    if (x == 0.0) {
        if (a < 1.0) return std::numeric_limits<double>::infinity();
        return a == 1.0 ? std::exp(-log_beta(a, b)) : 0.0;
    }
    if (x == 1.0) {
        if (b < 1.0) return std::numeric_limits<double>::infinity();
        return b == 1.0 ? std::exp(-log_beta(a, b)) : 0.0;
    }
    return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b));
}

double reg_inc_beta(double x, const BetaParams& p) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError(fmt::format("reg_inc_beta requires x in [0, 1], got {}", x));
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double a = p.a();
    const double b = p.b();
    const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::clamp(front * beta_continued_fraction(x, a, b) / a, 0.0, 1.0);
    }
    return std::clamp(1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b, 0.0, 1.0);
}

double beta_quantile(double q, const BetaParams& p) {
    if (!(q > 0.0 && q < 1.0)) {
        throw DomainError(fmt::format("beta_quantile requires q in (0, 1), got {}", q));
    }
    constexpr double kTol = 1e-12;
    double lo = 0.0;
    double hi = 1.0;
    double x = initial_quantile_guess(q, p.a(), p.b());
    double step_before_last = hi - lo;
    double last_step = step_before_last;

    for (int it = 0; it < kQuantileMaxIterations; ++it) {
        const double f = reg_inc_beta(x, p) - q;
        if (std::fabs(f) <= kTol) return x;
        if (f < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        if (std::nextafter(lo, 1.0) >= hi) {
            // Bracket is down to adjacent doubles; pick the closer end.
            const double flo = lo > 0.0 ? std::fabs(reg_inc_beta(lo, p) - q) : q;
            const double fhi = hi < 1.0 ? std::fabs(reg_inc_beta(hi, p) - q) : 1.0 - q;
            return flo <= fhi ? lo : hi;
        }

        const double density = beta_pdf(x, p);
        double next = std::numeric_limits<double>::quiet_NaN();
        if (density > 0.0 && std::isfinite(density)) next = x - f / density;
        const double newton_step = std::fabs(next - x);
        // Bisect when Newton leaves the bracket or is not at least halving the
        // step length of two iterations ago.
        if (!(next > lo && next < hi) || !(2.0 * newton_step < step_before_last)) {
            next = 0.5 * (lo + hi);
        }
        step_before_last = last_step;
        last_step = std::fabs(next - x);
        x = next;
    }
    throw NumericalError(fmt::format(
        "beta_quantile did not converge in {} iterations (q={}, a={}, b={})",
        kQuantileMaxIterations, q, p.a(), p.b()));
}

Xoshiro256::Xoshiro256(std::uint64_t seed) noexcept {
    std::uint64_t state = seed;
    for (auto& word : s_) word = splitmix64(state);
}

std::uint64_t Xoshiro256::next() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

void Xoshiro256::jump() noexcept {
    constexpr std::array<std::uint64_t, 4> kJump = {
        0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL, 0xa9582618e03fc9aaULL,
        0x39abdec0d4e0e4e8ULL};
    std::array<std::uint64_t, 4> acc{};
    for (std::uint64_t word : kJump) {
        for (int bit = 0; bit < 64; ++bit) {
            if (word & (std::uint64_t{1} << bit)) {
                for (std::size_t i = 0; i < 4; ++i) acc[i] ^= s_[i];
            }
            next();
        }
    }
    s_ = acc;
}

double Xoshiro256::uniform() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

Xoshiro256 SeededStream::generator() const noexcept {
    Xoshiro256 rng(seed);
    for (std::uint64_t i = 0; i < index; ++i) rng.jump();
    return rng;
}

double sample_standard_normal(Xoshiro256& rng) noexcept {
    // Marsaglia polar method; the second variate is discarded so the sampler
    // carries no hidden state.
    for (;;) {
        const double u = 2.0 * rng.uniform() - 1.0;
        const double v = 2.0 * rng.uniform() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

double sample_gamma(double shape, Xoshiro256& rng) {
    if (!(shape > 0.0)) throw DomainError("gamma shape must be positive");
    if (shape < 1.0) {
        const double boosted = sample_gamma(shape + 1.0, rng);
        return boosted * std::pow(rng.uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double z = sample_standard_normal(rng);
        double v = 1.0 + c * z;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = rng.uniform();
        const double z2 = z * z;
        if (u < 1.0 - 0.0331 * z2 * z2) return d * v;
        if (std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double sample_beta_one(const BetaParams& p, Xoshiro256& rng) {
    for (;;) {
        const double ga = sample_gamma(p.a(), rng);
        const double gb = sample_gamma(p.b(), rng);
        const double total = ga + gb;
        if (total > 0.0) return ga / total;
    }
}

std::vector<double> sample_beta(const BetaParams& p, const SeededStream& stream,
                                std::size_t n) {
    if (n == 0) throw DomainError("sample_beta requires n >= 1");
    Xoshiro256 rng = stream.generator();
    std::vector<double> out(n);
    for (auto& v : out) v = sample_beta_one(p, rng);
    return out;
}

}  // namespace vebayes
