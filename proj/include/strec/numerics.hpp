#pragma once

// Standard normal CDF, inverse CDF, log-CDF and deterministic random
// substreams. Everything here is pure; streams are single-owner.

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace strec {

/// A probability in [0,1]. Construction validates the range.
struct Probability {
    double value;

    Probability() : value(0.0) {}
    explicit Probability(double v) : value(v) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::domain_error("Probability out of [0,1]");
    }
    operator double() const { return value; }
};

/// Keys a deterministic substream: identical (master_seed, stream_index)
/// always reproduces the same sequence.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

/// Standard normal CDF via the scaled complementary error function.
inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x * kInvSqrt2);
}

/// Standard normal density.
inline double norm_pdf(double x) {
    return std::exp(-0.5 * x * x - kLogSqrt2Pi);
}

/// ln Phi(x), stable deep into the left tail.
/// For x <= -8 uses the Mills-ratio asymptotic series
///   Phi(x) = phi(x)/(-x) * (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...)
inline double log_norm_cdf(double x) {
    if (x <= -8.0) {
        const double inv_x2 = 1.0 / (x * x);
        double term = 1.0;
        double sum = 1.0;
        for (int n = 1; n < 40; ++n) {
            const double next = term * -(2.0 * n - 1.0) * inv_x2;
            if (std::abs(next) >= std::abs(term)) break;  // asymptotic: stop at smallest term
            term = next;
            sum += term;
            if (std::abs(term) < 1e-17 * sum) break;
        }
        return -0.5 * x * x - kLogSqrt2Pi - std::log(-x) + std::log(sum);
    }
    if (x >= 5.0)
        return std::log1p(-norm_cdf(-x));
    return std::log(norm_cdf(x));
}

namespace detail {

// Wichura's AS241 (PPND16) rational approximation to the normal quantile.
inline double norm_cdf_inv_as241(double p) {
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
            (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                   6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                 1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
               1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
            (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                   3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                 5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
               4.2313330701600911252e+1) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                   2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                 3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
               4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                   1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                 6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
               2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                   1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                 2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
               5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                   1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
               5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -x : x;
}

}  // namespace detail

/// Inverse standard normal CDF. AS241 refined by one Halley step.
/// Throws std::domain_error for p outside (0,1).
inline double norm_cdf_inv(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("norm_cdf_inv: p must lie in (0,1)");
    double x = detail::norm_cdf_inv_as241(p);
    const double pdf = norm_pdf(x);
    if (pdf > 0.0) {
        const double u = (norm_cdf(x) - p) / pdf;
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

/// Counter-based stream of standard normal variates.
/// Substreams for distinct (master_seed, stream_index) are decorrelated by
/// bit mixing; the sequence is a pure function of the seed.
class NormalStream {
  public:
    explicit NormalStream(SeedSpec seed)
        : state_(mix64(mix64(seed.master_seed ^ 0x8f24aad6d2f3c4b5ull) ^
                       mix64(seed.stream_index * 0x9e3779b97f4a7c15ull + 0xd1b54a32d192ed03ull))) {}

    NormalStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : NormalStream(SeedSpec{master_seed, stream_index}) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix64(state_);
    }

    /// Uniform on (0,1), never exactly 0 or 1.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_normal() { return norm_cdf_inv(next_uniform()); }

  private:
    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace strec
