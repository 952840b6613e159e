#pragma once

// Closed-form structural recovery model: the dependence of the expected
// recovery rate and portfolio loss on the default probability, governed by
// a single compound parameter B.

#include <stdexcept>
#include <vector>

#include "strec/numerics.hpp"

namespace strec {

/// Parameters of the correlated asset-value diffusion. One ModelParams
/// governs a whole homogeneous portfolio.
struct ModelParams {
    double mu = 0.0;       // drift per unit time
    double sigma = 0.2;    // volatility per sqrt(time)
    double c = 0.0;        // market correlation, in [0,1)
    double maturity = 1.0; // model-maturity T in years
    double v0 = 1.0;       // initial asset value
    double face = 1.0;     // face value of the debt

    void validate() const {
        if (!(sigma > 0.0)) throw std::invalid_argument("ModelParams: sigma must be > 0");
        if (!(maturity > 0.0)) throw std::invalid_argument("ModelParams: maturity must be > 0");
        if (!(v0 > 0.0)) throw std::invalid_argument("ModelParams: v0 must be > 0");
        if (!(face > 0.0)) throw std::invalid_argument("ModelParams: face must be > 0");
        if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("ModelParams: c must lie in [0,1)");
    }
};

/// The compound parameter B = sqrt((1-c) sigma^2 T). B = 0 is the
/// degenerate full-recovery limit.
struct CompoundB {
    double b = 0.0;

    CompoundB() = default;
    explicit CompoundB(double value) : b(value) {
        if (!(b >= 0.0)) throw std::invalid_argument("CompoundB: b must be >= 0");
    }
};

inline CompoundB compound_b(const ModelParams& params) {
    params.validate();
    return CompoundB{std::sqrt((1.0 - params.c) * params.sigma * params.sigma * params.maturity)};
}

/// Expected recovery rate conditional on the default probability:
///   RR(pd) = (1/pd) exp(-b x + b^2/2) Phi(x - b),  x = Phi^{-1}(pd).
/// Evaluated in log space so small pd does not overflow the exponential.
inline double structural_rr(double pd, CompoundB b) {
    if (!(pd > 0.0 && pd < 1.0))
        throw std::domain_error("structural_rr: pd must lie in (0,1)");
    if (b.b == 0.0) return 1.0;
    const double x = norm_cdf_inv(pd);
    const double log_rr =
        -b.b * x + 0.5 * b.b * b.b + log_norm_cdf(x - b.b) - std::log(pd);
    const double rr = std::exp(log_rr);
    return rr > 1.0 ? 1.0 : rr;
}

/// Expected portfolio loss, pd * (1 - RR(pd)). The identity with
/// structural_rr holds exactly by construction.
inline double expected_loss(double pd, CompoundB b) {
    return pd * (1.0 - structural_rr(pd, b));
}

struct CurvePoint {
    double pd = 0.0;
    double rr = 0.0;
    double loss = 0.0;
};

struct Curve {
    double b = 0.0;
    std::vector<CurvePoint> points;
};

/// Default PD grid: 99 equally spaced points 0.01 ... 0.99.
inline std::vector<double> default_pd_grid() {
    std::vector<double> grid;
    grid.reserve(99);
    for (int i = 1; i <= 99; ++i) grid.push_back(i / 100.0);
    return grid;
}

/// Samples the loss and recovery curves for each b over the given PD grid.
inline std::vector<Curve> sample_curves(const std::vector<CompoundB>& b_values,
                                        const std::vector<double>& grid) {
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1]))
            throw std::invalid_argument("sample_curves: grid must be strictly increasing");
    std::vector<Curve> curves;
    curves.reserve(b_values.size());
    for (CompoundB b : b_values) {
        Curve curve;
        curve.b = b.b;
        curve.points.reserve(grid.size());
        for (double pd : grid) {
            const double rr = structural_rr(pd, b);
            curve.points.push_back({pd, rr, pd * (1.0 - rr)});
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

}  // namespace strec
