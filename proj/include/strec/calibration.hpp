#pragma once

// PD binning of (pd, rr) observations and scalar least-squares calibration
// of the compound parameter against the binned portfolio-loss curve.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "strec/io.hpp"
#include "strec/model.hpp"

namespace strec {

enum class BinDomain { observed, unit };

struct Bin {
    double pd_mid = 0.0;               // within-bin mean of member pd values
    std::optional<double> mean_rr;     // absent when count < min_count
    std::optional<double> mean_loss;
    long count = 0;
};

struct BinnedSeries {
    std::vector<double> edges;  // n_bins + 1, equal widths
    std::vector<Bin> bins;
    long min_count = 5;
};

/// Assigns each (pd, rr) point to one of n_bins equal bins; the last bin is
/// right-inclusive. Loss is computed per point as pd*(1-rr) before
/// averaging. Bins with fewer than min_count points keep their count but
/// carry absent means.
inline BinnedSeries bin_series(const std::vector<std::pair<double, double>>& points,
                               int n_bins = 30, BinDomain domain = BinDomain::observed,
                               long min_count = 5) {
    if (points.empty()) throw std::invalid_argument("bin_series: no points");
    if (n_bins < 1) throw std::invalid_argument("bin_series: n_bins must be >= 1");
    double upper = 1.0;
    if (domain == BinDomain::observed) {
        upper = 0.0;
        for (const auto& [pd, rr] : points) upper = std::max(upper, pd);
        if (upper <= 0.0) upper = 1.0;
    }
    const double width = upper / n_bins;

    BinnedSeries out;
    out.min_count = min_count;
    out.edges.resize(static_cast<std::size_t>(n_bins) + 1);
    for (int i = 0; i <= n_bins; ++i) out.edges[static_cast<std::size_t>(i)] = width * i;
    out.bins.resize(static_cast<std::size_t>(n_bins));

    std::vector<double> pd_sum(static_cast<std::size_t>(n_bins), 0.0);
    std::vector<double> rr_sum(static_cast<std::size_t>(n_bins), 0.0);
    std::vector<double> loss_sum(static_cast<std::size_t>(n_bins), 0.0);
    for (const auto& [pd, rr] : points) {
        if (!(pd > 0.0 && pd < 1.0))
            throw std::invalid_argument("bin_series: pd must lie in (0,1)");
        int idx = static_cast<int>(pd / width);
        if (idx >= n_bins) idx = n_bins - 1;  // right edge folds into the last bin
        auto u = static_cast<std::size_t>(idx);
        ++out.bins[u].count;
        pd_sum[u] += pd;
        rr_sum[u] += rr;
        loss_sum[u] += pd * (1.0 - rr);
    }
    for (std::size_t i = 0; i < out.bins.size(); ++i) {
        Bin& bin = out.bins[i];
        if (bin.count == 0) continue;
        bin.pd_mid = pd_sum[i] / bin.count;
        if (bin.count >= min_count) {
            bin.mean_rr = rr_sum[i] / bin.count;
            bin.mean_loss = loss_sum[i] / bin.count;
        }
    }
    return out;
}

struct FitResult {
    double b_hat = 0.0;
    double sse = 0.0;
    int n_bins_used = 0;
    std::string label;
    bool at_lower_bound = false;
};

namespace detail {

inline double loss_sse(const BinnedSeries& binned, double b) {
    double sse = 0.0;
    for (const Bin& bin : binned.bins) {
        if (!bin.mean_loss) continue;
        const double r = expected_loss(bin.pd_mid, CompoundB{b}) - *bin.mean_loss;
        sse += r * r;
    }
    return sse;
}

// Golden-section minimization on [lo, hi]; the objective is unimodal here.
template <typename F>
double golden_section(F f, double lo, double hi, double tol) {
    const double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

/// Least-squares fit of b over [1e-3, 5] to the binned loss means
/// (unweighted). A coarse scan brackets the minimum before golden-section
/// refinement to |db| <= 1e-6.
inline FitResult fit_b(const BinnedSeries& binned, const std::string& label = "") {
    int occupied = 0;
    bool any_loss = false;
    for (const Bin& bin : binned.bins) {
        if (!bin.mean_loss) continue;
        ++occupied;
        if (*bin.mean_loss > 0.0) any_loss = true;
    }
    if (occupied < 2) throw DegenerateError("fit_b: need at least 2 occupied bins");

    const double b_lo = 1e-3, b_hi = 5.0;
    FitResult result;
    result.label = label;
    result.n_bins_used = occupied;
    if (!any_loss) {
        // all losses zero: the objective is minimized at the b -> 0 limit
        result.b_hat = b_lo;
        result.sse = detail::loss_sse(binned, b_lo);
        result.at_lower_bound = true;
        return result;
    }

    const int scan_points = 128;
    double best_b = b_lo;
    double best_sse = detail::loss_sse(binned, b_lo);
    for (int i = 1; i <= scan_points; ++i) {
        const double b = b_lo + (b_hi - b_lo) * i / scan_points;
        const double sse = detail::loss_sse(binned, b);
        if (sse < best_sse) {
            best_sse = sse;
            best_b = b;
        }
    }
    const double step = (b_hi - b_lo) / scan_points;
    const double lo = std::max(b_lo, best_b - step);
    const double hi = std::min(b_hi, best_b + step);
    result.b_hat = detail::golden_section([&](double b) { return detail::loss_sse(binned, b); },
                                          lo, hi, 1e-6);
    result.sse = detail::loss_sse(binned, result.b_hat);
    result.at_lower_bound = result.b_hat <= b_lo + 1e-6;
    return result;
}

struct FitReportRow {
    double pd_mid = 0.0;
    std::optional<double> mean_loss;
    double model_loss = 0.0;
    std::optional<double> mean_rr;
    double model_rr = 0.0;
    long count = 0;
};

struct FitReport {
    FitResult fit;
    std::vector<FitReportRow> rows;  // occupied bins only
};

inline FitReport fit_report(const FitResult& fit, const BinnedSeries& binned) {
    FitReport report;
    report.fit = fit;
    for (const Bin& bin : binned.bins) {
        if (bin.count == 0) continue;
        FitReportRow row;
        row.pd_mid = bin.pd_mid;
        row.mean_loss = bin.mean_loss;
        row.mean_rr = bin.mean_rr;
        row.model_loss = expected_loss(bin.pd_mid, CompoundB{fit.b_hat});
        row.model_rr = structural_rr(bin.pd_mid, CompoundB{fit.b_hat});
        row.count = bin.count;
        report.rows.push_back(row);
    }
    return report;
}

inline void write_fit_report_csv(const FitReport& report, const std::string& path) {
    auto out = open_output(path);
    out << "pd_mid,mean_loss,model_loss,mean_rr,model_rr,count\n";
    for (const FitReportRow& row : report.rows) {
        out << format_double(row.pd_mid) << ","
            << (row.mean_loss ? format_double(*row.mean_loss) : std::string()) << ","
            << format_double(row.model_loss) << ","
            << (row.mean_rr ? format_double(*row.mean_rr) : std::string()) << ","
            << format_double(row.model_rr) << "," << row.count << "\n";
    }
}

inline nlohmann::json fit_summary_json(const FitResult& fit) {
    return {{"b_hat", fit.b_hat},
            {"sse", fit.sse},
            {"n_bins_used", fit.n_bins_used},
            {"label", fit.label},
            {"at_lower_bound", fit.at_lower_bound}};
}

/// Summary across maturities. When at least two maturities are present the
/// note reports the fitted ratio next to the sqrt(T) ratio the compound
/// parameter would imply, so disagreement is visible in the report.
inline nlohmann::json multi_maturity_summary(
    const std::vector<std::pair<double, FitResult>>& fits_by_maturity) {
    nlohmann::json out;
    out["fits"] = nlohmann::json::array();
    for (const auto& [t, fit] : fits_by_maturity) {
        auto j = fit_summary_json(fit);
        j["maturity_years"] = t;
        out["fits"].push_back(j);
    }
    if (fits_by_maturity.size() >= 2) {
        const auto& [t1, f1] = fits_by_maturity.front();
        const auto& [t2, f2] = fits_by_maturity.back();
        out["b_ratio"] = f2.b_hat / f1.b_hat;
        out["sqrt_t_ratio"] = std::sqrt(t2 / t1);
        out["note"] =
            "under B = sqrt((1-c) sigma^2 T) the fitted b should scale like sqrt(T); "
            "compare b_ratio against sqrt_t_ratio";
    }
    return out;
}

}  // namespace strec
