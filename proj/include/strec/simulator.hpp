#pragma once

// Monte Carlo oracle for the structural model: exact terminal sampling of
// the correlated diffusion, default counting and recovery averaging per
// market realization. Results depend only on (config, seed), never on the
// number of worker threads.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "strec/model.hpp"
#include "strec/numerics.hpp"

namespace strec {

struct SimConfig {
    ModelParams params;
    int firms = 1000;         // K companies per portfolio
    int realizations = 1000;  // M market draws
    SeedSpec seed;

    void validate() const {
        params.validate();
        if (firms < 1) throw std::invalid_argument("SimConfig: firms must be >= 1");
        if (realizations < 1) throw std::invalid_argument("SimConfig: realizations must be >= 1");
    }
};

struct MarketRealization {
    double market_shock = 0.0;          // the shared standard normal draw
    double pd_real = 0.0;               // defaulted fraction
    std::optional<double> rr_real;      // mean V/F over defaulters, absent if none
};

/// Terminal asset values V_k(T) for one market realization. The first
/// variate of the realization's substream is the shared market shock, the
/// next K are idiosyncratic.
inline std::vector<double> terminal_values(const SimConfig& config, int realization_index) {
    config.validate();
    if (realization_index < 0 || realization_index >= config.realizations)
        throw std::invalid_argument("terminal_values: realization_index out of range");
    const ModelParams& p = config.params;
    NormalStream stream(config.seed.master_seed,
                        config.seed.stream_index + static_cast<std::uint64_t>(realization_index));
    const double z_m = stream.next_normal();
    const double drift = (p.mu - 0.5 * p.sigma * p.sigma) * p.maturity;
    const double vol_t = p.sigma * std::sqrt(p.maturity);
    const double market_part = std::sqrt(p.c) * vol_t * z_m;
    const double idio_scale = std::sqrt(1.0 - p.c) * vol_t;
    std::vector<double> values(static_cast<std::size_t>(config.firms));
    for (double& v : values)
        v = p.v0 * std::exp(drift + market_part + idio_scale * stream.next_normal());
    return values;
}

namespace detail {

inline MarketRealization run_one_realization(const SimConfig& config, int index) {
    const ModelParams& p = config.params;
    NormalStream stream(config.seed.master_seed,
                        config.seed.stream_index + static_cast<std::uint64_t>(index));
    const double z_m = stream.next_normal();
    const double drift = (p.mu - 0.5 * p.sigma * p.sigma) * p.maturity;
    const double vol_t = p.sigma * std::sqrt(p.maturity);
    const double market_part = std::sqrt(p.c) * vol_t * z_m;
    const double idio_scale = std::sqrt(1.0 - p.c) * vol_t;

    int defaults = 0;
    double rr_sum = 0.0;
    for (int k = 0; k < config.firms; ++k) {
        const double v = p.v0 * std::exp(drift + market_part + idio_scale * stream.next_normal());
        if (v < p.face) {
            ++defaults;
            rr_sum += v / p.face;
        }
    }
    MarketRealization out;
    out.market_shock = z_m;
    out.pd_real = static_cast<double>(defaults) / config.firms;
    if (defaults > 0) out.rr_real = rr_sum / defaults;
    return out;
}

}  // namespace detail

/// Runs all M realizations. Realizations use disjoint substreams and are
/// written into the result vector by index, so the output is identical for
/// any thread count.
inline std::vector<MarketRealization> simulate(const SimConfig& config, int threads = 1) {
    config.validate();
    if (threads < 1) threads = 1;
    std::vector<MarketRealization> results(static_cast<std::size_t>(config.realizations));
    if (threads == 1 || config.realizations == 1) {
        for (int i = 0; i < config.realizations; ++i)
            results[static_cast<std::size_t>(i)] = detail::run_one_realization(config, i);
        return results;
    }
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            for (int i = w; i < config.realizations; i += threads)
                results[static_cast<std::size_t>(i)] = detail::run_one_realization(config, i);
        });
    }
    for (auto& t : workers) t.join();
    return results;
}

}  // namespace strec
