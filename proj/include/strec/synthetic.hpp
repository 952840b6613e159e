#pragma once

// Synthetic issuer/rating/event dataset generator. Defaults are driven by
// the correlated diffusion (one shared market shock per start date),
// withdrawals are drawn independently, and the ground truth (compound
// parameter, withdrawal probability, per-rating calibration) is recorded in
// a sidecar manifest so pipeline tests can close the loop.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "strec/cohort.hpp"
#include "strec/model.hpp"
#include "strec/numerics.hpp"

namespace strec {

struct SyntheticDatasetConfig {
    double mu = 0.0;
    double sigma = 0.5;
    double c = 0.5;
    int maturity_years = 1;
    // rating -> target unconditional PD over the horizon; F/V0 is calibrated
    // to hit it exactly under the diffusion.
    std::map<Rating, double> target_pd;
    double p_w = 0.0;  // withdrawal probability per horizon
    int issuers_per_rating = 100;
    std::vector<Date> start_dates;
    Seniority seniority = Seniority::senior_secured;
    SeedSpec seed;

    void validate() const {
        if (!(sigma > 0.0)) throw std::invalid_argument("synthetic: sigma must be > 0");
        if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("synthetic: c must lie in [0,1)");
        if (maturity_years < 1) throw std::invalid_argument("synthetic: maturity_years must be >= 1");
        if (!(p_w >= 0.0 && p_w <= 1.0)) throw std::invalid_argument("synthetic: p_w must lie in [0,1]");
        if (issuers_per_rating < 1)
            throw std::invalid_argument("synthetic: issuers_per_rating must be >= 1");
        if (target_pd.empty()) throw std::invalid_argument("synthetic: no ratings configured");
        if (start_dates.empty()) throw std::invalid_argument("synthetic: no start dates");
        for (const auto& [rating, pd] : target_pd)
            if (!(pd > 0.0 && pd < 1.0))
                throw std::invalid_argument("synthetic: target PD for " + to_string(rating) +
                                            " unreachable (must lie in (0,1))");
    }
};

/// Ratings B1..Caa3 with increasing target PDs; the usual starting point
/// for round-trip experiments.
inline std::map<Rating, double> default_rating_targets() {
    return {{Rating::B1, 0.04},  {Rating::B2, 0.08},   {Rating::B3, 0.14},
            {Rating::Caa1, 0.22}, {Rating::Caa2, 0.32}, {Rating::Caa3, 0.45}};
}

struct SyntheticDataset {
    std::vector<Issuer> issuers;
    std::vector<RatingSnapshot> snapshots;
    std::vector<IssuerEvent> events;
    nlohmann::json manifest;
};

/// F/V0 hitting the target unconditional PD:
///   ln(F/V0) = (mu - sigma^2/2) T + sigma sqrt(T) Phi^{-1}(pd).
inline double face_over_v0_for_pd(double target_pd, double mu, double sigma, double t) {
    return std::exp((mu - 0.5 * sigma * sigma) * t + sigma * std::sqrt(t) * norm_cdf_inv(target_pd));
}

inline Date uniform_date_in_window(const Date& start, int window_months, double u);

inline SyntheticDataset generate_dataset(const SyntheticDatasetConfig& cfg) {
    cfg.validate();
    const double t = static_cast<double>(cfg.maturity_years);
    const double vol_t = cfg.sigma * std::sqrt(t);
    const double drift = (cfg.mu - 0.5 * cfg.sigma * cfg.sigma) * t;
    const double market_scale = std::sqrt(cfg.c) * vol_t;
    const double idio_scale = std::sqrt(1.0 - cfg.c) * vol_t;
    const int window_months = 12 * cfg.maturity_years;

    SyntheticDataset data;
    nlohmann::json ratings_json;
    for (const auto& [rating, pd] : cfg.target_pd) {
        ratings_json[to_string(rating)] = {
            {"target_pd", pd}, {"face_over_v0", face_over_v0_for_pd(pd, cfg.mu, cfg.sigma, t)}};
    }

    for (std::size_t s = 0; s < cfg.start_dates.size(); ++s) {
        const Date start = cfg.start_dates[s];
        NormalStream stream(cfg.seed.master_seed,
                            cfg.seed.stream_index + static_cast<std::uint64_t>(s));
        const double z_m = stream.next_normal();
        for (const auto& [rating, target] : cfg.target_pd) {
            const double log_f_v0 = std::log(face_over_v0_for_pd(target, cfg.mu, cfg.sigma, t));
            for (int k = 0; k < cfg.issuers_per_rating; ++k) {
                Issuer issuer;
                issuer.id = to_string(rating) + "_" + std::to_string(s) + "_" + std::to_string(k);
                issuer.name = "Synthetic " + issuer.id;
                const double z_k = stream.next_normal();
                const double u_withdraw = stream.next_uniform();
                const double u_default_date = stream.next_uniform();
                const double u_withdraw_date = stream.next_uniform();

                data.snapshots.push_back({issuer.id, start, rating, cfg.seniority});
                // Issuers leave the rated universe one month after pool
                // formation, so each monthly cohort observes exactly one pool
                // even when windows overlap.
                data.snapshots.push_back(
                    {issuer.id, add_months(start, 1), Rating::C, cfg.seniority});

                const double log_v = drift + market_scale * z_m + idio_scale * z_k;
                if (log_v < log_f_v0) {
                    IssuerEvent ev;
                    ev.issuer_id = issuer.id;
                    ev.type = EventType::default_;
                    ev.date = uniform_date_in_window(start, window_months, u_default_date);
                    double rr = std::exp(log_v - log_f_v0);
                    if (rr > 1.0) rr = 1.0;
                    if (rr < 0.0) rr = 0.0;
                    ev.recovery_rate = rr;
                    data.events.push_back(std::move(ev));
                }
                if (u_withdraw < cfg.p_w) {
                    IssuerEvent ev;
                    ev.issuer_id = issuer.id;
                    ev.type = EventType::withdrawal;
                    ev.date = uniform_date_in_window(start, window_months, u_withdraw_date);
                    data.events.push_back(std::move(ev));
                }
                data.issuers.push_back(std::move(issuer));
            }
        }
    }

    std::vector<std::string> starts;
    for (const Date& d : cfg.start_dates) starts.push_back(to_string(d));
    data.manifest = {
        {"b", std::sqrt((1.0 - cfg.c) * cfg.sigma * cfg.sigma * t)},
        {"mu", cfg.mu},
        {"sigma", cfg.sigma},
        {"c", cfg.c},
        {"maturity_years", cfg.maturity_years},
        {"p_w", cfg.p_w},
        {"issuers_per_rating", cfg.issuers_per_rating},
        {"seniority", to_string(cfg.seniority)},
        {"ratings", ratings_json},
        {"start_dates", starts},
        {"seed", {{"master_seed", cfg.seed.master_seed}, {"stream_index", cfg.seed.stream_index}}},
    };
    return data;
}

/// Any event inside the window counts as if it happened at maturity, so the
/// exact day only exercises date handling. Picks a uniform month and day.
inline Date uniform_date_in_window(const Date& start, int window_months, double u) {
    const int offset = static_cast<int>(u * window_months);
    Date d = add_months(start, offset < window_months ? offset : window_months - 1);
    // reuse fractional bits for the day of month
    const double frac = u * window_months - offset;
    int day = 1 + static_cast<int>(frac * days_in_month(d.year, d.month));
    if (day > days_in_month(d.year, d.month)) day = days_in_month(d.year, d.month);
    d.day = day;
    return d;
}

inline void write_issuers_csv(const SyntheticDataset& data, const std::string& path) {
    auto out = open_output(path);
    out << "issuer_id,name\n";
    for (const Issuer& issuer : data.issuers) out << issuer.id << "," << issuer.name << "\n";
}

inline void write_ratings_csv(const SyntheticDataset& data, const std::string& path) {
    auto out = open_output(path);
    out << "issuer_id,date,rating,seniority\n";
    for (const RatingSnapshot& s : data.snapshots)
        out << s.issuer_id << "," << to_string(s.date) << "," << to_string(s.rating) << ","
            << to_string(s.seniority) << "\n";
}

inline void write_events_csv(const SyntheticDataset& data, const std::string& path) {
    auto out = open_output(path);
    out << "issuer_id,event_type,date,recovery_rate\n";
    for (const IssuerEvent& e : data.events) {
        out << e.issuer_id << ","
            << (e.type == EventType::default_ ? "default" : "withdrawal") << ","
            << to_string(e.date) << ","
            << (e.recovery_rate ? format_double(*e.recovery_rate) : std::string()) << "\n";
    }
}

inline void write_manifest(const SyntheticDataset& data, const std::string& path) {
    auto out = open_output(path);
    out << data.manifest.dump(2) << "\n";
}

}  // namespace strec
