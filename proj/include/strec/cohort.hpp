#pragma once

// Empirical pipeline: CSV ingestion of issuer/rating/event records,
// cohort construction with withdrawal-adjusted default rates, rolling
// monthly series and the PD-RR correlation.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <tuple>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "strec/dates.hpp"
#include "strec/io.hpp"

namespace strec {

enum class Rating {
    Aaa, Aa1, Aa2, Aa3, A1, A2, A3, Baa1, Baa2, Baa3,
    Ba1, Ba2, Ba3, B1, B2, B3, Caa1, Caa2, Caa3, Ca, C
};

inline const std::vector<std::pair<Rating, std::string>>& rating_names() {
    static const std::vector<std::pair<Rating, std::string>> names = {
        {Rating::Aaa, "Aaa"},   {Rating::Aa1, "Aa1"},   {Rating::Aa2, "Aa2"},
        {Rating::Aa3, "Aa3"},   {Rating::A1, "A1"},     {Rating::A2, "A2"},
        {Rating::A3, "A3"},     {Rating::Baa1, "Baa1"}, {Rating::Baa2, "Baa2"},
        {Rating::Baa3, "Baa3"}, {Rating::Ba1, "Ba1"},   {Rating::Ba2, "Ba2"},
        {Rating::Ba3, "Ba3"},   {Rating::B1, "B1"},     {Rating::B2, "B2"},
        {Rating::B3, "B3"},     {Rating::Caa1, "Caa1"}, {Rating::Caa2, "Caa2"},
        {Rating::Caa3, "Caa3"}, {Rating::Ca, "Ca"},     {Rating::C, "C"}};
    return names;
}

inline std::string to_string(Rating r) {
    for (const auto& [rating, name] : rating_names())
        if (rating == r) return name;
    return "?";
}

inline Rating parse_rating(const std::string& s) {
    for (const auto& [rating, name] : rating_names())
        if (name == s) return rating;
    throw std::invalid_argument("unknown rating: '" + s + "'");
}

enum class Seniority { senior_secured, senior_unsecured, other };

inline std::string to_string(Seniority s) {
    switch (s) {
        case Seniority::senior_secured: return "senior_secured";
        case Seniority::senior_unsecured: return "senior_unsecured";
        case Seniority::other: return "other";
    }
    return "?";
}

inline Seniority parse_seniority(const std::string& s) {
    if (s == "senior_secured") return Seniority::senior_secured;
    if (s == "senior_unsecured") return Seniority::senior_unsecured;
    if (s == "other") return Seniority::other;
    throw std::invalid_argument("unknown seniority: '" + s + "'");
}

enum class EventType { default_, withdrawal };

struct Issuer {
    std::string id;
    std::string name;
};

struct RatingSnapshot {
    std::string issuer_id;
    Date date;
    Rating rating = Rating::B1;
    Seniority seniority = Seniority::senior_secured;
};

struct IssuerEvent {
    std::string issuer_id;
    EventType type = EventType::default_;
    Date date;
    std::optional<double> recovery_rate;  // defaults only, may be unrecorded
};

/// Immutable after ingest; cohort builds only read.
struct Store {
    std::vector<Issuer> issuers;
    std::vector<RatingSnapshot> snapshots;
    std::vector<IssuerEvent> events;

    // per issuer, sorted by date
    std::unordered_map<std::string, std::vector<const RatingSnapshot*>> snapshots_by_issuer;
    std::unordered_map<std::string, std::vector<const IssuerEvent*>> events_by_issuer;

    void build_indices() {
        snapshots_by_issuer.clear();
        events_by_issuer.clear();
        for (const auto& s : snapshots) snapshots_by_issuer[s.issuer_id].push_back(&s);
        for (const auto& e : events) events_by_issuer[e.issuer_id].push_back(&e);
        for (auto& [id, v] : snapshots_by_issuer)
            std::stable_sort(v.begin(), v.end(),
                             [](auto* a, auto* b) { return a->date < b->date; });
        for (auto& [id, v] : events_by_issuer)
            std::stable_sort(v.begin(), v.end(), [](auto* a, auto* b) {
                if (a->date != b->date) return a->date < b->date;
                // same-day tie: a default outranks a withdrawal
                return a->type == EventType::default_ && b->type == EventType::withdrawal;
            });
    }
};

/// Reads the three CSV files into a validated store. Rows that violate the
/// schema or an invariant raise DataError with file/row context.
inline Store ingest(const std::string& issuers_path, const std::string& ratings_path,
                    const std::string& events_path) {
    Store store;
    std::string line;

    {
        auto in = open_input(issuers_path);
        std::size_t lineno = 0;
        std::set<std::string> seen;
        while (std::getline(in, line)) {
            ++lineno;
            if (lineno == 1 || line.empty()) continue;  // header
            auto f = split_csv_line(line);
            if (f.size() != 2) throw DataError(issuers_path, lineno, "expected issuer_id,name");
            if (f[0].empty()) throw DataError(issuers_path, lineno, "empty issuer_id");
            if (!seen.insert(f[0]).second)
                throw DataError(issuers_path, lineno, "duplicate issuer_id '" + f[0] + "'");
            store.issuers.push_back({f[0], f[1]});
        }
    }

    {
        auto in = open_input(ratings_path);
        std::size_t lineno = 0;
        std::set<std::tuple<std::string, Date, Seniority>> seen;
        while (std::getline(in, line)) {
            ++lineno;
            if (lineno == 1 || line.empty()) continue;
            auto f = split_csv_line(line);
            if (f.size() != 4)
                throw DataError(ratings_path, lineno, "expected issuer_id,date,rating,seniority");
            RatingSnapshot snap;
            snap.issuer_id = f[0];
            try {
                snap.date = parse_date(f[1]);
                snap.rating = parse_rating(f[2]);
                snap.seniority = parse_seniority(f[3]);
            } catch (const std::invalid_argument& e) {
                throw DataError(ratings_path, lineno, e.what());
            }
            if (!seen.insert({snap.issuer_id, snap.date, snap.seniority}).second)
                throw DataError(ratings_path, lineno,
                                "duplicate (issuer,date,seniority) key for '" + f[0] + "'");
            store.snapshots.push_back(std::move(snap));
        }
    }

    {
        auto in = open_input(events_path);
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (lineno == 1 || line.empty()) continue;
            auto f = split_csv_line(line);
            if (f.size() != 4)
                throw DataError(events_path, lineno,
                                "expected issuer_id,event_type,date,recovery_rate");
            IssuerEvent ev;
            ev.issuer_id = f[0];
            try {
                ev.date = parse_date(f[2]);
            } catch (const std::invalid_argument& e) {
                throw DataError(events_path, lineno, e.what());
            }
            if (f[1] == "default") {
                ev.type = EventType::default_;
                if (!f[3].empty()) {
                    const double rr = parse_double(f[3], events_path, lineno);
                    if (!(rr >= 0.0 && rr <= 1.0))
                        throw DataError(events_path, lineno,
                                        "recovery_rate " + f[3] + " outside [0,1]");
                    ev.recovery_rate = rr;
                }
            } else if (f[1] == "withdrawal") {
                ev.type = EventType::withdrawal;
                if (!f[3].empty())
                    throw DataError(events_path, lineno,
                                    "recovery_rate must be empty for withdrawals");
            } else {
                throw DataError(events_path, lineno, "unknown event_type '" + f[1] + "'");
            }
            store.events.push_back(std::move(ev));
        }
    }

    store.build_indices();
    return store;
}

struct CohortSpec {
    Date start;                // t = 0
    int maturity_years = 1;    // model-maturity T
    std::set<Rating> ratings;
    Seniority seniority = Seniority::senior_secured;
};

struct CohortOutcome {
    long n_c = 0;   // members
    long n_w = 0;   // withdrawn
    long n_d = 0;   // defaulted, not previously withdrawn
    double pd = 0.0;
    std::optional<double> mean_rr;
    long rr_count = 0;
};

/// Rating as of the cohort start: latest snapshot on or before start with
/// the requested seniority, or nothing if the issuer is unrated by then.
inline std::optional<Rating> rating_as_of(const Store& store, const std::string& issuer_id,
                                          const Date& start, Seniority seniority) {
    auto it = store.snapshots_by_issuer.find(issuer_id);
    if (it == store.snapshots_by_issuer.end()) return std::nullopt;
    std::optional<Rating> found;
    for (const RatingSnapshot* snap : it->second) {
        if (snap->date > start) break;
        if (snap->seniority == seniority) found = snap->rating;
    }
    return found;
}

/// Builds one cohort. The first event by date inside [start, start+T)
/// decides the outcome; a same-day default wins over a withdrawal, and only
/// an issuer's first default counts.
inline CohortOutcome build_cohort(const Store& store, const CohortSpec& spec) {
    const Date window_end = add_months(spec.start, 12 * spec.maturity_years);
    CohortOutcome out;
    double rr_sum = 0.0;
    for (const Issuer& issuer : store.issuers) {
        const auto rating = rating_as_of(store, issuer.id, spec.start, spec.seniority);
        if (!rating || !spec.ratings.count(*rating)) continue;
        ++out.n_c;
        auto it = store.events_by_issuer.find(issuer.id);
        const IssuerEvent* first = nullptr;
        if (it != store.events_by_issuer.end()) {
            for (const IssuerEvent* ev : it->second) {
                if (ev->date < spec.start || ev->date >= window_end) continue;
                first = ev;
                break;
            }
        }
        if (!first) continue;
        if (first->type == EventType::withdrawal) {
            ++out.n_w;
        } else {
            ++out.n_d;
            if (first->recovery_rate) {
                rr_sum += *first->recovery_rate;
                ++out.rr_count;
            }
        }
    }
    if (out.n_c == 0) throw DegenerateError("cohort is empty");
    if (out.n_c == out.n_w)
        throw DegenerateError("all cohort members withdrawn; PD undefined");
    out.pd = static_cast<double>(out.n_d) / static_cast<double>(out.n_c - out.n_w);
    if (out.rr_count > 0) out.mean_rr = rr_sum / out.rr_count;
    return out;
}

struct RollingPoint {
    Date start;
    std::optional<CohortOutcome> outcome;  // absent when the cohort was degenerate
    std::string flag;                      // reason when absent or unusable
};

/// One cohort per monthly start date, inclusive on both ends. Degenerate
/// cohorts are flagged, not fatal.
inline std::vector<RollingPoint> rolling_series(const Store& store, const CohortSpec& base_spec,
                                                const Date& first_start, const Date& last_start) {
    if (last_start < first_start)
        throw std::invalid_argument("rolling_series: last_start before first_start");
    std::vector<RollingPoint> series;
    const int n_months = months_between(first_start, last_start);
    for (int m = 0; m <= n_months; ++m) {
        RollingPoint point;
        point.start = add_months(first_start, m);
        CohortSpec spec = base_spec;
        spec.start = point.start;
        try {
            CohortOutcome outcome = build_cohort(store, spec);
            if (!outcome.mean_rr) point.flag = "no_recovery_data";
            point.outcome = std::move(outcome);
        } catch (const DegenerateError& e) {
            point.flag = e.what();
        }
        series.push_back(std::move(point));
    }
    return series;
}

/// Sample Pearson correlation coefficient.
inline double pearson(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 2) throw DegenerateError("pearson: need at least 2 pairs");
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& [x, y] : pairs) {
        mean_x += x;
        mean_y += y;
    }
    mean_x /= pairs.size();
    mean_y /= pairs.size();
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto& [x, y] : pairs) {
        sxx += (x - mean_x) * (x - mean_x);
        syy += (y - mean_y) * (y - mean_y);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw DegenerateError("pearson: zero variance in a coordinate");
    double r = sxy / std::sqrt(sxx * syy);
    if (r > 1.0) r = 1.0;
    if (r < -1.0) r = -1.0;
    return r;
}

}  // namespace strec
