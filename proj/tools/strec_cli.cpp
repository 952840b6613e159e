// strec: batch command-line front end for the structural recovery model.
//
// Subcommands: curves, simulate, gen-data, cohort, correlate, fit.
// Every run is deterministic given (config, seed) and echoes its resolved
// configuration next to the outputs.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "strec/calibration.hpp"
#include "strec/cohort.hpp"
#include "strec/io.hpp"
#include "strec/model.hpp"
#include "strec/simulator.hpp"
#include "strec/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void echo_resolved_config(CLI::App& app, const std::string& primary_output) {
    auto out = strec::open_output(primary_output + ".config");
    out << app.config_to_str(true, false);
}

std::set<strec::Rating> parse_rating_list(const std::vector<std::string>& names) {
    std::set<strec::Rating> ratings;
    for (const auto& name : names) ratings.insert(strec::parse_rating(name));
    return ratings;
}

// "B1=0.04" pairs for gen-data targets
std::map<strec::Rating, double> parse_targets(const std::vector<std::string>& specs) {
    std::map<strec::Rating, double> targets;
    for (const auto& spec : specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("bad --target '" + spec + "', expected RATING=PD");
        targets[strec::parse_rating(spec.substr(0, eq))] = std::stod(spec.substr(eq + 1));
    }
    return targets;
}

json outcome_to_json(const strec::CohortOutcome& o) {
    json j = {{"n_c", o.n_c},     {"n_w", o.n_w}, {"n_d", o.n_d},
              {"pd", o.pd},       {"rr_count", o.rr_count}};
    if (o.mean_rr) j["mean_rr"] = *o.mean_rr;
    return j;
}

struct CurvesOpts {
    std::vector<double> b_values;
    int grid_points = 99;
    double grid_min = 0.01;
    double grid_max = 0.99;
    std::string out = "curves.csv";
};

int run_curves(CLI::App& app, const CurvesOpts& opt) {
    std::vector<strec::CompoundB> bs;
    for (double b : opt.b_values) bs.emplace_back(b);
    if (opt.grid_points < 1 || !(opt.grid_min > 0.0) || !(opt.grid_max < 1.0) ||
        (opt.grid_points > 1 && !(opt.grid_min < opt.grid_max)))
        throw std::invalid_argument("curves: grid must lie strictly inside (0,1)");
    std::vector<double> grid;
    for (int i = 0; i < opt.grid_points; ++i)
        grid.push_back(opt.grid_points == 1
                           ? opt.grid_min
                           : opt.grid_min + (opt.grid_max - opt.grid_min) * i /
                                 (opt.grid_points - 1));
    const auto curves = strec::sample_curves(bs, grid);
    auto out = strec::open_output(opt.out);
    out << "b,pd,rr,loss\n";
    for (const auto& curve : curves)
        for (const auto& p : curve.points)
            out << strec::format_double(curve.b) << "," << strec::format_double(p.pd) << ","
                << strec::format_double(p.rr) << "," << strec::format_double(p.loss) << "\n";
    echo_resolved_config(app, opt.out);
    std::cout << "wrote " << opt.out << " (" << curves.size() << " curves x " << grid.size()
              << " points)\n";
    return 0;
}

struct SimulateOpts {
    strec::SimConfig config;
    int threads = 1;
    std::string out = "realizations.csv";
};

int run_simulate(CLI::App& app, const SimulateOpts& opt) {
    const auto realizations = strec::simulate(opt.config, opt.threads);
    auto out = strec::open_output(opt.out);
    out << "realization_index,pd_real,rr_real\n";
    for (std::size_t i = 0; i < realizations.size(); ++i) {
        const auto& r = realizations[i];
        out << i << "," << strec::format_double(r.pd_real) << ","
            << (r.rr_real ? strec::format_double(*r.rr_real) : std::string()) << "\n";
    }
    echo_resolved_config(app, opt.out);
    std::cout << "wrote " << opt.out << " (" << realizations.size() << " realizations)\n";
    return 0;
}

struct GenDataOpts {
    strec::SyntheticDatasetConfig config;
    std::vector<std::string> target_specs;
    std::string first_start = "2000-01-01";
    int months = 12;
    std::string out_dir = ".";
};

int run_gen_data(CLI::App& app, GenDataOpts& opt) {
    opt.config.target_pd = opt.target_specs.empty() ? strec::default_rating_targets()
                                                    : parse_targets(opt.target_specs);
    const strec::Date first = strec::parse_date(opt.first_start);
    if (opt.months < 1) throw std::invalid_argument("gen-data: --months must be >= 1");
    opt.config.start_dates.clear();
    for (int m = 0; m < opt.months; ++m)
        opt.config.start_dates.push_back(strec::add_months(first, m));
    const auto data = strec::generate_dataset(opt.config);
    fs::create_directories(opt.out_dir);
    const fs::path dir(opt.out_dir);
    strec::write_issuers_csv(data, (dir / "issuers.csv").string());
    strec::write_ratings_csv(data, (dir / "ratings.csv").string());
    strec::write_events_csv(data, (dir / "events.csv").string());
    strec::write_manifest(data, (dir / "manifest.json").string());
    echo_resolved_config(app, (dir / "gen-data").string());
    std::cout << "wrote " << opt.out_dir << ": " << data.issuers.size() << " issuers, "
              << data.events.size() << " events\n";
    return 0;
}

struct StorePaths {
    std::string issuers = "issuers.csv";
    std::string ratings = "ratings.csv";
    std::string events = "events.csv";
};

void add_store_options(CLI::App* cmd, StorePaths& paths) {
    cmd->add_option("--issuers", paths.issuers, "issuers.csv path");
    cmd->add_option("--ratings-file", paths.ratings, "ratings.csv path");
    cmd->add_option("--events", paths.events, "events.csv path");
}

struct CohortOpts {
    StorePaths paths;
    std::string start = "2000-01-01";
    int maturity_years = 1;
    std::vector<std::string> ratings;
    std::string seniority = "senior_secured";
};

int run_cohort(const CohortOpts& opt) {
    const auto store = strec::ingest(opt.paths.issuers, opt.paths.ratings, opt.paths.events);
    strec::CohortSpec spec;
    spec.start = strec::parse_date(opt.start);
    spec.maturity_years = opt.maturity_years;
    spec.ratings = parse_rating_list(opt.ratings);
    spec.seniority = strec::parse_seniority(opt.seniority);
    if (spec.ratings.empty()) throw std::invalid_argument("cohort: --rating required");
    const auto outcome = strec::build_cohort(store, spec);
    std::cout << outcome_to_json(outcome).dump(2) << "\n";
    return 0;
}

struct CorrelateOpts {
    CohortOpts cohort;
    std::string last_start = "2010-01-01";
    std::string out = "cohort_series.csv";
};

int run_correlate(CLI::App& app, const CorrelateOpts& opt) {
    const auto store = strec::ingest(opt.cohort.paths.issuers, opt.cohort.paths.ratings,
                                     opt.cohort.paths.events);
    strec::CohortSpec spec;
    spec.maturity_years = opt.cohort.maturity_years;
    spec.ratings = parse_rating_list(opt.cohort.ratings);
    spec.seniority = strec::parse_seniority(opt.cohort.seniority);
    if (spec.ratings.empty()) throw std::invalid_argument("correlate: --rating required");
    const auto series = strec::rolling_series(store, spec, strec::parse_date(opt.cohort.start),
                                              strec::parse_date(opt.last_start));
    auto out = strec::open_output(opt.out);
    out << "start_date,n_c,n_w,n_d,pd,mean_rr,flag\n";
    std::vector<std::pair<double, double>> pairs;
    for (const auto& point : series) {
        out << strec::to_string(point.start) << ",";
        if (point.outcome) {
            const auto& o = *point.outcome;
            out << o.n_c << "," << o.n_w << "," << o.n_d << "," << strec::format_double(o.pd)
                << "," << (o.mean_rr ? strec::format_double(*o.mean_rr) : std::string());
            if (o.mean_rr) pairs.emplace_back(o.pd, *o.mean_rr);
        } else {
            out << ",,,,";
        }
        out << "," << point.flag << "\n";
    }
    echo_resolved_config(app, opt.out);
    const double rho = strec::pearson(pairs);  // throws DegenerateError if too few
    json summary = {{"pearson", rho},
                    {"cohorts_used", pairs.size()},
                    {"cohorts_total", series.size()},
                    {"series_csv", opt.out}};
    std::cout << summary.dump(2) << "\n";
    return 0;
}

struct FitOpts {
    std::string input = "cohort_series.csv";
    int bins = 30;
    long min_count = 5;
    std::string domain = "observed";
    std::string out_prefix = "fit";
};

// Accepts either the correlate series (pd, mean_rr) or the simulator output
// (pd_real, rr_real). Rows without a recovery value are skipped.
std::vector<std::pair<double, double>> read_pd_rr_csv(const std::string& path) {
    auto in = strec::open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw strec::DataError(path, 1, "empty file");
    const auto header = strec::split_csv_line(line);
    int pd_col = -1, rr_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "pd" || header[i] == "pd_real") pd_col = static_cast<int>(i);
        if (header[i] == "mean_rr" || header[i] == "rr_real") rr_col = static_cast<int>(i);
    }
    if (pd_col < 0 || rr_col < 0)
        throw strec::DataError(path, 1, "need pd/pd_real and mean_rr/rr_real columns");
    std::vector<std::pair<double, double>> points;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = strec::split_csv_line(line);
        if (f.size() <= static_cast<std::size_t>(std::max(pd_col, rr_col)))
            throw strec::DataError(path, lineno, "short row");
        const std::string& pd_s = f[static_cast<std::size_t>(pd_col)];
        const std::string& rr_s = f[static_cast<std::size_t>(rr_col)];
        if (pd_s.empty() || rr_s.empty()) continue;
        const double pd = strec::parse_double(pd_s, path, lineno);
        const double rr = strec::parse_double(rr_s, path, lineno);
        if (pd <= 0.0 || pd >= 1.0) continue;  // degenerate cohorts carry no curve information
        points.emplace_back(pd, rr);
    }
    return points;
}

int run_fit(CLI::App& app, const FitOpts& opt) {
    const auto points = read_pd_rr_csv(opt.input);
    if (points.empty()) throw strec::DegenerateError("fit: no usable (pd, rr) rows in " + opt.input);
    const auto domain =
        opt.domain == "unit" ? strec::BinDomain::unit : strec::BinDomain::observed;
    if (opt.domain != "unit" && opt.domain != "observed")
        throw std::invalid_argument("fit: --domain must be 'observed' or 'unit'");
    const auto binned = strec::bin_series(points, opt.bins, domain, opt.min_count);
    const auto fit = strec::fit_b(binned, opt.input);
    const auto report = strec::fit_report(fit, binned);
    strec::write_fit_report_csv(report, opt.out_prefix + ".csv");
    {
        auto out = strec::open_output(opt.out_prefix + ".json");
        out << strec::fit_summary_json(fit).dump(2) << "\n";
    }
    echo_resolved_config(app, opt.out_prefix + ".csv");
    std::cout << strec::fit_summary_json(fit).dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structural recovery model toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file; flags override");

    std::uint64_t seed = 42;
    int threads = 1;
    app.add_option("--seed", seed, "master seed for all random streams")->capture_default_str();
    app.add_option("--threads", threads, "simulation worker threads")->capture_default_str();

    CurvesOpts curves;
    auto* cmd_curves = app.add_subcommand("curves", "sample the loss/recovery curve families");
    cmd_curves->add_option("--b", curves.b_values, "compound parameter values")
        ->required()->delimiter(',');
    cmd_curves->add_option("--grid-points", curves.grid_points, "number of PD grid points")
        ->capture_default_str();
    cmd_curves->add_option("--grid-min", curves.grid_min, "lowest PD")->capture_default_str();
    cmd_curves->add_option("--grid-max", curves.grid_max, "highest PD")->capture_default_str();
    cmd_curves->add_option("--out", curves.out, "output CSV")->capture_default_str();

    SimulateOpts sim;
    auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo of the correlated diffusion");
    cmd_sim->add_option("--mu", sim.config.params.mu, "drift")->capture_default_str();
    cmd_sim->add_option("--sigma", sim.config.params.sigma, "volatility")->capture_default_str();
    cmd_sim->add_option("--corr", sim.config.params.c, "market correlation")->capture_default_str();
    cmd_sim->add_option("--maturity", sim.config.params.maturity, "maturity in years")
        ->capture_default_str();
    cmd_sim->add_option("--v0", sim.config.params.v0, "initial asset value")->capture_default_str();
    cmd_sim->add_option("--face", sim.config.params.face, "debt face value")->capture_default_str();
    cmd_sim->add_option("--firms", sim.config.firms, "companies per portfolio")
        ->capture_default_str();
    cmd_sim->add_option("--realizations", sim.config.realizations, "market realizations")
        ->capture_default_str();
    cmd_sim->add_option("--out", sim.out, "output CSV")->capture_default_str();

    GenDataOpts gen;
    auto* cmd_gen = app.add_subcommand("gen-data", "generate a synthetic issuer dataset");
    cmd_gen->add_option("--mu", gen.config.mu, "drift")->capture_default_str();
    cmd_gen->add_option("--sigma", gen.config.sigma, "volatility")->capture_default_str();
    cmd_gen->add_option("--corr", gen.config.c, "market correlation")->capture_default_str();
    cmd_gen->add_option("--maturity-years", gen.config.maturity_years, "horizon in years")
        ->capture_default_str();
    cmd_gen->add_option("--target", gen.target_specs,
                        "RATING=PD target pairs (default: B1..Caa3 ladder)")
        ->delimiter(',');
    cmd_gen->add_option("--withdraw-prob", gen.config.p_w, "withdrawal probability per horizon")
        ->capture_default_str();
    cmd_gen->add_option("--issuers-per-rating", gen.config.issuers_per_rating,
                        "issuers per rating per start date")->capture_default_str();
    cmd_gen->add_option("--first-start", gen.first_start, "first cohort start date")
        ->capture_default_str();
    cmd_gen->add_option("--months", gen.months, "number of monthly start dates")
        ->capture_default_str();
    cmd_gen->add_option("--out-dir", gen.out_dir, "output directory")->capture_default_str();

    CohortOpts cohort;
    auto* cmd_cohort = app.add_subcommand("cohort", "build a single cohort and print its outcome");
    add_store_options(cmd_cohort, cohort.paths);
    cmd_cohort->add_option("--start", cohort.start, "cohort start date")->capture_default_str();
    cmd_cohort->add_option("--maturity-years", cohort.maturity_years, "model-maturity in years")
        ->capture_default_str();
    cmd_cohort->add_option("--rating", cohort.ratings, "ratings included")->delimiter(',');
    cmd_cohort->add_option("--seniority", cohort.seniority, "seniority class")
        ->capture_default_str();

    CorrelateOpts corr;
    auto* cmd_corr = app.add_subcommand("correlate", "rolling cohorts and PD-RR correlation");
    add_store_options(cmd_corr, corr.cohort.paths);
    cmd_corr->add_option("--first-start", corr.cohort.start, "first cohort start date")
        ->capture_default_str();
    cmd_corr->add_option("--last-start", corr.last_start, "last cohort start date")
        ->capture_default_str();
    cmd_corr->add_option("--maturity-years", corr.cohort.maturity_years,
                         "model-maturity in years")->capture_default_str();
    cmd_corr->add_option("--rating", corr.cohort.ratings, "ratings included")->delimiter(',');
    cmd_corr->add_option("--seniority", corr.cohort.seniority, "seniority class")
        ->capture_default_str();
    cmd_corr->add_option("--out", corr.out, "series CSV output")->capture_default_str();

    FitOpts fit;
    auto* cmd_fit = app.add_subcommand("fit", "bin (pd, rr) points and fit the compound parameter");
    cmd_fit->add_option("--input", fit.input, "CSV with pd/mean_rr or pd_real/rr_real columns")
        ->capture_default_str();
    cmd_fit->add_option("--bins", fit.bins, "number of PD bins")->capture_default_str();
    cmd_fit->add_option("--min-count", fit.min_count, "minimum points per usable bin")
        ->capture_default_str();
    cmd_fit->add_option("--domain", fit.domain, "bin domain: observed|unit")
        ->capture_default_str();
    cmd_fit->add_option("--out-prefix", fit.out_prefix, "prefix for report CSV/JSON")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    sim.config.seed.master_seed = seed;
    gen.config.seed.master_seed = seed;
    sim.threads = threads;

    try {
        if (cmd_curves->parsed()) return run_curves(app, curves);
        if (cmd_sim->parsed()) return run_simulate(app, sim);
        if (cmd_gen->parsed()) return run_gen_data(app, gen);
        if (cmd_cohort->parsed()) return run_cohort(cohort);
        if (cmd_corr->parsed()) return run_correlate(app, corr);
        if (cmd_fit->parsed()) return run_fit(app, fit);
    } catch (const strec::DegenerateError& e) {
        std::cerr << "degenerate computation: " << e.what() << "\n";
        return 3;
    } catch (const strec::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
