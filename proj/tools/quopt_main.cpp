// quopt: quality-option valuation for delivery-settled futures.
//
// Subcommands:
//   calibrate  estimate vols/correlations from a cash-price CSV
//   price      value the delivery option for one market state
//   boyle      rerun the Boyle (1989) equicorrelated benchmark (self-validating)
//   batch      value the option across a list of dates, Table-style CSV out
//
// Exit codes: 0 success, 1 benchmark self-check failure, 2 input/data error,
// 3 numerical error (correlation matrix not positive definite).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "quopt/calibration.hpp"
#include "quopt/dates.hpp"
#include "quopt/errors.hpp"
#include "quopt/market_data.hpp"
#include "quopt/mc_engine.hpp"
#include "quopt/pricer.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitDataError = 2;
constexpr int kExitNumericalError = 3;

quopt::Date parse_date_arg(const std::string& text, const std::string& flag) {
    const auto date = quopt::Date::parse(text);
    if (!date) {
        throw quopt::ParseError(flag + ": malformed date '" + text + "' (expected YYYY-MM-DD)");
    }
    return *date;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw quopt::ParseError(flag + ": malformed number '" + item + "'");
        }
    }
    if (out.empty()) throw quopt::ParseError(flag + ": empty list");
    return out;
}

quopt::Matrix parse_corr_arg(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::stringstream ss(text);
    std::string row;
    while (std::getline(ss, row, ';')) {
        rows.push_back(parse_double_list(row, "--corr"));
    }
    const std::size_t n = rows.size();
    quopt::Matrix corr(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) {
            throw quopt::ParseError("--corr: row " + std::to_string(i) + " has " +
                                    std::to_string(rows[i].size()) + " entries, expected " +
                                    std::to_string(n));
        }
        for (std::size_t j = 0; j < n; ++j) corr(i, j) = rows[i][j];
    }
    return corr;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw quopt::ParseError("cannot open file '" + path + "'");
    return in;
}

// Basket from --par / --alt NAME:DISCOUNT flags against a known asset list.
// Assets not mentioned are deliverable at zero discount.
quopt::Basket build_basket(const std::vector<std::string>& asset_ids,
                           const std::string& par_id,
                           const std::vector<std::string>& alt_specs) {
    quopt::Basket basket;
    basket.asset_ids = asset_ids;
    basket.discounts.assign(asset_ids.size(), 0.0);

    auto index_of = [&](const std::string& id) -> std::size_t {
        for (std::size_t i = 0; i < asset_ids.size(); ++i) {
            if (asset_ids[i] == id) return i;
        }
        throw quopt::InvalidBasketError("asset '" + id + "' not present in the data");
    };

    basket.par_index = par_id.empty() ? 0 : index_of(par_id);
    for (const std::string& spec : alt_specs) {
        const auto colon = spec.rfind(':');
        if (colon == std::string::npos || colon + 1 == spec.size()) {
            throw quopt::ParseError("--alt expects NAME:DISCOUNT, got '" + spec + "'");
        }
        const std::string id = spec.substr(0, colon);
        double discount = 0.0;
        try {
            std::size_t used = 0;
            discount = std::stod(spec.substr(colon + 1), &used);
            if (used != spec.size() - colon - 1) throw std::invalid_argument(spec);
        } catch (const std::exception&) {
            throw quopt::ParseError("--alt: malformed discount in '" + spec + "'");
        }
        const std::size_t idx = index_of(id);
        if (idx == basket.par_index) {
            throw quopt::InvalidBasketError("par asset '" + id + "' cannot carry a discount");
        }
        basket.discounts[idx] = discount;
    }
    return basket;
}

json report_to_json(const quopt::ValuationReport& report) {
    json j;
    j["value"] = report.direct.value;
    j["std_error"] = report.direct.std_error;
    j["f_wo"] = report.direct.f_wo;
    j["f_w_estimate"] = report.direct.f_w_estimate;
    j["two_step_value"] = report.two_step_value;
    j["n_paths"] = report.direct.n_paths;
    j["seed"] = report.direct.seed;
    if (report.ratio_pct) j["ratio_pct"] = *report.ratio_pct;
    return j;
}

std::string report_to_csv(const quopt::ValuationReport& report) {
    std::string out = "value,std_error,f_wo,f_w_estimate,two_step_value,n_paths,seed,ratio_pct\n";
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g,%llu,%llu,", report.direct.value,
                  report.direct.std_error, report.direct.f_wo, report.direct.f_w_estimate,
                  report.two_step_value,
                  static_cast<unsigned long long>(report.direct.n_paths),
                  static_cast<unsigned long long>(report.direct.seed));
    out += buf;
    if (report.ratio_pct) {
        std::snprintf(buf, sizeof buf, "%.10g", *report.ratio_pct);
        out += buf;
    }
    out += '\n';
    return out;
}

struct CalibrateArgs {
    std::string prices_path;
    std::string valuation_date;
    std::size_t n_obs = 30;
    double periods_per_year = 252.0;
};

int run_calibrate(const CalibrateArgs& args) {
    auto file = open_or_throw(args.prices_path);
    const auto series = quopt::parse_price_csv(file);
    const auto window = quopt::align(series);
    const auto date = parse_date_arg(args.valuation_date, "--valuation-date");
    const auto lookback = quopt::lookback_window(window, date, args.n_obs);
    if (lookback.short_history) {
        std::cerr << "warning: only " << lookback.dates.size() << " observations before "
                  << args.valuation_date << " (requested " << args.n_obs << ")\n";
    }
    const auto vc = quopt::calibrate(lookback, args.periods_per_year);

    json j;
    j["asset_ids"] = vc.asset_ids;
    j["vols"] = vc.vols;
    json corr = json::array();
    for (std::size_t i = 0; i < vc.corr.rows(); ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < vc.corr.cols(); ++k) row.push_back(vc.corr(i, k));
        corr.push_back(row);
    }
    j["corr"] = corr;
    std::cout << j.dump(2) << '\n';
    return kExitOk;
}

struct PriceArgs {
    std::string prices_path;
    std::string valuation_date;
    std::string expiry;
    std::string spot_list;
    std::string vol_list;
    std::string corr_spec;
    std::string asset_list;
    std::string par_id;
    std::vector<std::string> alt_specs;
    double tau = 0.0;
    double rate = 0.0;
    std::uint64_t paths = 100'000;
    std::uint64_t seed = quopt::SimConfig{}.seed;
    std::size_t chunk_size = quopt::SimConfig{}.chunk_size;
    int threads = 0;
    std::size_t n_obs = 30;
    double periods_per_year = 252.0;
    double market_futures = 0.0;
    bool repair_corr = false;
    std::string output = "json";
};

quopt::SimConfig sim_config_from(std::uint64_t paths, std::uint64_t seed, std::size_t chunk_size,
                                 int threads) {
    if (paths < 2) throw quopt::DomainError("--paths must be at least 2");
    quopt::SimConfig cfg;
    cfg.n_pairs = paths / 2;  // one draw serves both antithetic branches
    cfg.seed = seed;
    cfg.chunk_size = chunk_size;
    cfg.threads = threads;
    return cfg;
}

int run_price(const PriceArgs& args) {
    quopt::MarketState state;
    quopt::VolCorr vc;
    std::vector<std::string> asset_ids;

    if (!args.prices_path.empty()) {
        if (args.valuation_date.empty() || args.expiry.empty()) {
            throw quopt::ParseError("--prices mode needs --valuation-date and --expiry");
        }
        auto file = open_or_throw(args.prices_path);
        const auto series = quopt::parse_price_csv(file);
        const auto window = quopt::align(series);
        const auto valuation = parse_date_arg(args.valuation_date, "--valuation-date");
        const auto expiry = parse_date_arg(args.expiry, "--expiry");
        if (expiry <= valuation) {
            throw quopt::DomainError("--expiry must fall after --valuation-date");
        }
        const auto lookback = quopt::lookback_window(window, valuation, args.n_obs);
        vc = quopt::calibrate(lookback, args.periods_per_year);
        asset_ids = vc.asset_ids;
        // Spot = close on the most recent day before the valuation date.
        const std::size_t last = lookback.prices.rows() - 1;
        state.spot.resize(asset_ids.size());
        for (std::size_t i = 0; i < asset_ids.size(); ++i) {
            state.spot[i] = lookback.prices(last, i);
        }
        state.tau = quopt::year_fraction(valuation, expiry);
    } else {
        if (args.spot_list.empty() || args.vol_list.empty() || args.corr_spec.empty()) {
            throw quopt::ParseError("explicit mode needs --spot, --vol and --corr");
        }
        state.spot = parse_double_list(args.spot_list, "--spot");
        vc.vols = parse_double_list(args.vol_list, "--vol");
        vc.corr = parse_corr_arg(args.corr_spec);
        if (!args.asset_list.empty()) {
            std::stringstream ss(args.asset_list);
            std::string id;
            while (std::getline(ss, id, ',')) asset_ids.push_back(id);
        } else {
            for (std::size_t i = 0; i < state.spot.size(); ++i) {
                asset_ids.push_back("asset" + std::to_string(i + 1));
            }
        }
        vc.asset_ids = asset_ids;
        if (args.tau > 0.0) {
            state.tau = args.tau;
        } else if (!args.valuation_date.empty() && !args.expiry.empty()) {
            const auto valuation = parse_date_arg(args.valuation_date, "--valuation-date");
            const auto expiry = parse_date_arg(args.expiry, "--expiry");
            if (expiry <= valuation) {
                throw quopt::DomainError("--expiry must fall after --valuation-date");
            }
            state.tau = quopt::year_fraction(valuation, expiry);
        } else {
            throw quopt::ParseError("explicit mode needs --tau or --valuation-date/--expiry");
        }
    }
    state.rate = args.rate;

    if (args.repair_corr) {
        vc.corr = quopt::nearest_psd_clip(vc.corr);
    }
    const auto basket = build_basket(asset_ids, args.par_id, args.alt_specs);
    const auto cfg = sim_config_from(args.paths, args.seed, args.chunk_size, args.threads);
    const std::optional<double> market =
        args.market_futures > 0.0 ? std::optional<double>(args.market_futures) : std::nullopt;

    const auto report = quopt::value_quality_option(state, vc, basket, cfg, market);
    if (args.output == "csv") {
        std::cout << report_to_csv(report);
    } else {
        std::cout << report_to_json(report).dump(2) << '\n';
    }
    return kExitOk;
}

struct BoyleArgs {
    std::uint64_t paths = 100'000;
    std::uint64_t seed = quopt::SimConfig{}.seed;
    std::size_t chunk_size = quopt::SimConfig{}.chunk_size;
    int threads = 0;
    double tolerance_pct = 0.5;
};

int run_boyle(const BoyleArgs& args) {
    const auto cfg = sim_config_from(args.paths, args.seed, args.chunk_size, args.threads);
    const auto cells = quopt::boyle_table(cfg);
    std::cout << quopt::boyle_table_csv(cells);
    bool ok = true;
    for (const auto& cell : cells) {
        if (std::abs(cell.relative_error_pct) > args.tolerance_pct) {
            std::cerr << "check failed: n=" << cell.n_assets << " rho=" << cell.rho
                      << " relative error " << cell.relative_error_pct << "% exceeds "
                      << args.tolerance_pct << "%\n";
            ok = false;
        }
    }
    return ok ? kExitOk : kExitCheckFailed;
}

struct BatchArgs {
    std::string prices_path;
    std::string futures_path;
    std::string expiry;
    std::string dates_list;
    std::string par_id;
    std::vector<std::string> alt_specs;
    double rate = 0.0;
    std::uint64_t paths = 100'000;
    std::uint64_t seed = quopt::SimConfig{}.seed;
    std::size_t chunk_size = quopt::SimConfig{}.chunk_size;
    int threads = 0;
    std::size_t n_obs = 30;
    double periods_per_year = 252.0;
    bool repair_corr = false;
};

int run_batch(const BatchArgs& args) {
    auto prices_file = open_or_throw(args.prices_path);
    const auto series = quopt::parse_price_csv(prices_file);
    const auto window = quopt::align(series);
    auto futures_file = open_or_throw(args.futures_path);
    const auto futures = quopt::parse_futures_csv(futures_file);
    const auto expiry = parse_date_arg(args.expiry, "--expiry");

    std::vector<quopt::Date> dates;
    {
        std::stringstream ss(args.dates_list);
        std::string item;
        while (std::getline(ss, item, ',')) {
            dates.push_back(parse_date_arg(item, "--dates"));
        }
    }
    if (dates.empty()) throw quopt::ParseError("--dates: no valuation dates given");

    auto futures_at = [&](quopt::Date d) -> std::optional<double> {
        for (const auto& obs : futures) {
            if (obs.date == d) return obs.price;
        }
        return std::nullopt;
    };

    std::cout << "date,futures_price,option_value,option_pct_of_futures,error\n";
    std::size_t succeeded = 0;
    for (const quopt::Date date : dates) {
        std::string error;
        double futures_price = 0.0;
        double value = 0.0;
        double pct = 0.0;
        try {
            const auto quote = futures_at(date);
            if (!quote) throw quopt::InsufficientDataError("no futures quote on " + date.to_string());
            futures_price = *quote;
            if (expiry <= date) throw quopt::DomainError("valuation date is on or after expiry");

            const auto lookback = quopt::lookback_window(window, date, args.n_obs);
            auto vc = quopt::calibrate(lookback, args.periods_per_year);
            if (args.repair_corr) vc.corr = quopt::nearest_psd_clip(vc.corr);

            quopt::MarketState state;
            const std::size_t last = lookback.prices.rows() - 1;
            state.spot.resize(vc.size());
            for (std::size_t i = 0; i < vc.size(); ++i) state.spot[i] = lookback.prices(last, i);
            state.tau = quopt::year_fraction(date, expiry);
            state.rate = args.rate;

            const auto basket = build_basket(vc.asset_ids, args.par_id, args.alt_specs);
            const auto cfg = sim_config_from(args.paths, args.seed, args.chunk_size, args.threads);
            const auto report = quopt::value_quality_option(state, vc, basket, cfg, futures_price);
            value = report.direct.value;
            pct = report.ratio_pct.value_or(0.0);
            ++succeeded;
        } catch (const quopt::Error& e) {
            error = e.what();
            for (char& c : error) {
                if (c == ',' || c == '\n') c = ';';
            }
        }
        char buf[256];
        if (error.empty()) {
            std::snprintf(buf, sizeof buf, "%s,%.10g,%.6f,%.4f,\n", date.to_string().c_str(),
                          futures_price, value, pct);
            std::cout << buf;
        } else {
            std::cout << date.to_string() << ",,,," << error << '\n';
        }
    }
    return succeeded > 0 ? kExitOk : kExitDataError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo valuation of the delivery quality option in commodity futures"};
    app.require_subcommand(1);

    CalibrateArgs cal;
    auto* cal_cmd = app.add_subcommand("calibrate", "estimate vols/correlations from price history");
    cal_cmd->add_option("--prices", cal.prices_path, "cash price CSV (date,asset_id,price)")
        ->required();
    cal_cmd->add_option("--valuation-date", cal.valuation_date, "ISO date the lookback ends before")
        ->required();
    cal_cmd->add_option("--n-obs", cal.n_obs, "lookback observations (default 30)");
    cal_cmd->add_option("--periods-per-year", cal.periods_per_year,
                        "annualization factor (default 252)");

    PriceArgs price;
    auto* price_cmd = app.add_subcommand("price", "value the quality option once");
    price_cmd->add_option("--prices", price.prices_path, "cash price CSV; calibrates inline");
    price_cmd->add_option("--valuation-date", price.valuation_date, "ISO valuation date");
    price_cmd->add_option("--expiry", price.expiry, "ISO expiry date");
    price_cmd->add_option("--spot", price.spot_list, "explicit spots, comma separated");
    price_cmd->add_option("--vol", price.vol_list, "explicit vols, comma separated");
    price_cmd->add_option("--corr", price.corr_spec, "explicit correlation rows 'a,b;c,d'");
    price_cmd->add_option("--assets", price.asset_list, "asset ids for explicit mode");
    price_cmd->add_option("--tau", price.tau, "time to expiry in years (explicit mode)");
    price_cmd->add_option("--rate", price.rate, "risk-free rate, continuously compounded")
        ->required();
    price_cmd->add_option("--par", price.par_id, "par asset id (default: first asset)");
    price_cmd->add_option("--alt", price.alt_specs, "alternative NAME:DISCOUNT (repeatable)");
    price_cmd->add_option("--paths", price.paths, "total simulation paths (default 100000)");
    price_cmd->add_option("--seed", price.seed, "RNG seed");
    price_cmd->add_option("--chunk-size", price.chunk_size, "pairs per work chunk");
    price_cmd->add_option("--threads", price.threads, "worker cap (result-neutral)");
    price_cmd->add_option("--n-obs", price.n_obs, "lookback observations (default 30)");
    price_cmd->add_option("--periods-per-year", price.periods_per_year,
                          "annualization factor (default 252)");
    price_cmd->add_option("--market-futures", price.market_futures,
                          "observed futures price for the ratio column");
    price_cmd->add_flag("--repair-corr", price.repair_corr,
                        "clip the correlation matrix to positive definite");
    price_cmd->add_option("--output", price.output, "json (default) or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    BoyleArgs boyle;
    auto* boyle_cmd = app.add_subcommand("boyle", "rerun the Boyle (1989) benchmark table");
    boyle_cmd->add_option("--paths", boyle.paths, "total simulation paths (default 100000)");
    boyle_cmd->add_option("--seed", boyle.seed, "RNG seed");
    boyle_cmd->add_option("--chunk-size", boyle.chunk_size, "pairs per work chunk");
    boyle_cmd->add_option("--threads", boyle.threads, "worker cap (result-neutral)");
    boyle_cmd->add_option("--tolerance-pct", boyle.tolerance_pct,
                          "self-check threshold in percent (default 0.5)");

    BatchArgs batch;
    auto* batch_cmd = app.add_subcommand("batch", "value the option across valuation dates");
    batch_cmd->add_option("--prices", batch.prices_path, "cash price CSV")->required();
    batch_cmd->add_option("--futures", batch.futures_path, "futures CSV (date,price)")->required();
    batch_cmd->add_option("--expiry", batch.expiry, "ISO contract expiry")->required();
    batch_cmd->add_option("--dates", batch.dates_list, "comma separated valuation dates")
        ->required();
    batch_cmd->add_option("--rate", batch.rate, "risk-free rate")->required();
    batch_cmd->add_option("--par", batch.par_id, "par asset id (default: first asset)");
    batch_cmd->add_option("--alt", batch.alt_specs, "alternative NAME:DISCOUNT (repeatable)");
    batch_cmd->add_option("--paths", batch.paths, "total simulation paths");
    batch_cmd->add_option("--seed", batch.seed, "RNG seed");
    batch_cmd->add_option("--chunk-size", batch.chunk_size, "pairs per work chunk");
    batch_cmd->add_option("--threads", batch.threads, "worker cap (result-neutral)");
    batch_cmd->add_option("--n-obs", batch.n_obs, "lookback observations (default 30)");
    batch_cmd->add_option("--periods-per-year", batch.periods_per_year, "annualization factor");
    batch_cmd->add_flag("--repair-corr", batch.repair_corr, "repair non-PSD correlations");

    try {
        app.parse(argc, argv);
        if (cal_cmd->parsed()) return run_calibrate(cal);
        if (price_cmd->parsed()) return run_price(price);
        if (boyle_cmd->parsed()) return run_boyle(boyle);
        if (batch_cmd->parsed()) return run_batch(batch);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitDataError;
    } catch (const quopt::NotPsdError& e) {
        std::cerr << "error: " << e.what() << " (rerun with --repair-corr to clip)\n";
        return kExitNumericalError;
    } catch (const quopt::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDataError;
    }
    return kExitOk;
}
