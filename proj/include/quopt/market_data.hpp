#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "quopt/dates.hpp"
#include "quopt/linalg.hpp"

namespace quopt {

struct Observation {
    Date date;
    double price = 0.0;
};

// Dated positive close prices for one deliverable asset, strictly
// increasing in date.
struct PriceSeries {
    std::string asset_id;
    std::vector<Observation> observations;
};

// Price history restricted to the dates shared by every asset.
// prices is m x n: row = date, column = asset (input order preserved).
struct AlignedWindow {
    std::vector<std::string> asset_ids;
    std::vector<Date> dates;
    Matrix prices;
    // Set by lookback_window when fewer than the requested number of
    // observations were available before the valuation date.
    bool short_history = false;
};

// Parses CSV with header `date,asset_id,price` (ISO dates, '.' decimals).
// Returns one series per distinct asset, in order of first appearance,
// each sorted by date. Throws ParseError / DomainError / DuplicateError
// naming the offending line.
std::vector<PriceSeries> parse_price_csv(std::istream& in);
std::vector<PriceSeries> parse_price_csv(const std::string& text);

// Inverse of parse_price_csv for valid data (used for round-trips and to
// persist filtered data).
std::string to_csv(const std::vector<PriceSeries>& series);

// Keeps only the dates present in every series. Throws
// InsufficientDataError when fewer than 2 dates are common.
AlignedWindow align(const std::vector<PriceSeries>& series);

// The last n_obs rows strictly before valuation_date. When fewer rows
// qualify, returns all of them with short_history set; fewer than 2 is an
// InsufficientDataError.
AlignedWindow lookback_window(const AlignedWindow& window, Date valuation_date,
                              std::size_t n_obs = 30);

// Parses CSV with header `date,price` (one futures quote per date).
std::vector<Observation> parse_futures_csv(std::istream& in);

}  // namespace quopt
