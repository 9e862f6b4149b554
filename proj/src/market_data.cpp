#include "quopt/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "quopt/errors.hpp"

namespace quopt {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return fields;
}

double parse_price_field(std::string_view text, std::size_t line_no) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": malformed price '" +
                         std::string(text) + "'");
    }
    return value;
}

Date parse_date_field(std::string_view text, std::size_t line_no) {
    const auto date = Date::parse(text);
    if (!date) {
        throw ParseError("line " + std::to_string(line_no) + ": malformed date '" +
                         std::string(text) + "' (expected YYYY-MM-DD)");
    }
    return *date;
}

}  // namespace

std::vector<PriceSeries> parse_price_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("empty input: expected header 'date,asset_id,price'");
    }
    if (split(line, ',') != std::vector<std::string_view>{"date", "asset_id", "price"}) {
        throw ParseError("line 1: expected header 'date,asset_id,price'");
    }

    std::vector<PriceSeries> series;
    std::unordered_map<std::string, std::size_t> index_of;
    std::set<std::pair<std::int32_t, std::string>> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 3) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                             std::to_string(fields.size()));
        }
        const Date date = parse_date_field(fields[0], line_no);
        const std::string asset(fields[1]);
        if (asset.empty()) {
            throw ParseError("line " + std::to_string(line_no) + ": empty asset_id");
        }
        const double price = parse_price_field(fields[2], line_no);
        if (!(price > 0.0)) {
            throw DomainError("line " + std::to_string(line_no) + ": price " +
                              std::string(fields[2]) + " for " + asset +
                              " must be positive");
        }
        if (!seen.emplace(date.serial(), asset).second) {
            throw DuplicateError("line " + std::to_string(line_no) + ": duplicate observation for " +
                                 asset + " on " + date.to_string());
        }
        auto [it, inserted] = index_of.emplace(asset, series.size());
        if (inserted) series.push_back({asset, {}});
        series[it->second].observations.push_back({date, price});
    }
    for (auto& s : series) {
        std::sort(s.observations.begin(), s.observations.end(),
                  [](const Observation& a, const Observation& b) { return a.date < b.date; });
    }
    return series;
}

std::vector<PriceSeries> parse_price_csv(const std::string& text) {
    std::istringstream in(text);
    return parse_price_csv(in);
}

std::string to_csv(const std::vector<PriceSeries>& series) {
    std::string out = "date,asset_id,price\n";
    for (const auto& s : series) {
        for (const auto& obs : s.observations) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", obs.price);
            out += obs.date.to_string();
            out += ',';
            out += s.asset_id;
            out += ',';
            out += buf;
            out += '\n';
        }
    }
    return out;
}

AlignedWindow align(const std::vector<PriceSeries>& series) {
    if (series.empty()) {
        throw InsufficientDataError("no price series to align");
    }
    // Dates present in every series, with per-series price lookup.
    std::vector<std::map<std::int32_t, double>> by_date(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        for (const auto& obs : series[i].observations) {
            by_date[i].emplace(obs.date.serial(), obs.price);
        }
    }
    std::vector<Date> common;
    for (const auto& obs : series[0].observations) {
        bool everywhere = true;
        for (std::size_t i = 1; i < series.size(); ++i) {
            if (!by_date[i].contains(obs.date.serial())) {
                everywhere = false;
                break;
            }
        }
        if (everywhere) common.push_back(obs.date);
    }
    if (common.size() < 2) {
        throw InsufficientDataError("only " + std::to_string(common.size()) +
                                    " dates are common to all assets; need at least 2");
    }

    AlignedWindow window;
    window.dates = common;
    window.prices = Matrix(common.size(), series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        window.asset_ids.push_back(series[i].asset_id);
        for (std::size_t k = 0; k < common.size(); ++k) {
            window.prices(k, i) = by_date[i].at(common[k].serial());
        }
    }
    return window;
}

AlignedWindow lookback_window(const AlignedWindow& window, Date valuation_date,
                              std::size_t n_obs) {
    if (n_obs < 2) {
        throw DomainError("n_obs must be at least 2, got " + std::to_string(n_obs));
    }
    const auto past_end = std::lower_bound(window.dates.begin(), window.dates.end(),
                                           valuation_date);
    const std::size_t available = static_cast<std::size_t>(past_end - window.dates.begin());
    if (available < 2) {
        throw InsufficientDataError("only " + std::to_string(available) +
                                    " observations before " + valuation_date.to_string() +
                                    "; need at least 2");
    }
    const std::size_t take = std::min(available, n_obs);
    const std::size_t first = available - take;

    AlignedWindow out;
    out.asset_ids = window.asset_ids;
    out.dates.assign(window.dates.begin() + first, window.dates.begin() + available);
    out.prices = Matrix(take, window.asset_ids.size());
    for (std::size_t k = 0; k < take; ++k) {
        for (std::size_t i = 0; i < window.asset_ids.size(); ++i) {
            out.prices(k, i) = window.prices(first + k, i);
        }
    }
    out.short_history = take < n_obs;
    return out;
}

std::vector<Observation> parse_futures_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("empty input: expected header 'date,price'");
    }
    if (split(line, ',') != std::vector<std::string_view>{"date", "price"}) {
        throw ParseError("line 1: expected header 'date,price'");
    }
    std::vector<Observation> out;
    std::set<std::int32_t> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 2) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 2 fields, got " +
                             std::to_string(fields.size()));
        }
        const Date date = parse_date_field(fields[0], line_no);
        const double price = parse_price_field(fields[1], line_no);
        if (!(price > 0.0)) {
            throw DomainError("line " + std::to_string(line_no) + ": price must be positive");
        }
        if (!seen.insert(date.serial()).second) {
            throw DuplicateError("line " + std::to_string(line_no) + ": duplicate futures quote on " +
                                 date.to_string());
        }
        out.push_back({date, price});
    }
    std::sort(out.begin(), out.end(),
              [](const Observation& a, const Observation& b) { return a.date < b.date; });
    return out;
}

}  // namespace quopt
