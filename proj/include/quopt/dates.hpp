#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace quopt {

// Calendar day stored as days since 1970-01-01 so comparisons and day counts
// are plain integer arithmetic.
class Date {
  public:
    Date() = default;

    static Date from_ymd(int year, unsigned month, unsigned day);

    // Parses strict ISO "YYYY-MM-DD"; nullopt on malformed or invalid dates.
    static std::optional<Date> parse(std::string_view iso);

    std::string to_string() const;

    Date plus_days(std::int32_t days) const { return Date{serial_ + days}; }

    std::int32_t serial() const { return serial_; }

    friend auto operator<=>(Date, Date) = default;

  private:
    explicit Date(std::int32_t serial) : serial_(serial) {}
    std::int32_t serial_ = 0;
};

// Signed count of calendar days from `from` to `to`.
inline std::int64_t days_between(Date from, Date to) {
    return std::int64_t{to.serial()} - std::int64_t{from.serial()};
}

// Actual/365 year fraction used to turn an expiry date into a tenor.
double year_fraction(Date from, Date to);

}  // namespace quopt
