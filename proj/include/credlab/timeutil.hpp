#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace credlab {

/// Calendar date, strict ISO-8601 "YYYY-MM-DD" text form.
/// Parsing validates the calendar (leap years included) and the exact
/// zero-padded digit layout, so parse and str are mutual inverses.
class Date {
  public:
    Date() = default;

    static Date from_ymd(int year, unsigned month, unsigned day);
    static Date parse(std::string_view text);

    std::string str() const;

    /// Days since 1970-01-01; may be negative.
    std::int64_t day_number() const;
    static Date from_day_number(std::int64_t days);

    Date next_day() const { return from_day_number(day_number() + 1); }

    int year() const { return static_cast<int>(ymd_.year()); }
    unsigned month() const { return static_cast<unsigned>(ymd_.month()); }
    unsigned day() const { return static_cast<unsigned>(ymd_.day()); }

    friend bool operator==(const Date&, const Date&) = default;
    friend std::strong_ordering operator<=>(const Date& a, const Date& b) {
        return a.day_number() <=> b.day_number();
    }

  private:
    std::chrono::year_month_day ymd_{std::chrono::year{1970}, std::chrono::month{1}, std::chrono::day{1}};
};

/// UTC timestamp with one-second resolution, strict "YYYY-MM-DDThh:mm:ssZ".
class Timestamp {
  public:
    Timestamp() = default;

    static Timestamp from_epoch_seconds(std::int64_t seconds);
    static Timestamp from_parts(const Date& date, unsigned hour, unsigned minute, unsigned second);
    static Timestamp parse(std::string_view text);

    std::string str() const;

    std::int64_t epoch_seconds() const { return seconds_; }
    Date date() const { return Date::from_day_number(floor_div_day()); }

    Timestamp plus_seconds(std::int64_t s) const { return from_epoch_seconds(seconds_ + s); }
    Timestamp plus_days(std::int64_t d) const { return plus_seconds(d * 86400); }

    friend bool operator==(const Timestamp&, const Timestamp&) = default;
    friend std::strong_ordering operator<=>(const Timestamp&, const Timestamp&) = default;

  private:
    std::int64_t floor_div_day() const;

    std::int64_t seconds_ = 0;
};

/// Scripted monotone clock used for all protocol timestamps so runs are
/// reproducible: wall time never enters the protocol.
class LogicalClock {
  public:
    explicit LogicalClock(Timestamp start, std::int64_t step_seconds = 300)
        : now_(start), step_(step_seconds) {}

    Timestamp now() const { return now_; }

    /// Returns the current time, then advances by one step.
    Timestamp tick() {
        Timestamp t = now_;
        now_ = now_.plus_seconds(step_);
        return t;
    }

    void advance_seconds(std::int64_t s) { now_ = now_.plus_seconds(s); }

  private:
    Timestamp now_;
    std::int64_t step_;
};

} // namespace credlab
