#include "credlab/timeutil.hpp"

#include <cstdio>

#include "credlab/errors.hpp"

namespace credlab {

namespace {

bool parse_fixed_uint(std::string_view text, std::size_t pos, std::size_t width, long& out) {
    long value = 0;
    for (std::size_t i = 0; i < width; ++i) {
        char c = text[pos + i];
        if (c < '0' || c > '9') return false;
        value = value * 10 + (c - '0');
    }
    out = value;
    return true;
}

} // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
    std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    if (!ymd.ok() || year < 1 || year > 9999) {
        raise(ErrorCode::NonCanonicalValue, "invalid calendar date");
    }
    Date d;
    d.ymd_ = ymd;
    return d;
}

Date Date::parse(std::string_view text) {
    long y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
        !parse_fixed_uint(text, 0, 4, y) || !parse_fixed_uint(text, 5, 2, m) ||
        !parse_fixed_uint(text, 8, 2, d)) {
        raise(ErrorCode::NonCanonicalValue, "date not in YYYY-MM-DD form: " + std::string(text));
    }
    return from_ymd(static_cast<int>(y), static_cast<unsigned>(m), static_cast<unsigned>(d));
}

std::string Date::str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year(), month(), day());
    return buf;
}

std::int64_t Date::day_number() const {
    return std::chrono::sys_days(ymd_).time_since_epoch().count();
}

Date Date::from_day_number(std::int64_t days) {
    std::chrono::sys_days sd{std::chrono::days{days}};
    Date d;
    d.ymd_ = std::chrono::year_month_day{sd};
    if (!d.ymd_.ok() || d.year() < 1 || d.year() > 9999) {
        raise(ErrorCode::NonCanonicalValue, "day number out of supported range");
    }
    return d;
}

Timestamp Timestamp::from_epoch_seconds(std::int64_t seconds) {
    Timestamp t;
    t.seconds_ = seconds;
    // Force range validation via the calendar conversion.
    (void)t.date();
    return t;
}

Timestamp Timestamp::from_parts(const Date& date, unsigned hour, unsigned minute, unsigned second) {
    if (hour > 23 || minute > 59 || second > 59) {
        raise(ErrorCode::NonCanonicalValue, "time of day out of range");
    }
    Timestamp t;
    t.seconds_ = date.day_number() * 86400 + hour * 3600 + minute * 60 + second;
    return t;
}

Timestamp Timestamp::parse(std::string_view text) {
    long h = 0, m = 0, s = 0;
    if (text.size() != 20 || text[10] != 'T' || text[13] != ':' || text[16] != ':' || text[19] != 'Z' ||
        !parse_fixed_uint(text, 11, 2, h) || !parse_fixed_uint(text, 14, 2, m) ||
        !parse_fixed_uint(text, 17, 2, s)) {
        raise(ErrorCode::NonCanonicalValue, "timestamp not in YYYY-MM-DDThh:mm:ssZ form: " + std::string(text));
    }
    Date d = Date::parse(text.substr(0, 10));
    return from_parts(d, static_cast<unsigned>(h), static_cast<unsigned>(m), static_cast<unsigned>(s));
}

std::string Timestamp::str() const {
    std::int64_t day = floor_div_day();
    std::int64_t rem = seconds_ - day * 86400;
    Date d = Date::from_day_number(day);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%sT%02d:%02d:%02dZ", d.str().c_str(), static_cast<int>(rem / 3600),
                  static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
    return buf;
}

std::int64_t Timestamp::floor_div_day() const {
    std::int64_t day = seconds_ / 86400;
    if (seconds_ % 86400 < 0) --day;
    return day;
}

} // namespace credlab
