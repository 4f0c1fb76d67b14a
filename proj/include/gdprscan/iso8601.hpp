#pragma once

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <optional>
#include <string>
#include <string_view>

namespace gdprscan::iso8601 {

// Strict "YYYY-MM-DDTHH:MM:SSZ" (UTC, second precision). Anything else is rejected.
inline std::optional<std::int64_t> parse_utc(std::string_view text) {
    if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
        text[13] != ':' || text[16] != ':' || text[19] != 'Z')
        return std::nullopt;
    for (std::size_t i = 0; i < 19; ++i) {
        if (i == 4 || i == 7 || i == 10 || i == 13 || i == 16) continue;
        if (text[i] < '0' || text[i] > '9') return std::nullopt;
    }

    auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) v = v * 10 + (text[i] - '0');
        return v;
    };

    std::tm tm{};
    tm.tm_year = num(0, 4) - 1900;
    tm.tm_mon = num(5, 2) - 1;
    tm.tm_mday = num(8, 2);
    tm.tm_hour = num(11, 2);
    tm.tm_min = num(14, 2);
    tm.tm_sec = num(17, 2);
    if (tm.tm_year < 0) return std::nullopt;

    std::tm probe = tm;
    std::time_t t = timegm(&probe);
    if (t == static_cast<std::time_t>(-1) && tm.tm_year != 69) return std::nullopt;

    // timegm normalizes out-of-range fields (e.g. Feb 30); require a round trip.
    std::tm back{};
    if (gmtime_r(&t, &back) == nullptr) return std::nullopt;
    if (back.tm_year != tm.tm_year || back.tm_mon != tm.tm_mon || back.tm_mday != tm.tm_mday ||
        back.tm_hour != tm.tm_hour || back.tm_min != tm.tm_min || back.tm_sec != tm.tm_sec)
        return std::nullopt;

    return static_cast<std::int64_t>(t);
}

inline std::string format_utc(std::int64_t epoch_seconds) {
    std::time_t t = static_cast<std::time_t>(epoch_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

inline std::int64_t now_epoch() { return static_cast<std::int64_t>(std::time(nullptr)); }

inline std::string now_utc() { return format_utc(now_epoch()); }

}  // namespace gdprscan::iso8601
