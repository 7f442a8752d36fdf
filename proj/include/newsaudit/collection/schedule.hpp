#pragma once

#include <chrono>
#include <ctime>
#include <string>

#include "newsaudit/core/error.hpp"

namespace newsaudit::collection {

// Parse "HH:MM" (24h). Throws ConfigError on malformed input.
inline std::pair<int, int> parse_schedule_time(const std::string& hhmm) {
    if (hhmm.size() != 5 || hhmm[2] != ':')
        throw ConfigError("schedule_time must be HH:MM, got '" + hhmm + "'");
    const int h = std::stoi(hhmm.substr(0, 2));
    const int m = std::stoi(hhmm.substr(3, 2));
    if (h < 0 || h > 23 || m < 0 || m > 59)
        throw ConfigError("schedule_time out of range: '" + hhmm + "'");
    return {h, m};
}

// Next local-time occurrence of HH:MM strictly after `now`. Pure so the daily
// loop stays trivially testable; cron-style external triggering just uses the
// one-shot mode instead.
inline std::time_t next_run_after(std::time_t now, const std::string& hhmm) {
    const auto [h, m] = parse_schedule_time(hhmm);
    std::tm tm{};
    localtime_r(&now, &tm);
    tm.tm_hour = h;
    tm.tm_min = m;
    tm.tm_sec = 0;
    std::time_t candidate = std::mktime(&tm);
    if (candidate <= now) {
        tm.tm_mday += 1;
        tm.tm_isdst = -1;
        candidate = std::mktime(&tm);
    }
    return candidate;
}

// Current local day as an ISO date, the `day` coordinate for live probes.
inline std::string today_local_iso() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    localtime_r(&t, &tm);
    char buf[16];
    std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
    return buf;
}

} // namespace newsaudit::collection
