#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace tradenet {

using Date = std::chrono::year_month_day;

// Strict ISO `YYYY-MM-DD`; returns nullopt on any deviation or invalid day.
std::optional<Date> parse_iso_date(std::string_view text);

std::string to_iso(const Date& date);

}  // namespace tradenet
