// Copyright 2026 The chronoret Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "chronoret/error.hpp"

namespace chronoret {

enum class DateGranularity : std::uint8_t { Year = 0, Month = 1, Day = 2 };

constexpr bool is_leap_year(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

constexpr int days_in_month(int year, int month) {
  constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return month == 2 && is_leap_year(year) ? 29 : kDays[month - 1];
}

// A calendar date known to year, month, or day precision.
struct CalendarDate {
  int year = 1;
  std::optional<int> month;
  std::optional<int> day;

  static CalendarDate of_year(int y) { return make(y, std::nullopt, std::nullopt); }
  static CalendarDate of_month(int y, int m) { return make(y, m, std::nullopt); }
  static CalendarDate of_day(int y, int m, int d) { return make(y, m, d); }

  // Throws InvalidDate unless the fields form a real calendar date.
  static CalendarDate make(int y, std::optional<int> m, std::optional<int> d) {
    CalendarDate date{y, m, d};
    if (!date.valid()) throw InvalidDate("invalid calendar date " + date.to_iso());
    return date;
  }

  bool valid() const {
    if (year < 1 || year > 9999) return false;
    if (day && !month) return false;
    if (month && (*month < 1 || *month > 12)) return false;
    if (day && (*day < 1 || *day > days_in_month(year, *month))) return false;
    return true;
  }

  DateGranularity granularity() const {
    if (day) return DateGranularity::Day;
    if (month) return DateGranularity::Month;
    return DateGranularity::Year;
  }

  // "1905", "1905-07" or "1905-07-21" depending on granularity.
  std::string to_iso() const {
    auto pad = [](int v, int width) {
      std::string s = std::to_string(v);
      if (static_cast<int>(s.size()) < width) s.insert(0, width - s.size(), '0');
      return s;
    };
    std::string out = pad(year, 4);
    if (month) out += "-" + pad(*month, 2);
    if (day) out += "-" + pad(*day, 2);
    return out;
  }

  friend bool operator==(const CalendarDate&, const CalendarDate&) = default;
};

// Parses ISO-8601 calendar dates at year, month, or day precision. A time
// suffix after 'T' or a space is ignored.
inline CalendarDate parse_iso_date(std::string_view s) {
  const auto cut = s.find_first_of("T ");
  if (cut != std::string_view::npos) s = s.substr(0, cut);
  auto field = [&](std::string_view part, std::size_t width) -> int {
    int v = 0;
    if (part.size() != width) throw InvalidDate("malformed date '" + std::string(s) + "'");
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size())
      throw InvalidDate("malformed date '" + std::string(s) + "'");
    return v;
  };
  if (s.size() == 4) return CalendarDate::of_year(field(s, 4));
  if (s.size() == 7 && s[4] == '-') return CalendarDate::of_month(field(s.substr(0, 4), 4), field(s.substr(5, 2), 2));
  if (s.size() == 10 && s[4] == '-' && s[7] == '-')
    return CalendarDate::of_day(field(s.substr(0, 4), 4), field(s.substr(5, 2), 2),
                                field(s.substr(8, 2), 2));
  throw InvalidDate("malformed date '" + std::string(s) + "'");
}

// Packs a date into one integer (yyyymmdd with zeros for missing fields)
// alongside its granularity; used by the index file's date block.
inline std::int64_t pack_date(const CalendarDate& d) {
  return std::int64_t{d.year} * 10000 + d.month.value_or(0) * 100 + d.day.value_or(0);
}

inline CalendarDate unpack_date(std::int64_t packed, DateGranularity g) {
  const int year = static_cast<int>(packed / 10000);
  const int month = static_cast<int>(packed / 100 % 100);
  const int day = static_cast<int>(packed % 100);
  switch (g) {
    case DateGranularity::Year: return CalendarDate::of_year(year);
    case DateGranularity::Month: return CalendarDate::of_month(year, month);
    case DateGranularity::Day: return CalendarDate::of_day(year, month, day);
  }
  throw InvalidDate("unknown granularity");
}

}  // namespace chronoret
