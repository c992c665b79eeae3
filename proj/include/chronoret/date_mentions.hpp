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

// Pattern-based detection of explicit date mentions in free text: full
// dates, month-name dates, and bare four-digit years in [1000, 2999].

#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "chronoret/date.hpp"

namespace chronoret {

struct DateMention {
  std::size_t pos = 0;
  std::size_t len = 0;
  CalendarDate date;
};

namespace detail {

inline constexpr const char* kMonthAlternation =
    "(january|february|march|april|may|june|july|august|september|october|november|december|"
    "jan|feb|mar|apr|jun|jul|aug|sep|sept|oct|nov|dec)\\.?";

inline std::optional<int> month_number(std::string name) {
  for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  static constexpr const char* kPrefixes[] = {"jan", "feb", "mar", "apr", "may", "jun",
                                              "jul", "aug", "sep", "oct", "nov", "dec"};
  for (int i = 0; i < 12; ++i) {
    if (name.rfind(kPrefixes[i], 0) == 0) return i + 1;
  }
  return std::nullopt;
}

struct MentionPattern {
  std::regex re;
  enum Layout { IsoDay, IsoMonth, MonthDayYear, DayMonthYear, MonthYear, Year } layout;
};

inline const std::vector<MentionPattern>& mention_patterns() {
  static const std::vector<MentionPattern> patterns = [] {
    const auto flags = std::regex::ECMAScript | std::regex::icase;
    const std::string month = kMonthAlternation;
    const std::string year = "([12]\\d{3})";
    std::vector<MentionPattern> p;
    p.push_back({std::regex("\\b" + year + "-(\\d{2})-(\\d{2})\\b", flags), MentionPattern::IsoDay});
    p.push_back({std::regex("\\b" + year + "-(\\d{2})\\b", flags), MentionPattern::IsoMonth});
    p.push_back({std::regex("\\b" + month + "\\s+(\\d{1,2})(?:st|nd|rd|th)?,?\\s+" + year + "\\b", flags),
                 MentionPattern::MonthDayYear});
    p.push_back({std::regex("\\b(\\d{1,2})(?:st|nd|rd|th)?\\s+(?:of\\s+)?" + month + ",?\\s+" + year + "\\b", flags),
                 MentionPattern::DayMonthYear});
    p.push_back({std::regex("\\b" + month + ",?\\s+" + year + "\\b", flags), MentionPattern::MonthYear});
    p.push_back({std::regex("\\b" + year + "\\b", flags), MentionPattern::Year});
    return p;
  }();
  return patterns;
}

inline std::optional<CalendarDate> mention_date(const std::smatch& m, MentionPattern::Layout layout) {
  auto num = [&](int g) { return std::stoi(m[g].str()); };
  std::optional<int> y, mo, d;
  switch (layout) {
    case MentionPattern::IsoDay: y = num(1); mo = num(2); d = num(3); break;
    case MentionPattern::IsoMonth: y = num(1); mo = num(2); break;
    case MentionPattern::MonthDayYear: mo = month_number(m[1].str()); d = num(2); y = num(3); break;
    case MentionPattern::DayMonthYear: d = num(1); mo = month_number(m[2].str()); y = num(3); break;
    case MentionPattern::MonthYear: mo = month_number(m[1].str()); y = num(2); break;
    case MentionPattern::Year: y = num(1); break;
  }
  CalendarDate date{*y, mo, d};
  if (!date.valid() || date.year < 1000 || date.year > 2999) return std::nullopt;
  return date;
}

}  // namespace detail

// Non-overlapping mentions in text order; at a given position the longest
// pattern wins.
inline std::vector<DateMention> detect_dates(const std::string& text) {
  std::vector<DateMention> all;
  for (const auto& pattern : detail::mention_patterns()) {
    for (auto it = std::sregex_iterator(text.begin(), text.end(), pattern.re); it != std::sregex_iterator(); ++it) {
      if (auto date = detail::mention_date(*it, pattern.layout)) {
        all.push_back({static_cast<std::size_t>(it->position()), static_cast<std::size_t>(it->length()), *date});
      }
    }
  }
  std::sort(all.begin(), all.end(), [](const DateMention& a, const DateMention& b) {
    return a.pos != b.pos ? a.pos < b.pos : a.len > b.len;
  });
  std::vector<DateMention> out;
  std::size_t covered_to = 0;
  for (const auto& m : all) {
    if (m.pos < covered_to) continue;
    out.push_back(m);
    covered_to = m.pos + m.len;
  }
  return out;
}

}  // namespace chronoret
