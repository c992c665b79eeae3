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

// Date-as-text baselines: mark the date with [S-DATE]/[E-DATE] tags, or
// append it after a [SEP] token, before the text reaches a semantic encoder.

#include <string>
#include <string_view>

#include "chronoret/corpus.hpp"
#include "chronoret/date_mentions.hpp"
#include "chronoret/error.hpp"

namespace chronoret {

enum class InjectionMode { None, Tag, Token };

inline constexpr std::string_view kStartDateToken = "[S-DATE]";
inline constexpr std::string_view kEndDateToken = "[E-DATE]";

inline InjectionMode parse_injection_mode(std::string_view s) {
  if (s == "none") return InjectionMode::None;
  if (s == "tag") return InjectionMode::Tag;
  if (s == "token") return InjectionMode::Token;
  throw InvalidArgument("unknown injection mode '" + std::string(s) + "' (expected none|tag|token)");
}

inline std::string render_date(const CalendarDate& d) { return d.to_iso(); }

struct InjectedText {
  std::string text;
  bool appended_fallback = false;  // Tag mode found no mention to wrap
};

namespace detail {

inline bool has_marker(std::string_view s) {
  return s.find(kStartDateToken) != std::string_view::npos ||
         s.find(kEndDateToken) != std::string_view::npos || s.find(kSepToken) != std::string_view::npos;
}

inline std::string tag_suffix(const CalendarDate& d) {
  return " " + std::string(kStartDateToken) + " " + render_date(d) + " " + std::string(kEndDateToken);
}

inline std::string token_suffix(const CalendarDate& d) {
  return " " + std::string(kSepToken) + " " + render_date(d);
}

}  // namespace detail

// Tag wraps the first date mention in place; with no detectable mention it
// appends the tagged date instead. Token appends "[SEP] <date>".
inline InjectedText inject_query(const Query& q, InjectionMode mode) {
  if (mode == InjectionMode::None) return {q.text, false};
  if (!q.explicit_date) throw InvalidArgument("query '" + q.id + "' has no explicit date to inject");
  if (detail::has_marker(q.text))
    throw MarkerConflict("query '" + q.id + "' already contains marker tokens");
  if (mode == InjectionMode::Token) return {q.text + detail::token_suffix(*q.explicit_date), false};

  const auto mentions = detect_dates(q.text);
  if (mentions.empty()) return {q.text + detail::tag_suffix(*q.explicit_date), true};
  const auto& m = mentions.front();
  std::string out = q.text.substr(0, m.pos);
  out.append(kStartDateToken).append(" ").append(q.text, m.pos, m.len).append(" ").append(kEndDateToken);
  out.append(q.text, m.pos + m.len);
  return {std::move(out), false};
}

// Rendered passage input with the publication date appended.
inline std::string inject_passage(const Passage& p, InjectionMode mode) {
  if (mode != InjectionMode::None && (detail::has_marker(p.title) || detail::has_marker(p.text)))
    throw MarkerConflict("passage '" + p.id + "' already contains marker tokens");
  std::string out = render_passage_input(p);
  switch (mode) {
    case InjectionMode::None: break;
    case InjectionMode::Tag: out += detail::tag_suffix(p.pub_date); break;
    case InjectionMode::Token: out += detail::token_suffix(p.pub_date); break;
  }
  return out;
}

// Inverse of inject_query for text that had no marker tokens to begin with.
inline std::string strip_query_injection(const InjectedText& injected, InjectionMode mode) {
  const std::string& s = injected.text;
  if (mode == InjectionMode::None) return s;
  const std::string open = std::string(kStartDateToken) + " ";
  const std::string close = " " + std::string(kEndDateToken);
  if (mode == InjectionMode::Token || injected.appended_fallback) {
    const std::string marker = mode == InjectionMode::Token ? " " + std::string(kSepToken) + " " : " " + open;
    const auto at = s.rfind(marker);
    return at == std::string::npos ? s : s.substr(0, at);
  }
  const auto a = s.find(open);
  if (a == std::string::npos) return s;
  const auto b = s.find(close, a);
  if (b == std::string::npos) return s;
  return s.substr(0, a) + s.substr(a + open.size(), b - a - open.size()) + s.substr(b + close.size());
}

// Removes the suffix added by inject_passage and returns the rendered input.
inline std::string strip_passage_injection(std::string_view injected, InjectionMode mode) {
  std::string s(injected);
  const std::string marker = mode == InjectionMode::Tag   ? " " + std::string(kStartDateToken) + " "
                             : mode == InjectionMode::Token ? " " + std::string(kSepToken) + " "
                                                            : std::string();
  if (marker.empty()) return s;
  const auto at = s.rfind(marker);
  return at == std::string::npos ? s : s.substr(0, at);
}

}  // namespace chronoret
