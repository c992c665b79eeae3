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

// Documents, passages and queries; chunking and answer-containment positives.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chronoret/date.hpp"
#include "chronoret/error.hpp"
#include "chronoret/text.hpp"

namespace chronoret {

inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::size_t kDefaultChunkSize = 100;

struct Document {
  std::string id;
  std::string title;
  std::string body;
  CalendarDate pub_date;
};

// One retrieval unit: a disjoint block of a document's words.
struct Passage {
  std::string id;
  std::string doc_id;
  std::size_t ordinal = 0;
  std::string title;
  std::string text;
  CalendarDate pub_date;

  friend bool operator==(const Passage&, const Passage&) = default;
};

struct Query {
  std::string id;
  std::string text;
  std::optional<CalendarDate> explicit_date;
  std::vector<std::string> answers;
};

inline std::string passage_id(std::string_view doc_id, std::size_t ordinal) {
  return std::string(doc_id) + "#" + std::to_string(ordinal);
}

// Splits the body into consecutive blocks of chunk_size words. The last block
// may be shorter. Title words are not counted.
inline std::vector<Passage> chunk_document(const Document& doc,
                                           std::size_t chunk_size = kDefaultChunkSize) {
  if (chunk_size == 0) throw InvalidArgument("chunk_size must be >= 1");
  const auto words = text::split_words(doc.body);
  if (words.empty()) throw EmptyDocument("document '" + doc.id + "' has an empty body");

  std::vector<Passage> out;
  out.reserve((words.size() + chunk_size - 1) / chunk_size);
  for (std::size_t start = 0, ordinal = 0; start < words.size(); start += chunk_size, ++ordinal) {
    const std::size_t end = std::min(words.size(), start + chunk_size);
    std::string body;
    for (std::size_t i = start; i < end; ++i) {
      if (i != start) body.push_back(' ');
      body.append(words[i]);
    }
    out.push_back(Passage{passage_id(doc.id, ordinal), doc.id, ordinal, doc.title,
                          std::move(body), doc.pub_date});
  }
  return out;
}

// Encoder input for a passage: title, separator token, text.
inline std::string render_passage_input(const Passage& p) {
  std::string out = p.title;
  out.append(" ").append(kSepToken).append(" ").append(p.text);
  return out;
}

// Answer matcher over pre-normalized answers. Reuse it when testing many
// passages against one query.
class AnswerMatcher {
 public:
  explicit AnswerMatcher(const std::vector<std::string>& answers) {
    for (const auto& a : answers) {
      auto n = text::normalize(a);
      if (!n.empty()) normalized_.push_back(std::move(n));
    }
  }

  bool matches_normalized(std::string_view normalized_text) const {
    for (const auto& a : normalized_) {
      if (normalized_text.find(a) != std::string_view::npos) return true;
    }
    return false;
  }

  bool matches(const Passage& p) const { return matches_normalized(text::normalize(p.text)); }

  bool empty() const { return normalized_.empty(); }

 private:
  std::vector<std::string> normalized_;
};

inline bool contains_answer(const Query& q, const Passage& p) {
  return AnswerMatcher(q.answers).matches(p);
}

// Every candidate whose normalized text contains a normalized answer, in
// candidate order. An empty result is not an error.
inline std::vector<Passage> select_positives(const Query& query,
                                             const std::vector<Passage>& candidates) {
  if (query.answers.empty()) throw InvalidArgument("query '" + query.id + "' has no answers");
  const AnswerMatcher matcher(query.answers);
  std::vector<Passage> out;
  for (const auto& p : candidates) {
    if (matcher.matches(p)) out.push_back(p);
  }
  return out;
}

}  // namespace chronoret
