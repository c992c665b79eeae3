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

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>

#include "chronoret/corpus.hpp"
#include "test_util.hpp"

using namespace chronoret;
using chronoret::testing::make_passage;
using chronoret::testing::make_query;
using chronoret::testing::words;

namespace {

Document doc_with(std::string body, std::string title = "Title") {
  return Document{"d1", std::move(title), std::move(body), CalendarDate::of_day(1987, 3, 4)};
}

std::vector<std::size_t> word_counts(const std::vector<Passage>& ps) {
  std::vector<std::size_t> out;
  for (const auto& p : ps) out.push_back(text::split_words(p.text).size());
  return out;
}

// Independent splitter over ASCII whitespace using stream extraction.
std::vector<std::vector<std::string>> reference_blocks(const std::string& body, std::size_t size) {
  std::istringstream in(body);
  std::vector<std::vector<std::string>> blocks;
  std::string w;
  while (in >> w) {
    if (blocks.empty() || blocks.back().size() == size) blocks.emplace_back();
    blocks.back().push_back(w);
  }
  return blocks;
}

// Naive containment: lowercase every byte, collapse whitespace by stream
// extraction, then scan.
std::string naive_normalize(const std::string& s) {
  std::istringstream in(s);
  std::string w, out;
  while (in >> w) {
    if (!out.empty()) out += ' ';
    for (char c : w) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool naive_contains(const Query& q, const Passage& p) {
  const auto hay = naive_normalize(p.text);
  for (const auto& a : q.answers) {
    const auto needle = naive_normalize(a);
    if (needle.empty()) continue;
    for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
      if (hay.compare(i, needle.size(), needle) == 0) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("chunk_document splits into 100-word blocks", "[corpus]") {
  SECTION("250 words give 100, 100, 50") {
    const auto ps = chunk_document(doc_with(words(250)), 100);
    CHECK(word_counts(ps) == std::vector<std::size_t>{100, 100, 50});
  }
  SECTION("exactly 100 words give one identical passage") {
    const auto body = words(100);
    const auto ps = chunk_document(doc_with(body), 100);
    REQUIRE(ps.size() == 1);
    CHECK(ps[0].text == body);
  }
  SECTION("1000 words match a reference splitter") {
    std::string body;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
      body += "tok" + std::to_string(rng() % 97);
      body += (rng() % 5 == 0) ? "\n\t " : " ";
    }
    const auto ps = chunk_document(doc_with(body), 100);
    CHECK(word_counts(ps) == std::vector<std::size_t>(10, 100));
    const auto ref = reference_blocks(body, 100);
    REQUIRE(ref.size() == ps.size());
    std::vector<std::string> texts;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      CHECK(ps[i].text == text::join(ref[i]));
      texts.push_back(ps[i].text);
    }
    CHECK(text::join(texts) == text::collapse_whitespace(body));
  }
}

TEST_CASE("chunk_document metadata", "[corpus]") {
  const auto ps = chunk_document(doc_with(words(35), "Headline"), 10);
  REQUIRE(ps.size() == 4);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    CHECK(ps[i].ordinal == i);
    CHECK(ps[i].doc_id == "d1");
    CHECK(ps[i].id == "d1#" + std::to_string(i));
    CHECK(ps[i].title == "Headline");
    CHECK(ps[i].pub_date == CalendarDate::of_day(1987, 3, 4));
  }
}

TEST_CASE("chunk_document rejects empty bodies", "[corpus]") {
  CHECK_THROWS_AS(chunk_document(doc_with(""), 100), EmptyDocument);
  CHECK_THROWS_AS(chunk_document(doc_with(" \n\t  "), 100), EmptyDocument);
  CHECK_THROWS_AS(chunk_document(doc_with("a b"), 0), InvalidArgument);
}

TEST_CASE("chunking splits on Unicode whitespace", "[corpus]") {
  const auto ps = chunk_document(doc_with("alpha beta　gamma delta café"), 2);
  REQUIRE(ps.size() == 3);
  CHECK(ps[0].text == "alpha beta");
  CHECK(ps[1].text == "gamma delta");
  CHECK(ps[2].text == "café");
}

TEST_CASE("chunk partition property on random documents", "[corpus][property]") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 500;
    const std::size_t size = 1 + rng() % 120;
    std::string body;
    for (std::size_t i = 0; i < n; ++i) {
      body += "w" + std::to_string(i);
      body += (rng() % 3 == 0) ? "  " : " ";
    }
    const auto ps = chunk_document(doc_with(body), size);
    std::size_t total = 0;
    std::vector<std::string> all;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const auto w = text::split_words(ps[i].text);
      if (i + 1 < ps.size()) REQUIRE(w.size() == size);
      REQUIRE(w.size() <= size);
      total += w.size();
      all.insert(all.end(), w.begin(), w.end());
    }
    REQUIRE(total == n);
    std::vector<std::string> sorted = all;
    std::sort(sorted.begin(), sorted.end());
    REQUIRE(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    REQUIRE(text::join(all) == text::collapse_whitespace(body));
  }
}

TEST_CASE("render_passage_input", "[corpus]") {
  CHECK(render_passage_input(make_passage("p", "b c", 1990, "A")) == "A [SEP] b c");
  CHECK(render_passage_input(make_passage("p", "b", 1990, "")) == " [SEP] b");

  std::mt19937_64 rng(5);
  const std::string alphabet = "abcXYZ []SEP019 ";
  for (int trial = 0; trial < 500; ++trial) {
    std::string title, body;
    for (std::size_t i = rng() % 20; i > 0; --i) title += alphabet[rng() % alphabet.size()];
    for (std::size_t i = rng() % 20; i > 0; --i) body += alphabet[rng() % alphabet.size()];
    if (title.find(" [SEP] ") != std::string::npos || (title + " ").find(" [SEP] ") != std::string::npos)
      continue;
    const auto rendered = render_passage_input(make_passage("p", body, 1990, title));
    const auto at = rendered.find(" [SEP] ");
    REQUIRE(at != std::string::npos);
    REQUIRE(rendered.substr(0, at) == title);
    REQUIRE(rendered.substr(at + 7) == body);
  }
}

TEST_CASE("select_positives", "[corpus]") {
  const auto p1 = make_passage("p1", "in 1971 he became editor", 1971);
  const auto p2 = make_passage("p2", "in 1972 nothing happened", 1972);

  SECTION("direct containment") {
    const auto out = select_positives(make_query("q", "when?", {"1971"}), {p1, p2});
    REQUIRE(out.size() == 1);
    CHECK(out[0].id == "p1");
  }
  SECTION("all passages of a document that contain the answer") {
    const Document doc{"d", "t", words(10, "x") + " Eiffel " + words(10, "y") + " eiffel", CalendarDate::of_year(1900)};
    const auto ps = chunk_document(doc, 11);
    REQUIRE(ps.size() == 2);
    const auto out = select_positives(make_query("q", "?", {"Eiffel"}), ps);
    CHECK(out.size() == 2);
  }
  SECTION("case-insensitive with whitespace collapse") {
    const auto p = make_passage("p", "the capital  is\tparis, france", 2000);
    CHECK(select_positives(make_query("q", "?", {"Paris"}), {p}).size() == 1);
    CHECK(select_positives(make_query("q", "?", {"IS  PARIS"}), {p}).size() == 1);
    CHECK(naive_contains(make_query("q", "?", {"Paris"}), p));
  }
  SECTION("no match is not an error") {
    CHECK(select_positives(make_query("q", "?", {"zzz"}), {p1, p2}).empty());
  }
  SECTION("answers required") {
    CHECK_THROWS_AS(select_positives(make_query("q", "?", {}), {p1}), InvalidArgument);
  }
}

TEST_CASE("select_positives agrees with an exhaustive naive rescan", "[corpus][property]") {
  std::mt19937_64 rng(19);
  const std::vector<std::string> vocab = {"Apple", "apple", "pie", "New", "york", "1905", "the", "THE"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Passage> pool;
    for (int i = 0; i < 12; ++i) {
      std::string t;
      for (std::size_t w = 1 + rng() % 8; w > 0; --w) t += vocab[rng() % vocab.size()] + ((rng() % 4) ? " " : "\n ");
      pool.push_back(make_passage("p" + std::to_string(i), t, 1900));
    }
    std::string answer = vocab[rng() % vocab.size()];
    if (rng() % 2) answer += " " + vocab[rng() % vocab.size()];
    const auto q = make_query("q", "?", {answer});
    const auto out = select_positives(q, pool);
    std::size_t j = 0;
    for (const auto& p : pool) {
      const bool expected = naive_contains(q, p);
      const bool returned = j < out.size() && out[j].id == p.id;
      REQUIRE(expected == returned);
      if (returned) ++j;
    }
  }
}

TEST_CASE("CalendarDate parsing and validation", "[corpus][date]") {
  CHECK(parse_iso_date("1905") == CalendarDate::of_year(1905));
  CHECK(parse_iso_date("1905-07") == CalendarDate::of_month(1905, 7));
  CHECK(parse_iso_date("1905-07-21") == CalendarDate::of_day(1905, 7, 21));
  CHECK(parse_iso_date("1905-07-21T10:00:00Z") == CalendarDate::of_day(1905, 7, 21));
  CHECK(parse_iso_date("1905-07").granularity() == DateGranularity::Month);
  CHECK(parse_iso_date("2000-02-29").day == 29);
  CHECK_THROWS_AS(parse_iso_date("1900-02-29"), InvalidDate);
  CHECK_THROWS_AS(parse_iso_date("1905-13"), InvalidDate);
  CHECK_THROWS_AS(parse_iso_date("0000"), InvalidDate);
  CHECK_THROWS_AS(parse_iso_date("19x5"), InvalidDate);
  CHECK_THROWS_AS(parse_iso_date("1905/07"), InvalidDate);
  CHECK_FALSE((CalendarDate{1905, std::nullopt, 3}.valid()));
  CHECK(CalendarDate::of_day(7, 1, 2).to_iso() == "0007-01-02");
}
