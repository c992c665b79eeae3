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
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "chronoret/io.hpp"
#include "chronoret/sampling.hpp"
#include "test_util.hpp"

using namespace chronoret;
using chronoret::testing::make_passage;
using chronoret::testing::make_query;

namespace {

// Years 2000..2004, 4 passages each; "answer" appears in p2000_0 and p2001_0.
std::vector<Passage> pool() {
  std::vector<Passage> ps;
  for (int y = 2000; y < 2005; ++y)
    for (int i = 0; i < 4; ++i)
      ps.push_back(make_passage("p" + std::to_string(y) + "_" + std::to_string(i),
                                i == 0 && y < 2002 ? "has the Answer inside" : "filler text " + std::to_string(i), y));
  return ps;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

TEST_CASE("sample_negatives examples", "[sampling]") {
  const auto q = make_query("q", "?", {"answer"});
  const auto pos = make_passage("pos", "the answer", 1990);

  SECTION("forced choice") {
    const std::vector<Passage> one = {make_passage("n", "nothing", 1990)};
    const auto s = sample_negatives(q, pos, one, {NegativeMode::SameYear, 1, 0});
    REQUIRE(s.negatives.size() == 1);
    CHECK(s.negatives[0].id == "n");
    CHECK_FALSE(s.undersized);
  }
  SECTION("different-year with every candidate in the positive's year") {
    const std::vector<Passage> same = {make_passage("a", "x", 1990), make_passage("b", "y", 1990)};
    CHECK_THROWS_AS(sample_negatives(q, pos, same, {NegativeMode::DifferentYear, 1, 0}), NoEligibleNegatives);
  }
  SECTION("positive and answer-bearing passages are never eligible") {
    const std::vector<Passage> ps = {pos, make_passage("b", "ANSWER here", 1991)};
    CHECK_THROWS_AS(sample_negatives(q, pos, ps, {NegativeMode::Random, 1, 0}), NoEligibleNegatives);
  }
  SECTION("undersized eligible set returns what exists") {
    const std::vector<Passage> ps = {make_passage("a", "x", 1990), make_passage("b", "y", 1991)};
    const auto s = sample_negatives(q, pos, ps, {NegativeMode::Random, 4, 0});
    CHECK(s.negatives.size() == 2);
    CHECK(s.undersized);
  }
  SECTION("empty pool") {
    CHECK_THROWS_AS(sample_negatives(q, pos, {}, {NegativeMode::Random, 1, 0}), InvalidArgument);
  }
}

TEST_CASE("sample_negatives contracts over many seeds", "[sampling][property]") {
  const auto ps = pool();
  const auto q = make_query("q", "?", {"answer"});
  const auto& positive = ps[0];
  for (auto mode : {NegativeMode::Random, NegativeMode::SameYear, NegativeMode::DifferentYear}) {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
      const auto s = sample_negatives(q, positive, ps, {mode, 3, seed});
      std::set<std::string> ids;
      for (const auto& n : s.negatives) {
        REQUIRE(lower(n.text).find("answer") == std::string::npos);
        REQUIRE(n.id != positive.id);
        if (mode == NegativeMode::SameYear) REQUIRE(n.pub_date.year == 2000);
        if (mode == NegativeMode::DifferentYear) REQUIRE(n.pub_date.year != 2000);
        ids.insert(n.id);
      }
      REQUIRE(ids.size() == s.negatives.size());
      REQUIRE(s.negatives.size() == 3);
    }
  }
}

TEST_CASE("sample_negatives is uniform", "[sampling][property]") {
  std::vector<Passage> ps;
  for (int i = 0; i < 5; ++i) ps.push_back(make_passage("e" + std::to_string(i), "plain", 1990));
  const auto q = make_query("q", "?", {"answer"});
  const auto pos = make_passage("pos", "answer", 1990);
  std::map<std::string, int> freq;
  constexpr int kDraws = 10000;
  for (int seed = 0; seed < kDraws; ++seed)
    ++freq[sample_negatives(q, pos, ps, {NegativeMode::Random, 1, static_cast<std::uint64_t>(seed)}).negatives[0].id];
  REQUIRE(freq.size() == 5);
  for (const auto& [id, count] : freq) {
    const double f = static_cast<double>(count) / kDraws;
    INFO(id << " frequency " << f);
    CHECK(f > 0.18);
    CHECK(f < 0.22);
  }
}

TEST_CASE("build_training_set", "[sampling]") {
  SECTION("one query with four eligible negatives") {
    std::vector<Passage> ps = {make_passage("pos", "the answer is here", 2000)};
    for (int i = 0; i < 4; ++i) ps.push_back(make_passage("n" + std::to_string(i), "other", 2001));
    const auto set = build_training_set({make_query("q", "?", {"answer"})}, ps, {NegativeMode::Random, 4, 1});
    REQUIRE(set.examples.size() == 1);
    CHECK(set.examples[0].positive.id == "pos");
    std::set<std::string> ids;
    for (const auto& n : set.examples[0].negatives) ids.insert(n.id);
    CHECK(ids == std::set<std::string>{"n0", "n1", "n2", "n3"});
  }
  SECTION("answer everywhere drops the query") {
    const std::vector<Passage> ps = {make_passage("a", "answer", 2000), make_passage("b", "answer too", 2001)};
    const auto set = build_training_set({make_query("q", "?", {"answer"})}, ps, {NegativeMode::Random, 1, 1});
    CHECK(set.examples.empty());
    CHECK(set.stats.dropped_no_negatives == 1);
  }
  SECTION("no positive drops the query") {
    const auto set = build_training_set({make_query("q", "?", {"zzz"}), make_query("r", "?", {})}, pool(),
                                        {NegativeMode::Random, 1, 1});
    CHECK(set.examples.empty());
    CHECK(set.stats.dropped_no_positive == 2);
  }
  SECTION("first positive by id") {
    const std::vector<Passage> ps = {make_passage("z", "answer", 2000), make_passage("m", "answer", 2000),
                                     make_passage("x", "none", 2001)};
    const auto set = build_training_set({make_query("q", "?", {"answer"})}, ps, {NegativeMode::Random, 1, 1});
    REQUIRE(set.examples.size() == 1);
    CHECK(set.examples[0].positive.id == "m");
  }
  SECTION("seeded determinism and order independence") {
    std::vector<Query> qs;
    for (int i = 0; i < 10; ++i) qs.push_back(make_query("q" + std::to_string(i), "?", {"answer"}));
    const auto a = build_training_set(qs, pool(), {NegativeMode::DifferentYear, 3, 77});
    const auto b = build_training_set(qs, pool(), {NegativeMode::DifferentYear, 3, 77});
    std::vector<Query> reversed(qs.rbegin(), qs.rend());
    const auto c = build_training_set(reversed, pool(), {NegativeMode::DifferentYear, 3, 77});
    REQUIRE(a.examples.size() == 10);
    for (std::size_t i = 0; i < a.examples.size(); ++i) {
      CHECK(a.examples[i].negatives == b.examples[i].negatives);
      CHECK(a.examples[i].negatives == c.examples[a.examples.size() - 1 - i].negatives);
    }
  }
}

TEST_CASE("training-set JSONL passes an independent validator", "[sampling][io]") {
  const auto ps = pool();
  std::vector<Query> qs;
  for (int i = 0; i < 20; ++i) qs.push_back(make_query("q" + std::to_string(i), "?", {"answer"}));
  qs.push_back(make_query("lost", "?", {"not present"}));
  const auto dir = std::filesystem::temp_directory_path();
  for (auto mode : {NegativeMode::Random, NegativeMode::SameYear, NegativeMode::DifferentYear}) {
    const auto set = build_training_set(qs, ps, {mode, 3, 5});
    io::write_training_set(dir / "chronoret_ts.jsonl", dir / "chronoret_ts.stats.json", set);

    std::map<std::string, Passage> by_id;
    for (const auto& p : ps) by_id.emplace(p.id, p);
    std::ifstream in(dir / "chronoret_ts.jsonl");
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
      ++lines;
      const auto j = nlohmann::json::parse(line);
      const auto& positive = by_id.at(j.at("positive_id").get<std::string>());
      REQUIRE(lower(positive.text).find("answer") != std::string::npos);
      for (const auto& nid : j.at("negative_ids")) {
        const auto& neg = by_id.at(nid.get<std::string>());
        REQUIRE(lower(neg.text).find("answer") == std::string::npos);
        if (mode == NegativeMode::SameYear) REQUIRE(neg.pub_date.year == positive.pub_date.year);
        if (mode == NegativeMode::DifferentYear) REQUIRE(neg.pub_date.year != positive.pub_date.year);
      }
    }
    CHECK(lines == 20);
    std::ifstream stats_in(dir / "chronoret_ts.stats.json");
    const auto stats = nlohmann::json::parse(stats_in);
    CHECK(stats.at("dropped_no_positive") == 1);
    CHECK(stats.at("emitted") == 20);
  }
}
