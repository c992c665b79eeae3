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

// Negative-passage selection (random, same-year, different-year) and
// assembly of contrastive training examples.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "chronoret/corpus.hpp"
#include "chronoret/error.hpp"
#include "chronoret/rng.hpp"
#include "chronoret/text.hpp"

namespace chronoret {

enum class NegativeMode { Random, SameYear, DifferentYear };

inline std::string_view to_string(NegativeMode m) {
  switch (m) {
    case NegativeMode::Random: return "random";
    case NegativeMode::SameYear: return "same-year";
    case NegativeMode::DifferentYear: return "diff-year";
  }
  return "?";
}

inline NegativeMode parse_negative_mode(std::string_view s) {
  if (s == "random") return NegativeMode::Random;
  if (s == "same-year") return NegativeMode::SameYear;
  if (s == "diff-year" || s == "different-year") return NegativeMode::DifferentYear;
  throw InvalidArgument("unknown negative strategy '" + std::string(s) +
                        "' (expected random|same-year|diff-year)");
}

struct NegativeStrategy {
  NegativeMode mode = NegativeMode::Random;
  std::size_t n = 4;
  std::uint64_t seed = 0;
};

struct TrainingExample {
  Query query;
  Passage positive;
  std::vector<Passage> negatives;
};

struct NegativeSample {
  std::vector<Passage> negatives;
  bool undersized = false;  // fewer eligible passages than requested
};

// The year predicate compares calendar years only, whatever the granularity.
inline bool year_predicate(NegativeMode mode, const Passage& positive, const Passage& candidate) {
  switch (mode) {
    case NegativeMode::Random: return true;
    case NegativeMode::SameYear: return candidate.pub_date.year == positive.pub_date.year;
    case NegativeMode::DifferentYear: return candidate.pub_date.year != positive.pub_date.year;
  }
  return false;
}

// Per-query stream so results do not depend on processing order.
inline std::uint64_t query_seed(std::uint64_t seed, std::string_view query_id) {
  return text::hash64(query_id, seed);
}

namespace detail {

// Draws min(n, eligible.size()) items uniformly without replacement
// (partial Fisher-Yates), preserving draw order.
inline std::vector<std::size_t> draw_without_replacement(std::vector<std::size_t> eligible,
                                                         std::size_t n, Rng& rng) {
  const std::size_t take = std::min(n, eligible.size());
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(eligible.size() - i));
    std::swap(eligible[i], eligible[j]);
  }
  eligible.resize(take);
  return eligible;
}

template <typename NormalizedText>
NegativeSample sample_negatives_impl(const Query& query, const Passage& positive,
                                     const std::vector<Passage>& pool,
                                     const NegativeStrategy& strategy, NormalizedText&& normalized) {
  if (strategy.n == 0) throw InvalidArgument("negative count must be >= 1");
  if (pool.empty()) throw InvalidArgument("negative pool is empty");
  const AnswerMatcher matcher(query.answers);
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& c = pool[i];
    if (c.id == positive.id || !year_predicate(strategy.mode, positive, c)) continue;
    if (matcher.matches_normalized(normalized(i))) continue;
    eligible.push_back(i);
  }
  if (eligible.empty())
    throw NoEligibleNegatives("no eligible " + std::string(to_string(strategy.mode)) +
                              " negatives for query '" + query.id + "'");
  Rng rng(query_seed(strategy.seed, query.id));
  NegativeSample out;
  out.undersized = eligible.size() < strategy.n;
  for (std::size_t i : draw_without_replacement(std::move(eligible), strategy.n, rng))
    out.negatives.push_back(pool[i]);
  return out;
}

}  // namespace detail

// Uniform sample without replacement from the eligible subset: the
// strategy's year predicate holds, no answer is contained, and the id differs
// from the positive's.
inline NegativeSample sample_negatives(const Query& query, const Passage& positive,
                                       const std::vector<Passage>& pool,
                                       const NegativeStrategy& strategy) {
  return detail::sample_negatives_impl(query, positive, pool, strategy,
                                       [&](std::size_t i) { return text::normalize(pool[i].text); });
}

struct TrainingSetStats {
  std::size_t queries = 0;
  std::size_t emitted = 0;
  std::size_t dropped_no_positive = 0;
  std::size_t dropped_no_negatives = 0;
  std::size_t undersized = 0;
};

struct TrainingSet {
  std::vector<TrainingExample> examples;
  TrainingSetStats stats;
};

// One example per query that has a positive. The positive is the matching
// passage with the smallest id.
inline TrainingSet build_training_set(const std::vector<Query>& queries,
                                      const std::vector<Passage>& passages,
                                      const NegativeStrategy& strategy) {
  std::vector<std::string> normalized;
  normalized.reserve(passages.size());
  for (const auto& p : passages) normalized.push_back(text::normalize(p.text));

  TrainingSet out;
  for (const auto& q : queries) {
    ++out.stats.queries;
    const AnswerMatcher matcher(q.answers);
    const Passage* positive = nullptr;
    if (!matcher.empty()) {
      for (std::size_t i = 0; i < passages.size(); ++i) {
        if (matcher.matches_normalized(normalized[i]) && (!positive || passages[i].id < positive->id))
          positive = &passages[i];
      }
    }
    if (!positive) {
      ++out.stats.dropped_no_positive;
      continue;
    }
    try {
      auto sample = detail::sample_negatives_impl(
          q, *positive, passages, strategy, [&](std::size_t i) -> const std::string& { return normalized[i]; });
      if (sample.undersized) ++out.stats.undersized;
      out.examples.push_back(TrainingExample{q, *positive, std::move(sample.negatives)});
      ++out.stats.emitted;
    } catch (const NoEligibleNegatives&) {
      ++out.stats.dropped_no_negatives;
    }
  }
  return out;
}

}  // namespace chronoret
