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

// Query routing: explicit dates go to fused retrieval, implicit temporal
// queries get a predicted year first, everything else is searched on the
// semantic vectors alone.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "chronoret/corpus.hpp"
#include "chronoret/date_mentions.hpp"
#include "chronoret/error.hpp"
#include "chronoret/fusion.hpp"
#include "chronoret/index.hpp"
#include "chronoret/temporal.hpp"
#include "chronoret/text.hpp"

namespace chronoret {

enum class QueryKind { Explicit, Implicit, NonTemporal };

inline std::string_view to_string(QueryKind k) {
  switch (k) {
    case QueryKind::Explicit: return "explicit";
    case QueryKind::Implicit: return "implicit";
    case QueryKind::NonTemporal: return "non-temporal";
  }
  return "?";
}

struct QueryClass {
  QueryKind kind = QueryKind::NonTemporal;
  std::optional<DateMention> mention;  // set iff kind == Explicit
  bool multiple_dates = false;         // more than one mention; the first was used
};

inline QueryClass classify(const Query& q, bool corpus_is_temporal) {
  const auto mentions = detect_dates(q.text);
  if (mentions.empty())
    return {corpus_is_temporal ? QueryKind::Implicit : QueryKind::NonTemporal, std::nullopt, false};
  return {QueryKind::Explicit, mentions.front(), mentions.size() > 1};
}

// Multinomial naive Bayes over years with add-one smoothing.
class DatePredictor {
 public:
  struct YearModel {
    double log_prior = 0.0;
    std::unordered_map<std::string, std::size_t> counts;
    std::size_t total = 0;
  };

  DatePredictor(std::map<int, YearModel> years, std::unordered_set<std::string> vocab, int min_year,
                int max_year)
      : years_(std::move(years)), vocab_(std::move(vocab)), min_year_(min_year), max_year_(max_year) {}

  int min_year() const { return min_year_; }
  int max_year() const { return max_year_; }
  const std::map<int, YearModel>& years() const { return years_; }

  // Log posterior (up to a constant) for every trained year. Tokens never
  // seen in training are ignored.
  std::map<int, double> log_posterior(std::string_view input) const {
    const auto tokens = text::tokenize(input);
    std::map<int, double> out;
    for (const auto& [year, model] : years_) {
      double score = model.log_prior;
      const double denom = std::log(static_cast<double>(model.total + vocab_.size()));
      for (const auto& tok : tokens) {
        if (!vocab_.contains(tok)) continue;
        const auto it = model.counts.find(tok);
        const double c = it == model.counts.end() ? 0.0 : static_cast<double>(it->second);
        score += std::log(c + 1.0) - denom;
      }
      out.emplace(year, score);
    }
    return out;
  }

  // Argmax year, smaller year on ties, clamped to [min_year, max_year].
  int predict_year(std::string_view input) const {
    int best_year = years_.begin()->first;
    double best = -INFINITY;
    for (const auto& [year, score] : log_posterior(input)) {
      if (score > best) {
        best = score;
        best_year = year;
      }
    }
    return std::clamp(best_year, min_year_, max_year_);
  }

 private:
  std::map<int, YearModel> years_;
  std::unordered_set<std::string> vocab_;
  int min_year_;
  int max_year_;
};

struct LabeledText {
  std::string text;
  int year = 0;
};

// year_range defaults to the span of training years.
inline DatePredictor train_predictor(const std::vector<LabeledText>& labeled,
                                     std::optional<std::pair<int, int>> year_range = std::nullopt) {
  if (labeled.empty()) throw NoData("no labeled texts for the date predictor");
  std::map<int, DatePredictor::YearModel> years;
  std::unordered_set<std::string> vocab;
  std::map<int, std::size_t> docs;
  for (const auto& item : labeled) {
    auto& model = years[item.year];
    ++docs[item.year];
    for (auto& tok : text::tokenize(item.text)) {
      ++model.total;
      vocab.insert(tok);
      ++model.counts[std::move(tok)];
    }
  }
  for (auto& [year, model] : years)
    model.log_prior = std::log(static_cast<double>(docs[year]) / static_cast<double>(labeled.size()));
  const auto [lo, hi] = year_range.value_or(std::pair{years.begin()->first, years.rbegin()->first});
  if (lo > hi) throw InvalidRange("predictor year range is empty");
  return DatePredictor(std::move(years), std::move(vocab), lo, hi);
}

inline int predict_year(const DatePredictor& pred, std::string_view input) {
  return pred.predict_year(input);
}

// Error metrics in years; accuracy is a percentage.
struct PredictorReport {
  std::size_t count = 0;
  double mae = 0.0;
  double mse = 0.0;
  double accuracy = 0.0;
};

inline PredictorReport evaluate_predictor(const DatePredictor& pred, const std::vector<LabeledText>& labeled) {
  PredictorReport r;
  r.count = labeled.size();
  if (labeled.empty()) return r;
  std::size_t correct = 0;
  for (const auto& item : labeled) {
    const double err = pred.predict_year(item.text) - item.year;
    r.mae += std::abs(err);
    r.mse += err * err;
    correct += err == 0.0;
  }
  const auto n = static_cast<double>(labeled.size());
  r.mae /= n;
  r.mse /= n;
  r.accuracy = 100.0 * static_cast<double>(correct) / n;
  return r;
}

struct RouterConfig {
  bool corpus_is_temporal = true;
  std::size_t k = 100;
  unsigned threads = 1;
};

struct Retrievers {
  const DenseIndex& fused;
  const DenseIndex& semantic;
  const TemporalTable& table;
  const DatePredictor* predictor = nullptr;  // required for implicit queries
};

struct RoutedSearch {
  QueryClass route;
  std::optional<CalendarDate> date;  // timestamp fused into the query, if any
  SearchResult result;
};

// Dates outside the temporal table are clamped to its nearest row.
inline RoutedSearch route_and_search(const Query& q, std::span<const float> query_semantic,
                                     const RouterConfig& config, const Retrievers& retrievers) {
  RoutedSearch out;
  out.route = classify(q, config.corpus_is_temporal);
  switch (out.route.kind) {
    case QueryKind::Explicit:
      out.date = out.route.mention->date;
      break;
    case QueryKind::Implicit:
      if (!retrievers.predictor) throw InvalidArgument("implicit query routed without a date predictor");
      out.date = CalendarDate::of_year(retrievers.predictor->predict_year(q.text));
      break;
    case QueryKind::NonTemporal:
      out.result = search_vector(retrievers.semantic, query_semantic, config.k, config.threads);
      return out;
  }
  if (!retrievers.fused.kind) throw InvalidArgument("fused retriever has no fusion kind");
  const auto key = retrievers.table.clamp(key_of(*out.date, retrievers.table.granularity()));
  const auto fq = fuse(query_semantic, retrievers.table.row(key), *retrievers.fused.kind);
  out.result = search(retrievers.fused, fq, config.k, config.threads);
  return out;
}

}  // namespace chronoret
