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

// Ranking metrics with binary relevance: Top-k accuracy, nDCG@k, MAP@k.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "chronoret/corpus.hpp"
#include "chronoret/error.hpp"
#include "chronoret/text.hpp"

namespace chronoret {

inline constexpr std::size_t kReportCutoffs[] = {1, 5, 10, 20, 50, 100};

struct RelevanceJudgment {
  std::string query_id;
  std::unordered_set<std::string> relevant;

  bool is_relevant(const std::string& passage_id) const { return relevant.contains(passage_id); }
};

using Judgments = std::unordered_map<std::string, RelevanceJudgment>;

// A passage is relevant when it contains one of the query's answers.
// Queries with no relevant passage are left out.
inline Judgments make_judgments(const std::vector<Query>& queries, const std::vector<Passage>& passages) {
  std::vector<std::string> normalized;
  normalized.reserve(passages.size());
  for (const auto& p : passages) normalized.push_back(text::normalize(p.text));
  Judgments out;
  for (const auto& q : queries) {
    const AnswerMatcher matcher(q.answers);
    RelevanceJudgment j{q.id, {}};
    for (std::size_t i = 0; i < passages.size(); ++i) {
      if (matcher.matches_normalized(normalized[i])) j.relevant.insert(passages[i].id);
    }
    if (!j.relevant.empty()) out.emplace(q.id, std::move(j));
  }
  return out;
}

struct RankedList {
  std::string query_id;
  std::vector<std::string> ranked_ids;
};

inline const RelevanceJudgment& judgment_for(const Judgments& judgments, const std::string& query_id) {
  const auto it = judgments.find(query_id);
  if (it == judgments.end()) throw MissingJudgment("no relevance judgment for query '" + query_id + "'");
  return it->second;
}

inline bool hit_at_k(const std::vector<std::string>& ranked, const RelevanceJudgment& j, std::size_t k) {
  const std::size_t n = std::min(k, ranked.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (j.is_relevant(ranked[i])) return true;
  }
  return false;
}

// Percentage of queries with at least one relevant passage in ranks 1..k.
inline double topk_accuracy(const std::vector<RankedList>& results, const Judgments& judgments,
                            std::size_t k) {
  if (results.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& r : results) hits += hit_at_k(r.ranked_ids, judgment_for(judgments, r.query_id), k);
  return 100.0 * static_cast<double>(hits) / static_cast<double>(results.size());
}

inline double ndcg_at_k(const std::vector<std::string>& ranked, const RelevanceJudgment& j, std::size_t k) {
  if (j.relevant.empty()) throw MissingJudgment("query '" + j.query_id + "' has no relevant passages");
  double dcg = 0.0;
  const std::size_t n = std::min(k, ranked.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (j.is_relevant(ranked[i])) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
  double idcg = 0.0;
  const std::size_t ideal = std::min(k, j.relevant.size());
  for (std::size_t i = 0; i < ideal; ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  return dcg / idcg;
}

// Average precision cut at k, normalized by min(k, #relevant).
inline double average_precision_at_k(const std::vector<std::string>& ranked, const RelevanceJudgment& j,
                                     std::size_t k) {
  if (j.relevant.empty()) throw MissingJudgment("query '" + j.query_id + "' has no relevant passages");
  double sum = 0.0;
  std::size_t hits = 0;
  const std::size_t n = std::min(k, ranked.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (j.is_relevant(ranked[i])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(std::min(k, j.relevant.size()));
}

inline double map_at_k(const std::vector<RankedList>& results, const Judgments& judgments, std::size_t k) {
  if (results.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : results) sum += average_precision_at_k(r.ranked_ids, judgment_for(judgments, r.query_id), k);
  return sum / static_cast<double>(results.size());
}

inline double mean_ndcg_at_k(const std::vector<RankedList>& results, const Judgments& judgments,
                             std::size_t k) {
  if (results.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : results) sum += ndcg_at_k(r.ranked_ids, judgment_for(judgments, r.query_id), k);
  return sum / static_cast<double>(results.size());
}

struct PerQueryScores {
  std::string query_id;
  std::map<std::size_t, bool> hit;
  std::map<std::size_t, double> ndcg;
  std::map<std::size_t, double> ap;
};

// All values are percentages.
struct EvalReport {
  std::size_t query_count = 0;
  std::map<std::size_t, double> accuracy;
  std::map<std::size_t, double> ndcg;
  std::map<std::size_t, double> map;
  std::vector<PerQueryScores> per_query;
};

inline EvalReport evaluate(const std::vector<RankedList>& results, const Judgments& judgments,
                           bool keep_per_query = false) {
  EvalReport report;
  report.query_count = results.size();
  for (std::size_t k : kReportCutoffs) {
    report.accuracy[k] = topk_accuracy(results, judgments, k);
    report.ndcg[k] = 100.0 * mean_ndcg_at_k(results, judgments, k);
    report.map[k] = 100.0 * map_at_k(results, judgments, k);
  }
  if (keep_per_query) {
    for (const auto& r : results) {
      const auto& j = judgment_for(judgments, r.query_id);
      PerQueryScores s{r.query_id, {}, {}, {}};
      for (std::size_t k : kReportCutoffs) {
        s.hit[k] = hit_at_k(r.ranked_ids, j, k);
        s.ndcg[k] = ndcg_at_k(r.ranked_ids, j, k);
        s.ap[k] = average_precision_at_k(r.ranked_ids, j, k);
      }
      report.per_query.push_back(std::move(s));
    }
  }
  return report;
}

// Fixed-width text table, one row per metric, one column per cutoff.
inline std::string format_report_table(const EvalReport& report) {
  std::string out;
  char buf[64];
  out += "metric  ";
  for (std::size_t k : kReportCutoffs) {
    std::snprintf(buf, sizeof buf, "%9s", ("@" + std::to_string(k)).c_str());
    out += buf;
  }
  out += "\n";
  const auto row = [&](const char* name, const std::map<std::size_t, double>& values) {
    std::snprintf(buf, sizeof buf, "%-8s", name);
    out += buf;
    for (std::size_t k : kReportCutoffs) {
      std::snprintf(buf, sizeof buf, "%9.2f", values.at(k));
      out += buf;
    }
    out += "\n";
  };
  row("Top-k", report.accuracy);
  row("nDCG", report.ndcg);
  row("MAP", report.map);
  std::snprintf(buf, sizeof buf, "queries: %zu\n", report.query_count);
  out += buf;
  return out;
}

}  // namespace chronoret
