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

// JSON Lines readers and writers for documents, queries, passages,
// training sets, ranked results, labeled date texts, and reports.

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chronoret/corpus.hpp"
#include "chronoret/error.hpp"
#include "chronoret/eval.hpp"
#include "chronoret/routing.hpp"
#include "chronoret/sampling.hpp"
#include "chronoret/textdate.hpp"

namespace chronoret::io {

using nlohmann::json;

// Calls fn on every non-blank line parsed as JSON. Errors carry the line number.
inline void for_each_jsonl(const std::filesystem::path& path, const std::function<void(const json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path) : out_(path, std::ios::trunc) {
    if (!out_) throw Error("cannot open '" + path.string() + "' for writing");
  }
  void write(const json& j) { out_ << j.dump() << '\n'; }

 private:
  std::ofstream out_;
};

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
}

inline Document document_from_json(const json& j) {
  return Document{j.at("id").get<std::string>(), j.value("title", std::string{}),
                  j.at("body").get<std::string>(), parse_iso_date(j.at("pub_date").get<std::string>())};
}

inline std::vector<Document> read_documents(const std::filesystem::path& path) {
  std::vector<Document> docs;
  for_each_jsonl(path, [&](const json& j) { docs.push_back(document_from_json(j)); });
  return docs;
}

inline Query query_from_json(const json& j) {
  Query q;
  q.id = j.at("id").get<std::string>();
  q.text = j.at("text").get<std::string>();
  if (j.contains("date") && !j["date"].is_null()) q.explicit_date = parse_iso_date(j["date"].get<std::string>());
  if (j.contains("answers")) {
    for (const auto& a : j["answers"]) {
      auto s = a.get<std::string>();
      if (s.empty()) throw FormatError("query '" + q.id + "' has an empty answer string");
      q.answers.push_back(std::move(s));
    }
  }
  return q;
}

inline std::vector<Query> read_queries(const std::filesystem::path& path) {
  std::vector<Query> queries;
  for_each_jsonl(path, [&](const json& j) { queries.push_back(query_from_json(j)); });
  return queries;
}

inline json passage_to_json(const Passage& p, InjectionMode mode = InjectionMode::None) {
  return json{{"id", p.id},       {"doc_id", p.doc_id},
              {"ordinal", p.ordinal}, {"title", p.title},
              {"text", p.text},   {"pub_date", p.pub_date.to_iso()},
              {"text_rendered", inject_passage(p, mode)}};
}

inline Passage passage_from_json(const json& j) {
  return Passage{j.at("id").get<std::string>(), j.at("doc_id").get<std::string>(),
                 j.at("ordinal").get<std::size_t>(), j.value("title", std::string{}),
                 j.at("text").get<std::string>(), parse_iso_date(j.at("pub_date").get<std::string>())};
}

inline std::vector<Passage> read_passages(const std::filesystem::path& path) {
  std::vector<Passage> out;
  for_each_jsonl(path, [&](const json& j) { out.push_back(passage_from_json(j)); });
  return out;
}

inline void write_passages(const std::filesystem::path& path, const std::vector<Passage>& passages,
                           InjectionMode mode = InjectionMode::None) {
  JsonlWriter w(path);
  for (const auto& p : passages) w.write(passage_to_json(p, mode));
}

inline json example_to_json(const TrainingExample& ex) {
  json negatives = json::array();
  for (const auto& n : ex.negatives) negatives.push_back(n.id);
  return json{{"query_id", ex.query.id}, {"positive_id", ex.positive.id}, {"negative_ids", negatives}};
}

inline json stats_to_json(const TrainingSetStats& s) {
  return json{{"queries", s.queries},
              {"emitted", s.emitted},
              {"dropped_no_positive", s.dropped_no_positive},
              {"dropped_no_negatives", s.dropped_no_negatives},
              {"undersized", s.undersized}};
}

inline void write_training_set(const std::filesystem::path& path, const std::filesystem::path& stats_path,
                               const TrainingSet& set) {
  JsonlWriter w(path);
  for (const auto& ex : set.examples) w.write(example_to_json(ex));
  write_json(stats_path, stats_to_json(set.stats));
}

// Each line: {"query_id", "ranked_ids": [...]}; "scores" is optional.
inline std::vector<RankedList> read_results(const std::filesystem::path& path) {
  std::vector<RankedList> out;
  for_each_jsonl(path, [&](const json& j) {
    out.push_back({j.at("query_id").get<std::string>(), j.at("ranked_ids").get<std::vector<std::string>>()});
  });
  return out;
}

inline json result_to_json(const std::string& query_id, const SearchResult& r) {
  json ids = json::array(), scores = json::array();
  for (const auto& e : r.entries) {
    ids.push_back(e.passage_id);
    scores.push_back(e.score);
  }
  return json{{"query_id", query_id}, {"ranked_ids", ids}, {"scores", scores}};
}

inline std::vector<LabeledText> read_labeled_texts(const std::filesystem::path& path) {
  std::vector<LabeledText> out;
  for_each_jsonl(path, [&](const json& j) { out.push_back({j.at("text").get<std::string>(), j.at("year").get<int>()}); });
  return out;
}

inline json report_to_json(const EvalReport& r) {
  auto grid = [](const std::map<std::size_t, double>& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[std::to_string(k)] = v;
    return j;
  };
  return json{{"queries", r.query_count},
              {"top_k_accuracy", grid(r.accuracy)},
              {"ndcg", grid(r.ndcg)},
              {"map", grid(r.map)}};
}

inline json predictor_report_to_json(const PredictorReport& r) {
  return json{{"count", r.count}, {"mae", r.mae}, {"mse", r.mse}, {"accuracy", r.accuracy}};
}

}  // namespace chronoret::io
