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

// Command-line front end: chunk, embed, sample, train, build-index, search,
// eval, route, predict-date.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "chronoret/chronoret.hpp"
#include "chronoret/io.hpp"

namespace cr = chronoret;
using nlohmann::json;

namespace {

bool parse_on_off(const std::string& s) {
  if (s == "on") return true;
  if (s == "off") return false;
  throw cr::InvalidArgument("expected on|off, got '" + s + "'");
}

cr::TableGranularity parse_granularity(const std::string& s) {
  if (s == "year") return cr::TableGranularity::Year;
  if (s == "month") return cr::TableGranularity::Month;
  throw cr::InvalidArgument("expected year|month, got '" + s + "'");
}

// Smallest key range covering every passage and dated query.
std::pair<std::int64_t, std::int64_t> key_range(const std::vector<cr::Passage>& passages,
                                                const std::vector<cr::Query>& queries,
                                                cr::TableGranularity g) {
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = std::numeric_limits<std::int64_t>::min();
  auto see = [&](const cr::CalendarDate& d) {
    const auto k = cr::key_of(d, g);
    lo = std::min(lo, k);
    hi = std::max(hi, k);
  };
  for (const auto& p : passages) see(p.pub_date);
  for (const auto& q : queries)
    if (q.explicit_date) see(*q.explicit_date);
  if (lo > hi) throw cr::NoData("no timestamps to size the temporal table");
  return {lo, hi};
}

struct ChunkArgs {
  std::string corpus, out, inject = "none", queries, queries_out;
  std::size_t chunk_size = cr::kDefaultChunkSize;
};

int run_chunk(const ChunkArgs& a) {
  const auto mode = cr::parse_injection_mode(a.inject);
  std::vector<cr::Passage> passages;
  std::size_t skipped = 0;
  for (const auto& doc : cr::io::read_documents(a.corpus)) {
    try {
      auto chunks = cr::chunk_document(doc, a.chunk_size);
      passages.insert(passages.end(), chunks.begin(), chunks.end());
    } catch (const cr::EmptyDocument& e) {
      std::cerr << "warning: " << e.what() << "\n";
      ++skipped;
    }
  }
  cr::io::write_passages(a.out, passages, mode);
  if (!a.queries.empty()) {
    if (a.queries_out.empty()) throw cr::InvalidArgument("--queries needs --queries-out");
    cr::io::JsonlWriter w(a.queries_out);
    for (const auto& q : cr::io::read_queries(a.queries)) {
      json j{{"id", q.id}, {"text", q.text}, {"answers", q.answers}};
      if (q.explicit_date) j["date"] = q.explicit_date->to_iso();
      if (mode == cr::InjectionMode::None || q.explicit_date) {
        const auto injected = cr::inject_query(q, mode);
        if (injected.appended_fallback)
          std::cerr << "warning: query '" << q.id << "' has no date mention; tag appended\n";
        j["text_rendered"] = injected.text;
      } else {
        j["text_rendered"] = q.text;
      }
      w.write(j);
    }
  }
  std::cerr << "wrote " << passages.size() << " passages (" << skipped << " empty documents skipped)\n";
  return 0;
}

struct EmbedArgs {
  std::string input, field = "text_rendered", out;
  std::size_t dim = 64;
  std::uint64_t seed = 0;
};

int run_embed(const EmbedArgs& a) {
  cr::EmbeddingMatrix m(a.dim);
  cr::io::for_each_jsonl(a.input, [&](const json& j) {
    const auto text = j.contains(a.field) ? j.at(a.field).get<std::string>() : j.at("text").get<std::string>();
    m.add(j.at("id").get<std::string>(), cr::toy_encode(text, a.dim, a.seed));
  });
  cr::save_embeddings(m, a.out);
  std::cerr << "wrote " << m.size() << " x " << m.dim() << " embeddings\n";
  return 0;
}

struct SampleArgs {
  std::string passages, queries, out, stats, strategy = "random";
  std::size_t negatives = 4;
  std::uint64_t seed = 0;
};

cr::TrainingSet sample_set(const std::vector<cr::Query>& queries, const std::vector<cr::Passage>& passages,
                           const std::string& strategy, std::size_t negatives, std::uint64_t seed) {
  const cr::NegativeStrategy s{cr::parse_negative_mode(strategy), negatives, seed};
  auto set = cr::build_training_set(queries, passages, s);
  const auto& st = set.stats;
  std::cerr << "training set: " << st.emitted << " examples from " << st.queries << " queries ("
            << st.dropped_no_positive << " without positives, " << st.dropped_no_negatives
            << " without negatives, " << st.undersized << " undersized)\n";
  return set;
}

int run_sample(const SampleArgs& a) {
  const auto set = sample_set(cr::io::read_queries(a.queries), cr::io::read_passages(a.passages), a.strategy,
                              a.negatives, a.seed);
  cr::io::write_training_set(a.out, a.stats.empty() ? a.out + ".stats.json" : a.stats, set);
  return 0;
}

struct TrainArgs {
  std::string passages, queries, passage_emb, query_emb, out, history, fusion = "fs",
      strategy = "diff-year", in_batch = "on", granularity = "year", init_table;
  cr::TrainConfig cfg;
  std::size_t temporal_dim = 0;
  float init_scale = cr::kDefaultInitScale;
};

int run_train(TrainArgs a) {
  a.cfg.fusion = cr::parse_fusion_kind(a.fusion);
  a.cfg.in_batch = parse_on_off(a.in_batch);
  const auto passages = cr::io::read_passages(a.passages);
  const auto queries = cr::io::read_queries(a.queries);
  const auto passage_emb = cr::load_embeddings(a.passage_emb);
  const auto query_emb = cr::load_embeddings(a.query_emb);

  cr::TemporalTable table;
  if (!a.init_table.empty()) {
    table = cr::load_table(a.init_table);
  } else {
    const auto g = parse_granularity(a.granularity);
    const auto [lo, hi] = key_range(passages, queries, g);
    const std::size_t dim = a.temporal_dim ? a.temporal_dim : passage_emb.dim();
    table = cr::init_table(lo, hi, dim, a.cfg.seed, a.init_scale, g);
  }
  const auto set = sample_set(queries, passages, a.strategy, a.cfg.n_negatives, a.cfg.seed);
  const auto model = cr::train(set.examples, std::move(table), query_emb, passage_emb, a.cfg);
  cr::save_table(model.table, a.out);
  if (!a.history.empty()) {
    cr::io::write_json(a.history, json{{"step_loss", model.history}, {"epoch_loss", model.epoch_loss},
                                       {"fusion", std::string(cr::to_string(a.cfg.fusion))},
                                       {"examples", set.examples.size()}});
  }
  std::cerr << "epoch loss: first " << model.epoch_loss.front() << ", last " << model.epoch_loss.back() << "\n";
  return 0;
}

struct IndexArgs {
  std::string passages, passage_emb, table, fusion = "fs", out;
};

int run_build_index(const IndexArgs& a) {
  const auto passages = cr::io::read_passages(a.passages);
  const auto emb = cr::load_embeddings(a.passage_emb);
  const auto index = a.table.empty()
                         ? cr::build_semantic_index(passages, emb)
                         : cr::build_index(passages, emb, cr::load_table(a.table), cr::parse_fusion_kind(a.fusion));
  cr::save_index(index, a.out);
  std::cerr << "indexed " << index.size() << " passages, dim " << index.dim << "\n";
  return 0;
}

struct SearchArgs {
  std::string index, semantic_index, queries, query_emb, table, out, date_train, corpus_temporal = "on";
  std::size_t k = 100;
  unsigned threads = 1;
  bool routed = false;
};

int run_search(const SearchArgs& a) {
  const auto index = cr::load_index(a.index);
  const auto queries = cr::io::read_queries(a.queries);
  const auto query_emb = cr::load_embeddings(a.query_emb);
  std::optional<cr::TemporalTable> table;
  if (!a.table.empty()) table = cr::load_table(a.table);
  if (index.kind && !table) throw cr::InvalidArgument("a fused index needs --table");

  std::optional<cr::DenseIndex> semantic;
  std::optional<cr::DatePredictor> predictor;
  if (a.routed) {
    if (!index.kind || a.semantic_index.empty())
      throw cr::InvalidArgument("--routed needs a fused --index and a --semantic-index");
    semantic = cr::load_index(a.semantic_index);
    if (!a.date_train.empty()) {
      predictor = cr::train_predictor(cr::io::read_labeled_texts(a.date_train));
    }
  }

  cr::io::JsonlWriter w(a.out);
  for (const auto& q : queries) {
    const auto sem = query_emb.row(q.id);
    cr::SearchResult result;
    if (a.routed) {
      const cr::Retrievers r{index, *semantic, *table, predictor ? &*predictor : nullptr};
      result = cr::route_and_search(q, sem, {parse_on_off(a.corpus_temporal), a.k, a.threads}, r).result;
    } else if (!index.kind) {
      result = cr::search_vector(index, sem, a.k, a.threads);
    } else {
      if (!q.explicit_date)
        throw cr::InvalidArgument("query '" + q.id + "' has no date; use --routed for undated queries");
      const auto key = table->clamp(cr::key_of(*q.explicit_date, table->granularity()));
      result = cr::search(index, cr::fuse(sem, table->row(key), *index.kind), a.k, a.threads);
    }
    w.write(cr::io::result_to_json(q.id, result));
  }
  return 0;
}

struct EvalArgs {
  std::string results, queries, passages, out, per_query;
};

int run_eval(const EvalArgs& a) {
  const auto results = cr::io::read_results(a.results);
  const auto judgments = cr::make_judgments(cr::io::read_queries(a.queries), cr::io::read_passages(a.passages));
  std::vector<cr::RankedList> judged;
  for (const auto& r : results) {
    if (judgments.contains(r.query_id)) {
      judged.push_back(r);
    } else {
      std::cerr << "warning: query '" << r.query_id << "' has no relevant passage; skipped\n";
    }
  }
  const auto report = cr::evaluate(judged, judgments, !a.per_query.empty());
  std::cout << cr::format_report_table(report);
  if (!a.out.empty()) cr::io::write_json(a.out, cr::io::report_to_json(report));
  if (!a.per_query.empty()) {
    std::ofstream csv(a.per_query);
    csv << "query_id";
    for (auto k : cr::kReportCutoffs) csv << ",hit@" << k << ",ndcg@" << k << ",ap@" << k;
    csv << "\n";
    for (const auto& s : report.per_query) {
      csv << s.query_id;
      for (auto k : cr::kReportCutoffs) csv << "," << s.hit.at(k) << "," << s.ndcg.at(k) << "," << s.ap.at(k);
      csv << "\n";
    }
  }
  return 0;
}

struct RouteArgs {
  std::string queries, out, corpus_temporal = "on";
};

int run_route(const RouteArgs& a) {
  const bool temporal = parse_on_off(a.corpus_temporal);
  cr::io::JsonlWriter w(a.out);
  for (const auto& q : cr::io::read_queries(a.queries)) {
    const auto c = cr::classify(q, temporal);
    if (c.multiple_dates) std::cerr << "warning: query '" << q.id << "' mentions several dates; using the first\n";
    w.write(json{{"query_id", q.id},
                 {"class", std::string(cr::to_string(c.kind))},
                 {"date", c.mention ? json(c.mention->date.to_iso()) : json(nullptr)}});
  }
  return 0;
}

struct PredictArgs {
  std::string train, test, out;
};

int run_predict_date(const PredictArgs& a) {
  const auto predictor = cr::train_predictor(cr::io::read_labeled_texts(a.train));
  const auto report = cr::evaluate_predictor(predictor, cr::io::read_labeled_texts(a.test.empty() ? a.train : a.test));
  const auto j = cr::io::predictor_report_to_json(report);
  std::cout << j.dump(2) << "\n";
  if (!a.out.empty()) cr::io::write_json(a.out, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal dense passage retrieval: fusion of learned timestamp embeddings with frozen text embeddings"};
  app.require_subcommand(1);

  ChunkArgs chunk;
  auto* c = app.add_subcommand("chunk", "Split documents into fixed-size word passages");
  c->add_option("--corpus", chunk.corpus, "Documents JSONL")->required();
  c->add_option("--out", chunk.out, "Passages JSONL output")->required();
  c->add_option("--chunk-size", chunk.chunk_size, "Words per passage");
  c->add_option("--inject", chunk.inject, "Date injection for text_rendered: none|tag|token");
  c->add_option("--queries", chunk.queries, "Queries JSONL to render with the same injection");
  c->add_option("--queries-out", chunk.queries_out, "Rendered queries JSONL output");

  EmbedArgs embed;
  auto* e = app.add_subcommand("embed", "Encode JSONL records with the built-in hashing encoder (TEMB output)");
  e->add_option("--input", embed.input)->required();
  e->add_option("--field", embed.field, "Text field (falls back to 'text')");
  e->add_option("--out", embed.out)->required();
  e->add_option("--dim", embed.dim);
  e->add_option("--seed", embed.seed);

  SampleArgs sample;
  auto* s = app.add_subcommand("sample", "Build a training set with temporal negative sampling");
  s->add_option("--passages", sample.passages)->required();
  s->add_option("--queries", sample.queries)->required();
  s->add_option("--out", sample.out)->required();
  s->add_option("--stats", sample.stats);
  s->add_option("--strategy", sample.strategy, "random|same-year|diff-year");
  s->add_option("--negatives", sample.negatives);
  s->add_option("--seed", sample.seed);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train the temporal embedding table");
  t->add_option("--passages", train.passages)->required();
  t->add_option("--queries", train.queries)->required();
  t->add_option("--passage-emb", train.passage_emb)->required();
  t->add_option("--query-emb", train.query_emb)->required();
  t->add_option("--out", train.out, "TTBL output")->required();
  t->add_option("--history", train.history, "Loss history JSON output");
  t->add_option("--fusion", train.fusion, "vs|re|ewi|fs");
  t->add_option("--epochs", train.cfg.epochs);
  t->add_option("--batch-size", train.cfg.batch_size);
  t->add_option("--lr", train.cfg.lr);
  t->add_option("--warmup-ratio", train.cfg.warmup_ratio);
  t->add_option("--negatives", train.cfg.n_negatives);
  t->add_option("--strategy", train.strategy, "random|same-year|diff-year");
  t->add_option("--seed", train.cfg.seed);
  t->add_option("--in-batch", train.in_batch, "on|off");
  t->add_option("--granularity", train.granularity, "year|month");
  t->add_option("--temporal-dim", train.temporal_dim, "Defaults to the semantic dim");
  t->add_option("--init-scale", train.init_scale);
  t->add_option("--init-table", train.init_table, "Start from an existing TTBL");

  IndexArgs index;
  auto* b = app.add_subcommand("build-index", "Build a fused (with --table) or semantic index");
  b->add_option("--passages", index.passages)->required();
  b->add_option("--passage-emb", index.passage_emb)->required();
  b->add_option("--table", index.table);
  b->add_option("--fusion", index.fusion);
  b->add_option("--out", index.out)->required();

  SearchArgs search;
  auto* q = app.add_subcommand("search", "Exact top-k search for every query");
  q->add_option("--index", search.index)->required();
  q->add_option("--queries", search.queries)->required();
  q->add_option("--query-emb", search.query_emb)->required();
  q->add_option("--table", search.table);
  q->add_option("--out", search.out)->required();
  q->add_option("--k", search.k);
  q->add_option("--threads", search.threads);
  q->add_flag("--routed", search.routed, "Route explicit/implicit/non-temporal queries");
  q->add_option("--semantic-index", search.semantic_index);
  q->add_option("--date-train", search.date_train, "Labeled texts JSONL for the date predictor");
  q->add_option("--corpus-temporal", search.corpus_temporal, "on|off");

  EvalArgs ev;
  auto* v = app.add_subcommand("eval", "Top-k accuracy, nDCG@k and MAP@k");
  v->add_option("--results", ev.results)->required();
  v->add_option("--queries", ev.queries)->required();
  v->add_option("--passages", ev.passages)->required();
  v->add_option("--out", ev.out, "Report JSON output");
  v->add_option("--per-query", ev.per_query, "Per-query CSV output");

  RouteArgs route;
  auto* r = app.add_subcommand("route", "Classify queries as explicit, implicit, or non-temporal");
  r->add_option("--queries", route.queries)->required();
  r->add_option("--out", route.out)->required();
  r->add_option("--corpus-temporal", route.corpus_temporal, "on|off");

  PredictArgs predict;
  auto* p = app.add_subcommand("predict-date", "Train and evaluate the year predictor");
  p->add_option("--train", predict.train)->required();
  p->add_option("--test", predict.test);
  p->add_option("--out", predict.out);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*c) return run_chunk(chunk);
    if (*e) return run_embed(embed);
    if (*s) return run_sample(sample);
    if (*t) return run_train(train);
    if (*b) return run_build_index(index);
    if (*q) return run_search(search);
    if (*v) return run_eval(ev);
    if (*r) return run_route(route);
    if (*p) return run_predict_date(predict);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
