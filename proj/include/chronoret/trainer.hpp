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

// Contrastive training of the temporal table with the semantic embeddings
// held fixed. Loss is softmax cross-entropy of the positive against hard and
// (optionally) in-batch negatives; gradients are derived by hand.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "chronoret/corpus.hpp"
#include "chronoret/embeddings.hpp"
#include "chronoret/error.hpp"
#include "chronoret/fusion.hpp"
#include "chronoret/rng.hpp"
#include "chronoret/sampling.hpp"
#include "chronoret/temporal.hpp"

namespace chronoret {

struct TrainConfig {
  std::size_t epochs = 5;
  std::size_t batch_size = 32;
  double lr = 1e-5;
  double warmup_ratio = 0.1;
  std::size_t n_negatives = 4;
  FusionKind fusion = FusionKind::FS;
  bool in_batch = true;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const {
    if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
    if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
    if (!(lr >= 0.0)) throw InvalidArgument("lr must be non-negative");
    if (!(warmup_ratio >= 0.0 && warmup_ratio <= 1.0))
      throw InvalidArgument("warmup_ratio must lie in [0, 1]");
  }
};

// Timestamp the query is fused with: its explicit date, else the positive's
// publication date.
inline const CalendarDate& query_timestamp(const TrainingExample& ex) {
  return ex.query.explicit_date ? *ex.query.explicit_date : ex.positive.pub_date;
}

// Ragged logits: row i scores query i against its candidate columns, and
// gold[i] is the position of that query's own positive within the row.
struct BatchScores {
  std::vector<std::vector<double>> logits;
  std::vector<std::size_t> gold;
};

using SparseRowGrad = std::map<std::int64_t, std::vector<double>>;

struct LossAndGrad {
  double loss = 0.0;
  SparseRowGrad grad;  // keyed by temporal table key
  BatchScores scores;
};

// Stable log(sum(exp(logits))) via max subtraction.
inline double log_sum_exp(std::span<const double> logits) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double s : logits) sum += std::exp(s - max_logit);
  return max_logit + std::log(sum);
}

// -log softmax(logits)[gold].
inline double cross_entropy(std::span<const double> logits, std::size_t gold) {
  return log_sum_exp(logits) - logits[gold];
}

namespace detail {

struct FusedItem {
  std::span<const float> semantic;
  std::int64_t key = 0;
  std::vector<double> fused;
};

inline FusedItem make_item(std::span<const float> semantic, const CalendarDate& date,
                           const TemporalTable& table, FusionKind kind, std::size_t dim) {
  FusedItem item{semantic, key_of(date, table.granularity()), std::vector<double>(dim)};
  fuse_into<double, float>(semantic, table.row(item.key), kind, item.fused);
  return item;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Pulls dL/d(fused) back to the temporal slot and adds it into grad[key].
inline void accumulate_temporal_grad(const FusedItem& item, const std::vector<double>& upstream,
                                     FusionKind kind, std::size_t temporal_dim, SparseRowGrad& grad) {
  auto& row = grad[item.key];
  if (row.empty()) row.assign(temporal_dim, 0.0);
  switch (kind) {
    case FusionKind::VS:
      for (std::size_t i = 0; i < temporal_dim; ++i) row[i] += upstream[i];
      break;
    case FusionKind::RE:
      for (std::size_t i = 0; i < temporal_dim; ++i) row[i] -= upstream[i];
      break;
    case FusionKind::EWI:
      for (std::size_t i = 0; i < temporal_dim; ++i) row[i] += upstream[i] * item.semantic[i];
      break;
    case FusionKind::FS: {
      const std::size_t offset = item.semantic.size();
      for (std::size_t i = 0; i < temporal_dim; ++i) row[i] += upstream[offset + i];
      break;
    }
  }
}

}  // namespace detail

// Mean cross-entropy over the batch and its gradient with respect to every
// temporal row the batch touches. With in_batch the candidates of row i are
// all positives and hard negatives in the batch; otherwise only example i's.
inline LossAndGrad loss_and_grad(std::span<const TrainingExample> batch, const TemporalTable& table,
                                 const EmbeddingMatrix& query_semantic,
                                 const EmbeddingMatrix& passage_semantic, FusionKind kind,
                                 bool in_batch) {
  if (batch.empty()) throw NoData("empty batch");
  if (query_semantic.dim() != passage_semantic.dim())
    throw DimMismatch("query and passage embeddings differ in dim");
  const std::size_t dim = fused_dim(kind, passage_semantic.dim(), table.dim());

  std::vector<detail::FusedItem> queries;
  std::vector<detail::FusedItem> columns;
  std::vector<std::size_t> own_begin, own_end;
  for (const auto& ex : batch) {
    queries.push_back(detail::make_item(query_semantic.row(ex.query.id), query_timestamp(ex), table,
                                        kind, dim));
    own_begin.push_back(columns.size());
    columns.push_back(detail::make_item(passage_semantic.row(ex.positive.id), ex.positive.pub_date,
                                        table, kind, dim));
    for (const auto& neg : ex.negatives)
      columns.push_back(detail::make_item(passage_semantic.row(neg.id), neg.pub_date, table, kind, dim));
    own_end.push_back(columns.size());
  }

  const std::size_t rows = batch.size();
  const double inv_rows = 1.0 / static_cast<double>(rows);
  LossAndGrad out;
  out.scores.logits.resize(rows);
  out.scores.gold.resize(rows);
  std::vector<std::vector<double>> query_upstream(rows, std::vector<double>(dim, 0.0));
  std::vector<std::vector<double>> column_upstream(columns.size(), std::vector<double>(dim, 0.0));

  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t begin = in_batch ? 0 : own_begin[i];
    const std::size_t end = in_batch ? columns.size() : own_end[i];
    auto& logits = out.scores.logits[i];
    logits.resize(end - begin);
    for (std::size_t c = begin; c < end; ++c) {
      logits[c - begin] = detail::dot(queries[i].fused, columns[c].fused);
      if (!std::isfinite(logits[c - begin]))
        throw NumericalError("non-finite logit for example '" + batch[i].query.id + "'");
    }
    const std::size_t gold = own_begin[i] - begin;
    out.scores.gold[i] = gold;

    const double log_z = log_sum_exp(logits);
    out.loss += (log_z - logits[gold]) * inv_rows;

    for (std::size_t c = begin; c < end; ++c) {
      const std::size_t local = c - begin;
      const double g = (std::exp(logits[local] - log_z) - (local == gold ? 1.0 : 0.0)) * inv_rows;
      if (g == 0.0) continue;
      auto& uq = query_upstream[i];
      auto& up = column_upstream[c];
      const auto& fq = queries[i].fused;
      const auto& fp = columns[c].fused;
      for (std::size_t d = 0; d < dim; ++d) {
        uq[d] += g * fp[d];
        up[d] += g * fq[d];
      }
    }
  }
  if (!std::isfinite(out.loss)) throw NumericalError("non-finite batch loss");

  for (std::size_t i = 0; i < rows; ++i)
    detail::accumulate_temporal_grad(queries[i], query_upstream[i], kind, table.dim(), out.grad);
  for (std::size_t c = 0; c < columns.size(); ++c)
    detail::accumulate_temporal_grad(columns[c], column_upstream[c], kind, table.dim(), out.grad);
  return out;
}

inline LossAndGrad loss_and_grad(std::span<const TrainingExample> batch, const TemporalTable& table,
                                 const EmbeddingMatrix& query_semantic,
                                 const EmbeddingMatrix& passage_semantic, const TrainConfig& cfg) {
  return loss_and_grad(batch, table, query_semantic, passage_semantic, cfg.fusion, cfg.in_batch);
}

// Adam over the table with dense moment buffers; only rows with a gradient
// in the current step are updated.
class AdamState {
 public:
  AdamState(const TemporalTable& table, const TrainConfig& cfg)
      : beta1_(cfg.adam_beta1), beta2_(cfg.adam_beta2), eps_(cfg.adam_eps),
        m_(table.weights().size(), 0.0), v_(table.weights().size(), 0.0) {}

  void step(TemporalTable& table, const SparseRowGrad& grad, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (const auto& [key, g] : grad) {
      auto row = table.row(key);
      const std::size_t base = static_cast<std::size_t>(key - table.min_key()) * table.dim();
      for (std::size_t d = 0; d < g.size(); ++d) {
        double& m = m_[base + d];
        double& v = v_[base + d];
        m = beta1_ * m + (1.0 - beta1_) * g[d];
        v = beta2_ * v + (1.0 - beta2_) * g[d] * g[d];
        const double update = lr * (m / c1) / (std::sqrt(v / c2) + eps_);
        row[d] = static_cast<float>(row[d] - update);
      }
    }
  }

 private:
  double beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
  std::uint64_t t_ = 0;
};

// Linear warmup from 0 to lr over the first warmup_ratio of all steps, then
// constant.
inline double scheduled_lr(const TrainConfig& cfg, std::size_t step, std::size_t total_steps) {
  const auto warmup = static_cast<std::size_t>(cfg.warmup_ratio * static_cast<double>(total_steps));
  if (warmup == 0 || step >= warmup) return cfg.lr;
  return cfg.lr * static_cast<double>(step + 1) / static_cast<double>(warmup);
}

struct TrainedModel {
  TemporalTable table;
  std::vector<double> history;     // loss per optimizer step
  std::vector<double> epoch_loss;  // mean step loss per epoch
};

inline TrainedModel train(const std::vector<TrainingExample>& examples, TemporalTable table,
                          const EmbeddingMatrix& query_semantic,
                          const EmbeddingMatrix& passage_semantic, const TrainConfig& cfg) {
  cfg.validate();
  if (examples.empty()) throw NoData("no training examples");

  const std::size_t steps_per_epoch = (examples.size() + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t total_steps = steps_per_epoch * cfg.epochs;
  Rng rng(cfg.seed);
  AdamState adam(table, cfg);
  TrainedModel out;
  out.history.reserve(total_steps);

  std::vector<std::size_t> order(examples.size());
  std::vector<TrainingExample> batch;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);

    double epoch_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++step) {
      batch.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + cfg.batch_size); ++i)
        batch.push_back(examples[order[i]]);
      const auto lg = loss_and_grad(batch, table, query_semantic, passage_semantic, cfg);
      adam.step(table, lg.grad, scheduled_lr(cfg, step, total_steps));
      out.history.push_back(lg.loss);
      epoch_sum += lg.loss;
    }
    out.epoch_loss.push_back(epoch_sum / static_cast<double>(steps_per_epoch));
  }
  out.table = std::move(table);
  return out;
}

}  // namespace chronoret
