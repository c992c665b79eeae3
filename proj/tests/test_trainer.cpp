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
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "chronoret/embeddings.hpp"
#include "chronoret/index.hpp"
#include "chronoret/trainer.hpp"
#include "oracles.hpp"

using namespace chronoret;
using Catch::Matchers::WithinAbs;

namespace {

// Batch whose logits are all zero: zero semantic vectors, zero table, VS.
oracle::RandomBatch uniform_batch(std::size_t n) {
  std::mt19937_64 rng(1);
  auto b = oracle::random_batch(rng, 1, n, 4, 4);
  b.table = init_table(b.table.min_key(), b.table.max_key(), 4, 0, 0.0f);
  EmbeddingMatrix q(4), p(4);
  for (const auto& id : b.qsem.ids()) q.add(id, std::vector<float>(4, 0.0f));
  for (const auto& id : b.psem.ids()) p.add(id, std::vector<float>(4, 0.0f));
  b.qsem = std::move(q);
  b.psem = std::move(p);
  return b;
}

double max_fd_relative_error(FusionKind kind, bool in_batch, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto b = oracle::random_batch(rng, 4, 2, 8, 8);
  const auto lg = loss_and_grad(b.examples, b.table, b.qsem, b.psem, kind, in_batch);
  auto shadow = oracle::shadow_of(b.table);
  const double h = 1e-3;
  double worst = 0.0;
  for (auto& [key, row] : shadow) {
    for (std::size_t d = 0; d < row.size(); ++d) {
      const double fd = oracle::central_difference(
          [&] { return oracle::reference_loss(b.examples, shadow, b.qsem, b.psem, kind, in_batch); }, row[d], h);
      const auto it = lg.grad.find(key);
      const double analytic = it == lg.grad.end() ? 0.0 : it->second[d];
      const double denom = std::max({std::abs(fd), std::abs(analytic), 1e-8});
      worst = std::max(worst, std::abs(fd - analytic) / denom);
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("uniform logits give ln(n + 1)", "[trainer]") {
  for (std::size_t n : {1u, 4u, 9u}) {
    const auto b = uniform_batch(n);
    const auto lg = loss_and_grad(b.examples, b.table, b.qsem, b.psem, FusionKind::VS, false);
    CHECK_THAT(lg.loss, WithinAbs(std::log(static_cast<double>(n + 1)), 1e-12));
    CHECK_THAT(lg.loss, WithinAbs(-std::log(1.0 / static_cast<double>(n + 1)), 1e-12));
  }
  CHECK_THAT(std::log(2.0), WithinAbs(0.693147, 1e-6));
  CHECK_THAT(std::log(5.0), WithinAbs(1.609438, 1e-6));
}

TEST_CASE("cross_entropy is shift invariant and stable", "[trainer]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(1 + rng() % 10);
    for (auto& v : s) v = u(rng);
    const std::size_t gold = rng() % s.size();
    const double base = cross_entropy(s, gold);
    for (double shift : {-700.0, -3.5, 0.25, 900.0}) {
      auto shifted = s;
      for (auto& v : shifted) v += shift;
      REQUIRE_THAT(cross_entropy(shifted, gold), WithinAbs(base, 1e-9));
    }
  }
}

TEST_CASE("analytic gradients match central finite differences", "[trainer][gradcheck]") {
  for (auto kind : kAllFusionKinds) {
    for (bool in_batch : {false, true}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        INFO("kind " << to_string(kind) << " in_batch " << in_batch << " seed " << seed);
        CHECK(max_fd_relative_error(kind, in_batch, seed) < 1e-4);
      }
    }
  }
}

TEST_CASE("loss matches the scalar reference", "[trainer]") {
  std::mt19937_64 rng(9);
  for (auto kind : kAllFusionKinds) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto b = oracle::random_batch(rng, 1, 1 + rng() % 5, 6, kind == FusionKind::FS ? 3 : 6);
      const auto lg = loss_and_grad(b.examples, b.table, b.qsem, b.psem, kind, false);
      const double ref = oracle::reference_loss(b.examples, oracle::shadow_of(b.table), b.qsem, b.psem, kind, false);
      REQUIRE_THAT(lg.loss, WithinAbs(ref, 1e-10));
    }
  }
}

TEST_CASE("loss is invariant to the order of negatives", "[trainer][property]") {
  std::mt19937_64 rng(12);
  for (auto kind : kAllFusionKinds) {
    auto b = oracle::random_batch(rng, 3, 5, 8, 8);
    for (bool in_batch : {false, true}) {
      const double base = loss_and_grad(b.examples, b.table, b.qsem, b.psem, kind, in_batch).loss;
      auto shuffled = b.examples;
      for (auto& ex : shuffled) std::shuffle(ex.negatives.begin(), ex.negatives.end(), rng);
      CHECK_THAT(loss_and_grad(shuffled, b.table, b.qsem, b.psem, kind, in_batch).loss, WithinAbs(base, 1e-12));
    }
  }
}

TEST_CASE("batch scores layout", "[trainer]") {
  std::mt19937_64 rng(4);
  const auto b = oracle::random_batch(rng, 3, 2, 4, 4);
  const auto off = loss_and_grad(b.examples, b.table, b.qsem, b.psem, FusionKind::VS, false);
  const auto on = loss_and_grad(b.examples, b.table, b.qsem, b.psem, FusionKind::VS, true);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(off.scores.logits[i].size() == 3);
    CHECK(off.scores.gold[i] == 0);
    CHECK(on.scores.logits[i].size() == 9);
    CHECK(on.scores.gold[i] == 3 * i);
    CHECK(on.scores.logits[i][on.scores.gold[i]] == off.scores.logits[i][0]);
  }
}

TEST_CASE("perturbing a timestamp row only moves scores that use it", "[trainer]") {
  std::mt19937_64 rng(21);
  auto b = oracle::random_batch(rng, 4, 3, 6, 6, 6);
  for (auto& ex : b.examples) ex.query.explicit_date = CalendarDate::of_year(2005);  // keep queries off other rows
  const auto before = loss_and_grad(b.examples, b.table, b.qsem, b.psem, FusionKind::VS, true).scores;
  auto perturbed = b.table;
  for (float& w : perturbed.row(2002)) w += 0.25f;
  const auto after = loss_and_grad(b.examples, perturbed, b.qsem, b.psem, FusionKind::VS, true).scores;

  std::vector<int> col_year;
  for (const auto& ex : b.examples) {
    col_year.push_back(ex.positive.pub_date.year);
    for (const auto& n : ex.negatives) col_year.push_back(n.pub_date.year);
  }
  for (std::size_t i = 0; i < before.logits.size(); ++i) {
    for (std::size_t c = 0; c < col_year.size(); ++c) {
      if (col_year[c] == 2002) {
        CHECK(before.logits[i][c] != after.logits[i][c]);
      } else {
        CHECK(before.logits[i][c] == after.logits[i][c]);
      }
    }
  }
}

TEST_CASE("non-finite parameters raise NumericalError", "[trainer]") {
  std::mt19937_64 rng(5);
  auto b = oracle::random_batch(rng, 2, 2, 4, 4);
  for (auto k = b.table.min_key(); k <= b.table.max_key(); ++k) b.table.row(k)[0] = INFINITY;
  CHECK_THROWS_AS(loss_and_grad(b.examples, b.table, b.qsem, b.psem, FusionKind::VS, true), NumericalError);
  CHECK_THROWS_AS(loss_and_grad({}, b.table, b.qsem, b.psem, FusionKind::VS, true), NoData);
}

TEST_CASE("scheduled_lr warms up linearly then stays constant", "[trainer]") {
  TrainConfig cfg;
  cfg.lr = 1.0;
  cfg.warmup_ratio = 0.1;
  CHECK_THAT(scheduled_lr(cfg, 0, 100), WithinAbs(0.1, 1e-15));
  CHECK_THAT(scheduled_lr(cfg, 4, 100), WithinAbs(0.5, 1e-15));
  CHECK(scheduled_lr(cfg, 9, 100) == 1.0);
  CHECK(scheduled_lr(cfg, 10, 100) == 1.0);
  CHECK(scheduled_lr(cfg, 99, 100) == 1.0);
  cfg.warmup_ratio = 0.0;
  CHECK(scheduled_lr(cfg, 0, 100) == 1.0);
}

TEST_CASE("train", "[trainer]") {
  std::mt19937_64 rng(6);
  auto b = oracle::random_batch(rng, 40, 3, 8, 8, 5);
  TrainConfig cfg;
  cfg.fusion = FusionKind::FS;
  cfg.batch_size = 8;
  cfg.epochs = 3;
  cfg.seed = 99;

  SECTION("lr = 0 leaves the table untouched") {
    cfg.lr = 0.0;
    const auto m = train(b.examples, b.table, b.qsem, b.psem, cfg);
    CHECK(m.table == b.table);
    CHECK(m.history.size() == 15);
    CHECK(m.epoch_loss.size() == 3);
  }
  SECTION("same seed, same result") {
    cfg.lr = 0.01;
    const auto m1 = train(b.examples, b.table, b.qsem, b.psem, cfg);
    const auto m2 = train(b.examples, b.table, b.qsem, b.psem, cfg);
    CHECK(m1.history == m2.history);
    CHECK(m1.table == m2.table);
    CHECK_FALSE(m1.table == b.table);
  }
  SECTION("only touched rows move") {
    cfg.lr = 0.01;
    auto wide = b.table;
    wide = init_table(1990, 2010, 8, 1, 0.5f);
    const auto m = train(b.examples, wide, b.qsem, b.psem, cfg);
    for (std::int64_t k = 1990; k < 2000; ++k) {
      const auto before = std::as_const(wide).row(k);
      const auto after = m.table.row(k);
      CHECK(std::equal(before.begin(), before.end(), after.begin()));
    }
  }
  SECTION("errors") {
    CHECK_THROWS_AS(train({}, b.table, b.qsem, b.psem, cfg), NoData);
    cfg.epochs = 0;
    CHECK_THROWS_AS(train(b.examples, b.table, b.qsem, b.psem, cfg), InvalidArgument);
    cfg.epochs = 1;
    cfg.warmup_ratio = 1.5;
    CHECK_THROWS_AS(train(b.examples, b.table, b.qsem, b.psem, cfg), InvalidArgument);
  }
}

TEST_CASE("training lowers the loss on year-separable data", "[trainer]") {
  // Semantics are identical across years; only the timestamp separates the
  // positive from different-year negatives.
  EmbeddingMatrix qsem(8), psem(8);
  std::vector<Passage> passages;
  std::vector<Query> queries;
  std::mt19937_64 rng(7);
  const auto seed_batch = oracle::random_batch(rng, 1, 0, 8, 8);
  const auto shared = seed_batch.qsem.row(0);
  const std::vector<float> topic(shared.begin(), shared.end());
  for (int y = 2000; y < 2010; ++y) {
    for (int e = 0; e < 4; ++e) {
      const auto id = "p" + std::to_string(y) + "_" + std::to_string(e);
      passages.push_back({id, id, 0, "", "event " + std::to_string(e) + " ans" + std::to_string(y) + "x" + std::to_string(e),
                          CalendarDate::of_year(y)});
      psem.add(id, topic);
      const auto qid = "q" + std::to_string(y) + "_" + std::to_string(e);
      queries.push_back({qid, "what", CalendarDate::of_year(y), {"ans" + std::to_string(y) + "x" + std::to_string(e)}});
      qsem.add(qid, topic);
    }
  }
  const auto set = build_training_set(queries, passages, {NegativeMode::DifferentYear, 4, 3});
  REQUIRE(set.examples.size() == 40);
  TrainConfig cfg;
  cfg.fusion = FusionKind::FS;
  cfg.epochs = 10;
  cfg.batch_size = 8;
  cfg.lr = 0.05;
  cfg.seed = 1;
  const auto m = train(set.examples, init_table(2000, 2009, 8, 2), qsem, psem, cfg);
  CHECK(m.epoch_loss.back() < m.epoch_loss.front());
}
