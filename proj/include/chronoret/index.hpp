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

// Exact brute-force maximum inner product search over fused passage vectors.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "chronoret/binary_io.hpp"
#include "chronoret/corpus.hpp"
#include "chronoret/embeddings.hpp"
#include "chronoret/error.hpp"
#include "chronoret/fusion.hpp"
#include "chronoret/temporal.hpp"

namespace chronoret {

struct DenseIndex {
  std::vector<std::string> passage_ids;
  std::size_t dim = 0;
  std::vector<float> vectors;  // row-major, passage_ids.size() x dim
  // Fusion used to build the rows; empty for a plain semantic index.
  std::optional<FusionKind> kind;
  std::vector<CalendarDate> dates;  // parallel to passage_ids

  std::size_t size() const { return passage_ids.size(); }
  std::span<const float> row(std::size_t i) const { return {vectors.data() + i * dim, dim}; }

  friend bool operator==(const DenseIndex&, const DenseIndex&) = default;
};

struct ScoredPassage {
  std::string passage_id;
  float score = 0.0f;

  friend bool operator==(const ScoredPassage&, const ScoredPassage&) = default;
};

struct SearchResult {
  std::vector<ScoredPassage> entries;
  std::size_t k = 0;

  std::vector<std::string> ranked_ids() const {
    std::vector<std::string> ids;
    ids.reserve(entries.size());
    for (const auto& e : entries) ids.push_back(e.passage_id);
    return ids;
  }

  friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

// Rows are Fuse(E_p(p), E_t(t_p)). Throws BuildError naming the first passage
// whose embedding or timestamp is unavailable.
inline DenseIndex build_index(const std::vector<Passage>& passages, const EmbeddingMatrix& semantic,
                              const TemporalTable& table, FusionKind kind) {
  DenseIndex index;
  index.kind = kind;
  index.dim = fused_dim(kind, semantic.dim(), table.dim());
  index.passage_ids.reserve(passages.size());
  index.vectors.resize(passages.size() * index.dim);
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < passages.size(); ++i) {
    const auto& p = passages[i];
    if (!seen.insert(p.id).second) throw BuildError("duplicate passage id '" + p.id + "'");
    const auto row = semantic.find(p.id);
    if (!row) throw BuildError("passage '" + p.id + "' has no semantic embedding");
    const auto key = key_of(p.pub_date, table.granularity());
    if (!table.contains(key))
      throw BuildError("passage '" + p.id + "' has timestamp key " + std::to_string(key) +
                       " outside the temporal table");
    fuse_into<float, float>(semantic.row(*row), table.row(key), kind,
                            std::span<float>(index.vectors.data() + i * index.dim, index.dim));
    index.passage_ids.push_back(p.id);
    index.dates.push_back(p.pub_date);
  }
  return index;
}

// Date-blind index whose rows are the semantic embeddings themselves.
inline DenseIndex build_semantic_index(const std::vector<Passage>& passages,
                                       const EmbeddingMatrix& semantic) {
  DenseIndex index;
  index.dim = semantic.dim();
  index.passage_ids.reserve(passages.size());
  index.vectors.reserve(passages.size() * index.dim);
  for (const auto& p : passages) {
    const auto row = semantic.find(p.id);
    if (!row) throw BuildError("passage '" + p.id + "' has no semantic embedding");
    const auto values = semantic.row(*row);
    index.vectors.insert(index.vectors.end(), values.begin(), values.end());
    index.passage_ids.push_back(p.id);
    index.dates.push_back(p.pub_date);
  }
  return index;
}

namespace detail {

// Exact top-k of rows [begin, end): scores descending, ids ascending on ties.
inline std::vector<std::size_t> shard_topk(const DenseIndex& index, std::span<const float> query,
                                           std::span<float> scores, std::size_t begin,
                                           std::size_t end, std::size_t k) {
  std::vector<std::size_t> order(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    scores[i] = static_cast<float>(dot64(query, index.row(i)));
    order[i - begin] = i;
  }
  const auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return index.passage_ids[a] < index.passage_ids[b];
  };
  const std::size_t keep = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(), better);
  order.resize(keep);
  return order;
}

}  // namespace detail

// Exact top-k by full scan. k larger than the index returns every entry.
// With threads > 1 the scan is sharded; the merged result is identical to
// the serial one because the ranking order is total.
inline SearchResult search_vector(const DenseIndex& index, std::span<const float> query,
                                  std::size_t k, unsigned threads = 1) {
  if (k == 0) throw InvalidArgument("k must be >= 1");
  if (query.size() != index.dim)
    throw DimMismatch("query dim " + std::to_string(query.size()) + " vs index dim " +
                      std::to_string(index.dim));
  const std::size_t n = index.size();
  std::vector<float> scores(n);
  const std::size_t shards = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));

  std::vector<std::vector<std::size_t>> partial(shards);
  const auto run = [&](std::size_t s) {
    const std::size_t begin = n * s / shards, end = n * (s + 1) / shards;
    partial[s] = detail::shard_topk(index, query, scores, begin, end, k);
  };
  if (shards == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t s = 0; s < shards; ++s) pool.emplace_back(run, s);
  }

  std::vector<std::size_t> merged;
  for (const auto& p : partial) merged.insert(merged.end(), p.begin(), p.end());
  const auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return index.passage_ids[a] < index.passage_ids[b];
  };
  const std::size_t keep = std::min(k, merged.size());
  std::partial_sort(merged.begin(), merged.begin() + static_cast<std::ptrdiff_t>(keep), merged.end(), better);

  SearchResult result;
  result.k = k;
  result.entries.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i)
    result.entries.push_back({index.passage_ids[merged[i]], scores[merged[i]]});
  return result;
}

inline SearchResult search(const DenseIndex& index, const FusedVector& query, std::size_t k,
                           unsigned threads = 1) {
  if (!index.kind || *index.kind != query.kind)
    throw DimMismatch("query fusion kind " + std::string(to_string(query.kind)) +
                      " does not match the index");
  return search_vector(index, query.values, k, threads);
}

namespace detail {
inline constexpr std::string_view kIndexMagic = "TIDX";
inline constexpr std::uint32_t kIndexVersion = 1;
inline constexpr std::uint8_t kSemanticOnlyKind = 0xFF;
}  // namespace detail

inline std::vector<char> serialize_index(const DenseIndex& index) {
  binio::Writer w;
  w.put_magic(detail::kIndexMagic);
  w.put<std::uint32_t>(detail::kIndexVersion);
  w.put<std::uint8_t>(index.kind ? static_cast<std::uint8_t>(*index.kind) : detail::kSemanticOnlyKind);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(index.size()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(index.dim));
  write_id_block(w, index.passage_ids);
  w.put_floats(index.vectors);
  for (const auto& d : index.dates) {
    w.put<std::int64_t>(pack_date(d));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(d.granularity()));
  }
  return w.bytes();
}

inline DenseIndex deserialize_index(std::vector<char> bytes) {
  binio::Reader r(std::move(bytes));
  r.expect_magic(detail::kIndexMagic);
  if (const auto v = r.get<std::uint32_t>("version"); v != detail::kIndexVersion)
    throw FormatError("unsupported TIDX version " + std::to_string(v));
  DenseIndex index;
  const auto kind = r.get<std::uint8_t>("kind");
  if (kind == detail::kSemanticOnlyKind) {
    index.kind.reset();
  } else if (kind <= static_cast<std::uint8_t>(FusionKind::FS)) {
    index.kind = static_cast<FusionKind>(kind);
  } else {
    throw FormatError("bad TIDX fusion kind " + std::to_string(kind));
  }
  const auto count = r.get<std::uint32_t>("count");
  index.dim = r.get<std::uint32_t>("dim");
  if (index.dim == 0) throw FormatError("TIDX dim is zero");
  index.passage_ids = read_id_block(r, count);
  std::unordered_set<std::string> seen(index.passage_ids.begin(), index.passage_ids.end());
  if (seen.size() != count) throw FormatError("duplicate passage ids in TIDX");
  const std::uint64_t date_block = std::uint64_t{count} * (sizeof(std::int64_t) + 1);
  if (std::uint64_t{count} * index.dim * sizeof(float) + date_block != r.remaining())
    throw FormatError("TIDX payload size does not match header (truncated or corrupt)");
  index.vectors.resize(std::size_t{count} * index.dim);
  r.get_floats(index.vectors, "vectors");
  index.dates.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto packed = r.get<std::int64_t>("date key");
    const auto g = r.get<std::uint8_t>("date granularity");
    if (g > 2) throw FormatError("bad TIDX date granularity " + std::to_string(g));
    try {
      index.dates.push_back(unpack_date(packed, static_cast<DateGranularity>(g)));
    } catch (const InvalidDate& e) {
      throw FormatError(std::string("bad TIDX date: ") + e.what());
    }
  }
  r.expect_end();
  return index;
}

inline void save_index(const DenseIndex& index, const std::filesystem::path& path) {
  binio::write_file(path, serialize_index(index));
}

inline DenseIndex load_index(const std::filesystem::path& path) {
  return deserialize_index(binio::read_file(path));
}

}  // namespace chronoret
