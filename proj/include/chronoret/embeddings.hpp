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

// Frozen semantic embeddings (the TEMB file format) and a hashing toy
// encoder that stands in for a real sentence encoder in tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chronoret/binary_io.hpp"
#include "chronoret/error.hpp"
#include "chronoret/text.hpp"

namespace chronoret {

inline constexpr std::size_t kDefaultSemanticDim = 768;

class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;

  explicit EmbeddingMatrix(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw InvalidArgument("embedding dim must be >= 1");
  }

  // Takes ownership of row-major data; throws FormatError on duplicate ids,
  // shape mismatch, or non-finite values.
  EmbeddingMatrix(std::vector<std::string> ids, std::size_t dim, std::vector<float> data)
      : EmbeddingMatrix(dim) {
    if (data.size() != ids.size() * dim)
      throw FormatError("embedding data has " + std::to_string(data.size()) + " values, expected " +
                        std::to_string(ids.size() * dim));
    for (float v : data)
      if (!std::isfinite(v)) throw FormatError("embedding contains non-finite values");
    ids_ = std::move(ids);
    data_ = std::move(data);
    position_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (!position_.emplace(ids_[i], i).second)
        throw FormatError("duplicate embedding id '" + ids_[i] + "'");
    }
  }

  void add(std::string id, std::span<const float> row) {
    if (row.size() != dim_)
      throw DimMismatch("row for '" + id + "' has dim " + std::to_string(row.size()) +
                        ", matrix dim is " + std::to_string(dim_));
    for (float v : row)
      if (!std::isfinite(v)) throw InvalidArgument("non-finite embedding for '" + id + "'");
    if (!position_.emplace(id, ids_.size()).second)
      throw InvalidArgument("duplicate embedding id '" + id + "'");
    ids_.push_back(std::move(id));
    data_.insert(data_.end(), row.begin(), row.end());
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const float> data() const { return data_; }

  std::span<const float> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

  std::optional<std::size_t> find(std::string_view id) const {
    const auto it = position_.find(std::string(id));
    if (it == position_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(std::string_view id) const { return find(id).has_value(); }

  // Throws BuildError when the id is missing.
  std::span<const float> row(std::string_view id) const {
    const auto i = find(id);
    if (!i) throw BuildError("no embedding for id '" + std::string(id) + "'");
    return row(*i);
  }

  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    return a.dim_ == b.dim_ && a.ids_ == b.ids_ && a.data_ == b.data_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> position_;
};

namespace detail {
inline constexpr std::string_view kEmbeddingMagic = "TEMB";
inline constexpr std::uint32_t kEmbeddingVersion = 1;
}  // namespace detail

inline void write_id_block(binio::Writer& w, const std::vector<std::string>& ids) {
  for (const auto& id : ids) w.put_short_string(id);
}

inline std::vector<std::string> read_id_block(binio::Reader& r, std::uint32_t count) {
  std::vector<std::string> ids;
  ids.reserve(std::min<std::uint32_t>(count, 1u << 20));
  for (std::uint32_t i = 0; i < count; ++i) ids.push_back(r.get_short_string("id block"));
  return ids;
}

inline std::vector<char> serialize_embeddings(const EmbeddingMatrix& m) {
  binio::Writer w;
  w.put_magic(detail::kEmbeddingMagic);
  w.put<std::uint32_t>(detail::kEmbeddingVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(m.size()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(m.dim()));
  write_id_block(w, m.ids());
  w.put_floats(m.data());
  return w.bytes();
}

inline EmbeddingMatrix deserialize_embeddings(std::vector<char> bytes) {
  binio::Reader r(std::move(bytes));
  r.expect_magic(detail::kEmbeddingMagic);
  if (const auto v = r.get<std::uint32_t>("version"); v != detail::kEmbeddingVersion)
    throw FormatError("unsupported TEMB version " + std::to_string(v));
  const auto count = r.get<std::uint32_t>("count");
  const auto dim = r.get<std::uint32_t>("dim");
  if (dim == 0) throw FormatError("TEMB dim is zero");
  auto ids = read_id_block(r, count);
  if (std::uint64_t{count} * dim * sizeof(float) != r.remaining())
    throw FormatError("TEMB payload size does not match header (truncated or corrupt)");
  std::vector<float> data(std::size_t{count} * dim);
  r.get_floats(data, "vectors");
  r.expect_end();
  return EmbeddingMatrix(std::move(ids), dim, std::move(data));
}

inline void save_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  binio::write_file(path, serialize_embeddings(m));
}

inline EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  return deserialize_embeddings(binio::read_file(path));
}

// Signed feature hashing of lowercased tokens, L2-normalized. Empty input
// (no tokens) yields the zero vector.
inline std::vector<float> toy_encode(std::string_view input, std::size_t dim, std::uint64_t seed = 0) {
  if (dim == 0) throw InvalidArgument("toy_encode dim must be >= 1");
  std::vector<double> acc(dim, 0.0);
  for (const auto& tok : text::tokenize(input)) {
    const std::uint64_t h = text::hash64(tok, seed);
    acc[h % dim] += (h >> 63) ? -1.0 : 1.0;
  }
  double norm = 0.0;
  for (double v : acc) norm += v * v;
  norm = std::sqrt(norm);
  std::vector<float> out(dim, 0.0f);
  if (norm > 0.0) {
    for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(acc[i] / norm);
  }
  return out;
}

}  // namespace chronoret
