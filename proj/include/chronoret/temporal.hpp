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

// The temporal encoder: a learnable lookup table from timestamp keys to
// d_t-dimensional vectors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "chronoret/binary_io.hpp"
#include "chronoret/date.hpp"
#include "chronoret/error.hpp"
#include "chronoret/rng.hpp"

namespace chronoret {

enum class TableGranularity : std::uint8_t { Year = 0, Month = 1 };

inline constexpr std::size_t kDefaultTemporalDim = 768;
inline constexpr float kDefaultInitScale = 0.02f;

// Year -> year; Month -> year * 12 + (month - 1). A missing month counts as
// January.
inline std::int64_t key_of(const CalendarDate& date, TableGranularity g) {
  if (g == TableGranularity::Year) return date.year;
  return std::int64_t{date.year} * 12 + (date.month.value_or(1) - 1);
}

class TemporalTable {
 public:
  TemporalTable() = default;

  TemporalTable(TableGranularity granularity, std::int64_t min_key, std::int64_t max_key,
                std::size_t dim)
      : granularity_(granularity), min_key_(min_key), max_key_(max_key), dim_(dim) {
    if (min_key > max_key)
      throw InvalidRange("min_key " + std::to_string(min_key) + " > max_key " +
                         std::to_string(max_key));
    if (dim == 0) throw InvalidArgument("temporal dim must be >= 1");
    weights_.assign(row_count() * dim, 0.0f);
  }

  TableGranularity granularity() const { return granularity_; }
  std::int64_t min_key() const { return min_key_; }
  std::int64_t max_key() const { return max_key_; }
  std::size_t dim() const { return dim_; }
  std::size_t row_count() const { return static_cast<std::size_t>(max_key_ - min_key_ + 1); }

  bool contains(std::int64_t key) const { return key >= min_key_ && key <= max_key_; }

  std::int64_t clamp(std::int64_t key) const { return std::clamp(key, min_key_, max_key_); }

  std::span<const float> row(std::int64_t key) const {
    check(key);
    return {weights_.data() + offset(key), dim_};
  }

  std::span<float> row(std::int64_t key) {
    check(key);
    return {weights_.data() + offset(key), dim_};
  }

  void set_row(std::int64_t key, std::span<const float> values) {
    if (values.size() != dim_) throw DimMismatch("row has " + std::to_string(values.size()) +
                                                 " values, table dim is " + std::to_string(dim_));
    std::copy(values.begin(), values.end(), row(key).begin());
  }

  std::span<const float> weights() const { return weights_; }
  std::span<float> weights() { return weights_; }

  bool all_finite() const {
    for (float w : weights_) {
      if (!std::isfinite(w)) return false;
    }
    return true;
  }

  friend bool operator==(const TemporalTable&, const TemporalTable&) = default;

 private:
  void check(std::int64_t key) const {
    if (!contains(key))
      throw UnknownTimestamp("timestamp key " + std::to_string(key) + " outside [" +
                             std::to_string(min_key_) + ", " + std::to_string(max_key_) + "]");
  }
  std::size_t offset(std::int64_t key) const {
    return static_cast<std::size_t>(key - min_key_) * dim_;
  }

  TableGranularity granularity_ = TableGranularity::Year;
  std::int64_t min_key_ = 0;
  std::int64_t max_key_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> weights_;
};

// Rows drawn i.i.d. uniform in [-scale, +scale].
inline TemporalTable init_table(std::int64_t min_key, std::int64_t max_key, std::size_t dim,
                                std::uint64_t seed, float scale = kDefaultInitScale,
                                TableGranularity granularity = TableGranularity::Year) {
  TemporalTable table(granularity, min_key, max_key, dim);
  Rng rng(seed);
  for (float& w : table.weights()) {
    w = static_cast<float>(scale * (2.0 * rng.uniform01() - 1.0));
  }
  return table;
}

// Exactly the stored row for the date's key.
inline std::span<const float> encode_timestamp(const TemporalTable& table, const CalendarDate& date) {
  return table.row(key_of(date, table.granularity()));
}

namespace detail {
inline constexpr std::string_view kTableMagic = "TTBL";
inline constexpr std::uint32_t kTableVersion = 1;
}  // namespace detail

inline std::vector<char> serialize_table(const TemporalTable& t) {
  binio::Writer w;
  w.put_magic(detail::kTableMagic);
  w.put<std::uint32_t>(detail::kTableVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(t.granularity()));
  w.put<std::int64_t>(t.min_key());
  w.put<std::int64_t>(t.max_key());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(t.dim()));
  w.put_floats(t.weights());
  return w.bytes();
}

inline TemporalTable deserialize_table(std::vector<char> bytes) {
  binio::Reader r(std::move(bytes));
  r.expect_magic(detail::kTableMagic);
  if (const auto v = r.get<std::uint32_t>("version"); v != detail::kTableVersion)
    throw FormatError("unsupported TTBL version " + std::to_string(v));
  const auto g = r.get<std::uint8_t>("granularity");
  if (g > 1) throw FormatError("bad TTBL granularity " + std::to_string(g));
  const auto min_key = r.get<std::int64_t>("min_key");
  const auto max_key = r.get<std::int64_t>("max_key");
  const auto dim = r.get<std::uint32_t>("dim");
  if (min_key > max_key || dim == 0) throw FormatError("bad TTBL shape");
  const auto rows = static_cast<std::uint64_t>(max_key - min_key) + 1;
  if (rows * dim * sizeof(float) != r.remaining())
    throw FormatError("TTBL payload size does not match header (truncated or corrupt)");
  TemporalTable t(static_cast<TableGranularity>(g), min_key, max_key, dim);
  r.get_floats(t.weights(), "weights");
  r.expect_end();
  if (!t.all_finite()) throw FormatError("TTBL contains non-finite weights");
  return t;
}

inline void save_table(const TemporalTable& t, const std::filesystem::path& path) {
  binio::write_file(path, serialize_table(t));
}

inline TemporalTable load_table(const std::filesystem::path& path) {
  return deserialize_table(binio::read_file(path));
}

}  // namespace chronoret
