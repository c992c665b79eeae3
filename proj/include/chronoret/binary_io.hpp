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

// Little-endian binary encoding shared by the TEMB, TTBL and TIDX formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "chronoret/error.hpp"

namespace chronoret::binio {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T byteswap_if_big(T v) {
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

inline std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return std::vector<char>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

class Writer {
 public:
  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T v) {
    v = byteswap_if_big(v);
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }

  void put_magic(std::string_view magic) { buf_.insert(buf_.end(), magic.begin(), magic.end()); }

  // u16 byte length followed by the raw bytes.
  void put_short_string(std::string_view s) {
    if (s.size() > 0xFFFF) throw FormatError("string longer than 65535 bytes: " + std::string(s.substr(0, 32)));
    put<std::uint16_t>(static_cast<std::uint16_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }

  void put_floats(std::span<const float> values) {
    if constexpr (std::endian::native == std::endian::little) {
      const auto* p = reinterpret_cast<const char*>(values.data());
      buf_.insert(buf_.end(), p, p + values.size_bytes());
    } else {
      for (float v : values) put(v);
    }
  }

  const std::vector<char>& bytes() const { return buf_; }

 private:
  std::vector<char> buf_;
};

// Bounds-checked cursor over an in-memory file; every overrun is a
// FormatError naming the field being read.
class Reader {
 public:
  explicit Reader(std::vector<char> bytes) : buf_(std::move(bytes)) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get(const char* what) {
    require(sizeof(T), what);
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return byteswap_if_big(v);
  }

  void expect_magic(std::string_view magic) {
    require(magic.size(), "magic");
    if (std::string_view(buf_.data() + pos_, magic.size()) != magic)
      throw FormatError("bad magic, expected '" + std::string(magic) + "'");
    pos_ += magic.size();
  }

  std::string get_short_string(const char* what) {
    const auto len = get<std::uint16_t>(what);
    require(len, what);
    std::string s(buf_.data() + pos_, len);
    pos_ += len;
    return s;
  }

  void get_floats(std::span<float> out, const char* what) {
    require(out.size_bytes(), what);
    std::memcpy(out.data(), buf_.data() + pos_, out.size_bytes());
    pos_ += out.size_bytes();
    if constexpr (std::endian::native == std::endian::big) {
      for (float& v : out) v = byteswap_if_big(v);
    }
  }

  void expect_end() const {
    if (pos_ != buf_.size())
      throw FormatError(std::to_string(buf_.size() - pos_) + " trailing bytes after payload");
  }

  std::size_t remaining() const { return buf_.size() - pos_; }

 private:
  void require(std::size_t n, const char* what) const {
    if (buf_.size() - pos_ < n) throw FormatError(std::string("truncated file while reading ") + what);
  }

  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

}  // namespace chronoret::binio
