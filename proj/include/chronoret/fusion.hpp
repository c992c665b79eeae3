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

// Fusion of a semantic vector x with a temporal vector y, and the inner
// product score between fused vectors.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chronoret/error.hpp"

namespace chronoret {

enum class FusionKind : std::uint8_t {
  VS = 0,   // x + y
  RE = 1,   // x - y
  EWI = 2,  // x * y elementwise
  FS = 3,   // [x, y]
};

inline std::string_view to_string(FusionKind k) {
  switch (k) {
    case FusionKind::VS: return "vs";
    case FusionKind::RE: return "re";
    case FusionKind::EWI: return "ewi";
    case FusionKind::FS: return "fs";
  }
  return "?";
}

inline FusionKind parse_fusion_kind(std::string_view s) {
  if (s == "vs") return FusionKind::VS;
  if (s == "re") return FusionKind::RE;
  if (s == "ewi") return FusionKind::EWI;
  if (s == "fs") return FusionKind::FS;
  throw InvalidArgument("unknown fusion kind '" + std::string(s) + "' (expected vs|re|ewi|fs)");
}

inline constexpr FusionKind kAllFusionKinds[] = {FusionKind::VS, FusionKind::RE, FusionKind::EWI,
                                                 FusionKind::FS};

// Output dimension, or throws DimMismatch when the kind needs equal lengths.
inline std::size_t fused_dim(FusionKind kind, std::size_t semantic_dim, std::size_t temporal_dim) {
  if (kind == FusionKind::FS) return semantic_dim + temporal_dim;
  if (semantic_dim != temporal_dim)
    throw DimMismatch(std::string(to_string(kind)) + " fusion needs equal dims, got " +
                      std::to_string(semantic_dim) + " and " + std::to_string(temporal_dim));
  return semantic_dim;
}

// Writes Fuse(x, y) into out (out.size() == fused_dim). Scalar type of the
// output is free so the trainer can fuse in double precision.
template <typename Out, typename In>
void fuse_into(std::span<const In> x, std::span<const In> y, FusionKind kind, std::span<Out> out) {
  const std::size_t n = x.size();
  switch (kind) {
    case FusionKind::VS:
      for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<Out>(x[i]) + static_cast<Out>(y[i]);
      break;
    case FusionKind::RE:
      for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<Out>(x[i]) - static_cast<Out>(y[i]);
      break;
    case FusionKind::EWI:
      for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<Out>(x[i]) * static_cast<Out>(y[i]);
      break;
    case FusionKind::FS:
      for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<Out>(x[i]);
      for (std::size_t i = 0; i < y.size(); ++i) out[n + i] = static_cast<Out>(y[i]);
      break;
  }
}

// Dot product of f32 vectors with f64 accumulation.
inline double dot64(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<double>(a[i]) * b[i];
  return acc;
}

struct FusedVector {
  std::vector<float> values;
  FusionKind kind = FusionKind::VS;

  std::size_t dim() const { return values.size(); }
};

inline FusedVector fuse(std::span<const float> x, std::span<const float> y, FusionKind kind) {
  for (float v : x)
    if (!std::isfinite(v)) throw InvalidArgument("non-finite semantic value");
  for (float v : y)
    if (!std::isfinite(v)) throw InvalidArgument("non-finite temporal value");
  FusedVector out{std::vector<float>(fused_dim(kind, x.size(), y.size())), kind};
  fuse_into<float, float>(x, y, kind, out.values);
  return out;
}

inline float score(const FusedVector& fq, const FusedVector& fp) {
  if (fq.kind != fp.kind)
    throw DimMismatch("score between " + std::string(to_string(fq.kind)) + " and " +
                      std::string(to_string(fp.kind)) + " vectors");
  if (fq.dim() != fp.dim())
    throw DimMismatch("score between dims " + std::to_string(fq.dim()) + " and " +
                      std::to_string(fp.dim()));
  return static_cast<float>(dot64(fq.values, fp.values));
}

}  // namespace chronoret
