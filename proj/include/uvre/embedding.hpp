#pragma once

// Embedding vector arithmetic. Vectors are stored as float32 and combined
// with float64 accumulation; everything downstream assumes unit-norm inputs
// so cosine similarity reduces to a dot product.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "uvre/errors.hpp"

namespace uvre {

using EmbeddingVector = std::vector<float>;

constexpr double kNormTolerance = 1e-5;
constexpr double kZeroNormThreshold = 1e-12;

inline double dot(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatchError("dot: dimension " + std::to_string(a.size()) + " vs " +
                                 std::to_string(b.size()));
  }
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return acc;
}

inline double l2_norm(std::span<const float> v) {
  double acc = 0.0;
  for (float x : v) acc += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(acc);
}

// Scales v to unit L2 norm. Direction is preserved; the zero vector has no
// direction and is rejected.
inline EmbeddingVector l2_normalize(std::span<const float> v) {
  if (v.empty()) throw ZeroVectorError("l2_normalize: empty vector");
  const double norm = l2_norm(v);
  if (norm < kZeroNormThreshold) {
    throw ZeroVectorError("l2_normalize: norm " + std::to_string(norm) + " below threshold");
  }
  EmbeddingVector out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(static_cast<double>(v[i]) / norm);
  return out;
}

inline bool is_unit_norm(std::span<const float> v, double tol = kNormTolerance) {
  return std::fabs(l2_norm(v) - 1.0) <= tol;
}

// Cosine similarity of two unit vectors: their dot product.
inline double cosine_sim(std::span<const float> a, std::span<const float> b) { return dot(a, b); }

// Cosine distance 1 - cos for raw (possibly unnormalized) vectors.
inline double cosine_distance(std::span<const float> a, std::span<const float> b) {
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na < kZeroNormThreshold || nb < kZeroNormThreshold) {
    throw ZeroVectorError("cosine_distance: zero-norm operand");
  }
  return 1.0 - dot(a, b) / (na * nb);
}

// Mean of a set of vectors followed by normalization; used to pool frame
// features into a single video-level embedding.
inline EmbeddingVector mean_pool_normalized(const std::vector<EmbeddingVector>& vs) {
  if (vs.empty()) throw ZeroVectorError("mean_pool_normalized: no vectors");
  const size_t d = vs[0].size();
  std::vector<double> acc(d, 0.0);
  for (const auto& v : vs) {
    if (v.size() != d) throw DimensionMismatchError("mean_pool_normalized: ragged input");
    for (size_t i = 0; i < d; ++i) acc[i] += static_cast<double>(v[i]);
  }
  EmbeddingVector mean(d);
  for (size_t i = 0; i < d; ++i) mean[i] = static_cast<float>(acc[i] / static_cast<double>(vs.size()));
  return l2_normalize(mean);
}

}  // namespace uvre
