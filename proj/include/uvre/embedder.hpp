#pragma once

// The trainable embedder: a single linear projection followed by L2
// normalization. It consumes one feature vector per item and plays the role
// of the full model at desk scale; probers share the same interface so a
// fixed off-the-shelf embedder and a previous checkpoint are
// interchangeable.

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "uvre/embedding.hpp"
#include "uvre/errors.hpp"
#include "uvre/rng.hpp"
#include "uvre/store.hpp"

namespace uvre {

// Any map from a raw feature vector to a unit embedding.
using Prober = std::function<EmbeddingVector(std::span<const float>)>;

// Prober that trusts the input space: plain normalization.
inline Prober identity_prober() {
  return [](std::span<const float> x) { return l2_normalize(x); };
}

class ToyEmbedder {
 public:
  ToyEmbedder() = default;

  ToyEmbedder(size_t d_out, size_t d_in) : d_out_(d_out), d_in_(d_in), w_(d_out * d_in, 0.0) {
    if (d_out == 0 || d_in == 0) throw ConfigError("embedder: dimensions must be positive");
  }

  static ToyEmbedder random_init(size_t d_out, size_t d_in, Rng& rng) {
    ToyEmbedder e(d_out, d_in);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d_in));
    for (double& v : e.w_) v = (rng.uniform01() * 2.0 - 1.0) * scale;
    return e;
  }

  size_t d_out() const { return d_out_; }
  size_t d_in() const { return d_in_; }

  double& at(size_t row, size_t col) { return w_[row * d_in_ + col]; }
  double at(size_t row, size_t col) const { return w_[row * d_in_ + col]; }
  std::vector<double>& weights() { return w_; }
  const std::vector<double>& weights() const { return w_; }

  // z = W x, unnormalized.
  std::vector<double> project(std::span<const float> x) const {
    if (x.size() != d_in_) {
      throw DimensionMismatchError("embedder: input dim " + std::to_string(x.size()) +
                                   " vs d_in " + std::to_string(d_in_));
    }
    std::vector<double> z(d_out_, 0.0);
    for (size_t r = 0; r < d_out_; ++r) {
      double acc = 0.0;
      const double* row = w_.data() + r * d_in_;
      for (size_t c = 0; c < d_in_; ++c) acc += row[c] * static_cast<double>(x[c]);
      z[r] = acc;
    }
    return z;
  }

  // Unit-norm embedding in double precision (training path).
  std::vector<double> embed_double(std::span<const float> x) const {
    std::vector<double> z = project(x);
    double norm = 0.0;
    for (double v : z) norm += v * v;
    norm = std::sqrt(norm);
    if (norm < kZeroNormThreshold) {
      throw ZeroVectorError("embedder: projection collapsed to zero");
    }
    for (double& v : z) v /= norm;
    return z;
  }

  EmbeddingVector embed(std::span<const float> x) const {
    const std::vector<double> e = embed_double(x);
    EmbeddingVector out(e.size());
    for (size_t i = 0; i < e.size(); ++i) out[i] = static_cast<float>(e[i]);
    return out;
  }

  Prober as_prober() const {
    ToyEmbedder copy = *this;
    return [copy](std::span<const float> x) { return copy.embed(x); };
  }

  // Checkpoints reuse the embedding-store binary layout: one row per output
  // dimension, dimension = d_in.
  EmbeddingStore to_store() const {
    std::vector<std::string> ids;
    std::vector<EmbeddingVector> rows;
    for (size_t r = 0; r < d_out_; ++r) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "w%04zu", r);
      ids.emplace_back(buf);
      EmbeddingVector row(d_in_);
      for (size_t c = 0; c < d_in_; ++c) row[c] = static_cast<float>(at(r, c));
      rows.push_back(std::move(row));
    }
    return EmbeddingStore::from_raw_rows(std::move(ids), rows, static_cast<uint32_t>(d_in_));
  }

  static ToyEmbedder from_store(const EmbeddingStore& store) {
    if (store.empty()) throw FormatError("embedder checkpoint: empty store");
    ToyEmbedder e(store.count(), store.dimension());
    for (size_t r = 0; r < store.count(); ++r) {
      auto row = store.row(r);
      for (size_t c = 0; c < store.dimension(); ++c) e.at(r, c) = row[c];
    }
    return e;
  }

 private:
  size_t d_out_ = 0;
  size_t d_in_ = 0;
  std::vector<double> w_;  // row-major d_out x d_in
};

inline void save_checkpoint(const ToyEmbedder& embedder, const std::string& path) {
  write_store(embedder.to_store(), path);
}

inline ToyEmbedder load_checkpoint(const std::string& path) {
  return ToyEmbedder::from_store(read_store(path));
}

}  // namespace uvre
