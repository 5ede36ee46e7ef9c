#pragma once

// Exact exhaustive top-K similarity search. No index, no approximation:
// corpora here are small enough that scanning every row is cheap, and
// exactness keeps recall noise out of the metrics.

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "uvre/embedding.hpp"
#include "uvre/errors.hpp"
#include "uvre/store.hpp"

namespace uvre {

struct RankedEntry {
  std::string id;
  double score;  // in [-1, 1] for unit vectors
};

// Entries sorted by score descending; ties broken by ascending id so results
// are reproducible regardless of store layout.
using RankedList = std::vector<RankedEntry>;

inline bool ranks_before(double score_a, const std::string& id_a, double score_b,
                         const std::string& id_b) {
  if (score_a != score_b) return score_a > score_b;
  return id_a < id_b;
}

inline RankedList top_k_search(std::span<const float> query, const EmbeddingStore& store, size_t k) {
  if (store.empty()) throw EmptyStoreError("top_k_search: empty store");
  if (k == 0) throw Error("top_k_search: k must be >= 1");
  if (query.size() != store.dimension()) {
    throw DimensionMismatchError("top_k_search: query dim " + std::to_string(query.size()) +
                                 " vs store dim " + std::to_string(store.dimension()));
  }
  const size_t n = store.count();
  std::vector<double> scores(n);
  for (size_t i = 0; i < n; ++i) scores[i] = dot(query, store.row(i));

  const size_t out_n = std::min(k, n);
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::partial_sort(order.begin(), order.begin() + out_n, order.end(), [&](size_t a, size_t b) {
    return ranks_before(scores[a], store.id(a), scores[b], store.id(b));
  });

  RankedList out;
  out.reserve(out_n);
  for (size_t i = 0; i < out_n; ++i) out.push_back({store.id(order[i]), scores[order[i]]});
  return out;
}

}  // namespace uvre
