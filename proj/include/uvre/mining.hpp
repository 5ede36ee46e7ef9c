#pragma once

// Hard-negative mining: the top-K corpus items by prober similarity that are
// not relevant to the query. K = 0 means in-batch negatives only and leaves
// the instance untouched.

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "uvre/assemble.hpp"
#include "uvre/search.hpp"
#include "uvre/store.hpp"

namespace uvre {

inline std::vector<std::string> mine_hard_negatives(std::span<const float> query_embedding,
                                                    const EmbeddingStore& corpus, size_t k,
                                                    const std::set<std::string>& relevant) {
  if (k == 0) return {};
  if (corpus.empty()) return {};
  if (query_embedding.size() != corpus.dimension()) {
    throw DimensionMismatchError("mine_hard_negatives: query dim " +
                                 std::to_string(query_embedding.size()) + " vs corpus dim " +
                                 std::to_string(corpus.dimension()));
  }

  std::vector<size_t> eligible;
  eligible.reserve(corpus.count());
  for (size_t i = 0; i < corpus.count(); ++i) {
    if (!relevant.count(corpus.id(i))) eligible.push_back(i);
  }
  std::vector<double> scores(corpus.count());
  for (size_t i : eligible) scores[i] = dot(query_embedding, corpus.row(i));

  const size_t take = std::min(k, eligible.size());
  std::partial_sort(eligible.begin(), eligible.begin() + take, eligible.end(),
                    [&](size_t a, size_t b) {
                      return ranks_before(scores[a], corpus.id(a), scores[b], corpus.id(b));
                    });

  std::vector<std::string> out;
  out.reserve(take);
  for (size_t i = 0; i < take; ++i) out.push_back(corpus.id(eligible[i]));
  return out;
}

// Attaches mined negatives to an instance, excluding everything relevant to
// the query (the positive always counts as relevant).
inline TrainingInstance with_hard_negatives(TrainingInstance instance,
                                            std::span<const float> query_embedding,
                                            const EmbeddingStore& corpus, size_t k,
                                            std::set<std::string> relevant = {}) {
  relevant.insert(instance.positive_ref);
  instance.hard_negatives = mine_hard_negatives(query_embedding, corpus, k, relevant);
  instance.validate();
  return instance;
}

}  // namespace uvre
