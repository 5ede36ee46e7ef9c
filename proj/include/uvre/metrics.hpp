#pragma once

// Per-query hit indicators. All metrics here are {0,1}-valued; dataset
// scores are plain means of these indicators.

#include <set>
#include <string>

#include "uvre/search.hpp"
#include "uvre/taxonomy.hpp"

namespace uvre {

// 1 iff any relevant id appears in the top min(k, |ranking|) entries.
inline int recall_at_k(const RankedList& ranking, const std::set<std::string>& relevant, size_t k) {
  const size_t cutoff = std::min(k, ranking.size());
  for (size_t i = 0; i < cutoff; ++i) {
    if (relevant.count(ranking[i].id)) return 1;
  }
  return 0;
}

// 1 iff the rank-1 id is relevant.
inline int precision_at_1(const RankedList& ranking, const std::set<std::string>& relevant) {
  if (ranking.empty()) return 0;
  return relevant.count(ranking[0].id) ? 1 : 0;
}

inline int metric_indicator(Metric metric, const RankedList& ranking,
                            const std::set<std::string>& relevant) {
  switch (metric) {
    case Metric::Recall1: return recall_at_k(ranking, relevant, 1);
    case Metric::Recall10: return recall_at_k(ranking, relevant, 10);
    case Metric::Precision1: return precision_at_1(ranking, relevant);
  }
  return 0;
}

}  // namespace uvre
