#pragma once

// Scores one task: exact top-K search per query, metric indicator per query,
// mean over queries. Queries are independent, so they can be scored on
// worker threads; indicators land in a per-query slot vector and are reduced
// in a fixed order, which keeps the result identical for any worker count.

#include <thread>
#include <vector>

#include "uvre/metrics.hpp"
#include "uvre/search.hpp"
#include "uvre/task.hpp"

namespace uvre {

struct DatasetScore {
  std::string task_id;
  Metric metric = Metric::Recall1;
  double value = 0.0;  // mean of per-query {0,1} indicators
  size_t query_count = 0;
};

inline DatasetScore evaluate_task(const EmbeddingStore& queries, const EmbeddingStore& corpus,
                                  const RetrievalTask& task, unsigned workers = 1) {
  validate_task(task, queries, corpus);
  const size_t cutoff = metric_cutoff(task.metric);

  std::vector<const std::string*> qids;
  std::vector<const std::set<std::string>*> rels;
  qids.reserve(task.relevance.size());
  for (const auto& [qid, rel] : task.relevance) {
    qids.push_back(&qid);
    rels.push_back(&rel);
  }

  const size_t n = qids.size();
  std::vector<int> indicators(n, 0);
  auto score_range = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const RankedList ranking = top_k_search(queries.vector_of(*qids[i]), corpus, cutoff);
      indicators[i] = metric_indicator(task.metric, ranking, *rels[i]);
    }
  };

  if (workers <= 1 || n < 2) {
    score_range(0, n);
  } else {
    const size_t nthreads = std::min<size_t>(workers, n);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    const size_t chunk = (n + nthreads - 1) / nthreads;
    for (size_t t = 0; t < nthreads; ++t) {
      const size_t begin = t * chunk;
      const size_t end = std::min(n, begin + chunk);
      if (begin < end) pool.emplace_back(score_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  long hits = 0;
  for (int v : indicators) hits += v;

  DatasetScore score;
  score.task_id = task.task_id;
  score.metric = task.metric;
  score.query_count = n;
  score.value = static_cast<double>(hits) / static_cast<double>(n);
  return score;
}

}  // namespace uvre
