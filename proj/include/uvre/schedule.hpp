#pragma once

// Curriculum scheduling: per-task alignment probing, linear temperature
// annealing, and the softmax task-sampling distribution.
//
//   R_k   = mean cosine of N_p probed positive pairs under the prober
//   sigma = sigma_min + (t-1)/(T-1) * (sigma_max - sigma_min)
//   P(k) propto exp(R_k / sigma)
//
// Low sigma concentrates sampling on well-aligned tasks; annealing towards
// sigma_max flattens the distribution so harder tasks get their share late
// in training.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "uvre/embedder.hpp"
#include "uvre/errors.hpp"
#include "uvre/rng.hpp"

namespace uvre {

struct TrainExample {
  EmbeddingVector query;
  EmbeddingVector target;
  std::vector<EmbeddingVector> negatives;
};

struct TrainTask {
  std::string task_id;
  std::vector<TrainExample> examples;
};

struct TaskAlignmentProfile {
  std::string task_id;
  double r = 0.0;  // mean positive-pair cosine in [-1, 1]
  double p = 0.0;  // sampling probability
  size_t epoch = 0;
};

// Mean positive-pair cosine over min(n_probe, available) pairs sampled
// without replacement.
inline double probe_alignment(const Prober& prober, const TrainTask& task, size_t n_probe,
                              Rng& rng) {
  if (task.examples.empty()) throw EmptyTaskError("probe: task '" + task.task_id + "' is empty");
  if (n_probe < 1) throw ConfigError("probe: n_probe must be >= 1");
  const std::vector<size_t> picks =
      rng.sample_without_replacement(task.examples.size(), std::min(n_probe, task.examples.size()));
  double total = 0.0;
  for (size_t i : picks) {
    const TrainExample& ex = task.examples[i];
    total += cosine_sim(prober(ex.query), prober(ex.target));
  }
  return total / static_cast<double>(picks.size());
}

// sigma(1) = sigma_min, sigma(T) = sigma_max, linear in between. A single
// epoch stays at sigma_min.
inline double anneal_sigma(size_t t, size_t total_epochs, double sigma_min, double sigma_max) {
  if (t < 1 || t > total_epochs) throw ConfigError("anneal_sigma: epoch out of range");
  if (!(sigma_min > 0.0) || sigma_min > sigma_max) {
    throw ConfigError("anneal_sigma: need 0 < sigma_min <= sigma_max");
  }
  if (total_epochs == 1) return sigma_min;
  const double frac = static_cast<double>(t - 1) / static_cast<double>(total_epochs - 1);
  return sigma_min + frac * (sigma_max - sigma_min);
}

// Softmax with max subtraction; every task keeps nonzero probability.
inline std::vector<double> schedule_distribution(const std::vector<double>& r, double sigma) {
  if (r.empty()) throw ConfigError("schedule_distribution: no tasks");
  if (!(sigma > 0.0)) throw ConfigError("schedule_distribution: sigma must be positive");
  const double m = *std::max_element(r.begin(), r.end());
  std::vector<double> p(r.size());
  double total = 0.0;
  for (size_t i = 0; i < r.size(); ++i) {
    p[i] = std::exp((r[i] - m) / sigma);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

// Draws an index from a probability vector by CDF inversion.
inline size_t sample_index(const std::vector<double>& p, Rng& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return p.size() - 1;
}

}  // namespace uvre
