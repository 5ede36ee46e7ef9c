#pragma once

// Curriculum training loop. Each epoch: probe every task's alignment with
// the current prober (a fixed embedder for epoch 1, the previous epoch's
// checkpoint afterwards), compute the annealed softmax sampling
// distribution, then run SGD steps where each batch is drawn from a single
// sampled task. Everything is seeded and single-writer, so identical inputs
// and seed give identical logs and checkpoints.

#include <map>
#include <string>
#include <vector>

#include "uvre/io_util.hpp"
#include "uvre/loss.hpp"
#include "uvre/schedule.hpp"

namespace uvre {

struct CurriculumConfig {
  double sigma_min = 0.1;
  double sigma_max = 1.0;
  size_t epochs = 3;
  size_t probe_pairs = 256;  // N_p
  double tau = 0.03;
  size_t batch_size = 16;
  double learning_rate = 0.5;
  double weight_decay = 0.0;
  size_t steps_per_epoch = 0;  // 0: one pass worth of batches over all data
  size_t d_out = 0;            // 0: same as input dimension
  uint64_t seed = 42;
  bool uniform_schedule = false;  // bypass the curriculum (ablation baseline)
  bool probe_holdout = false;     // probe a held-out 20% slice instead of training pairs

  void validate() const {
    if (!(sigma_min > 0.0) || sigma_min > sigma_max) {
      throw ConfigError("config: need 0 < sigma_min <= sigma_max");
    }
    if (epochs < 1) throw ConfigError("config: epochs must be >= 1");
    if (probe_pairs < 1) throw ConfigError("config: probe_pairs must be >= 1");
    if (!(tau > 0.0)) throw ConfigError("config: tau must be positive");
    if (batch_size < 1) throw ConfigError("config: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("config: learning_rate must be positive");
    if (weight_decay < 0.0) throw ConfigError("config: weight_decay must be >= 0");
  }
};

struct StepLog {
  size_t step = 0;
  size_t epoch = 0;
  std::string task_id;
  double loss = 0.0;
  double mean_pos_score = 0.0;
  double mean_margin = 0.0;
};

struct EpochLog {
  size_t epoch = 0;
  double sigma = 0.0;
  std::vector<TaskAlignmentProfile> profiles;  // one per task, task order
};

struct TrainResult {
  ToyEmbedder model;
  std::vector<StepLog> steps;
  std::vector<EpochLog> epochs;
};

namespace detail {

// Probe slice: all examples, or the held-out tail 20% when requested.
inline std::pair<size_t, size_t> probe_range(size_t n, bool holdout) {
  if (!holdout || n < 5) return {0, n};
  const size_t holdout_n = std::max<size_t>(1, n / 5);
  return {n - holdout_n, n};
}

inline TrainTask probe_view(const TrainTask& task, bool holdout) {
  auto [begin, end] = probe_range(task.examples.size(), holdout);
  if (begin == 0 && end == task.examples.size()) return task;
  TrainTask view;
  view.task_id = task.task_id;
  view.examples.assign(task.examples.begin() + begin, task.examples.begin() + end);
  return view;
}

inline size_t train_count(const TrainTask& task, bool holdout) {
  return probe_range(task.examples.size(), holdout).first == 0
             ? task.examples.size()
             : probe_range(task.examples.size(), holdout).first;
}

}  // namespace detail

inline TrainResult train(const std::vector<TrainTask>& tasks, const CurriculumConfig& config,
                         const Prober& initial_prober = identity_prober()) {
  config.validate();
  if (tasks.empty()) throw ConfigError("train: no tasks");
  size_t total_examples = 0;
  size_t d_in = 0;
  for (const TrainTask& task : tasks) {
    if (task.examples.empty()) throw EmptyTaskError("train: task '" + task.task_id + "' is empty");
    total_examples += task.examples.size();
    for (const TrainExample& ex : task.examples) {
      if (d_in == 0) d_in = ex.query.size();
      if (ex.query.size() != d_in || ex.target.size() != d_in) {
        throw DimensionMismatchError("train: inconsistent feature dimensions in task '" +
                                     task.task_id + "'");
      }
    }
  }
  const size_t d_out = config.d_out == 0 ? d_in : config.d_out;
  const size_t steps_per_epoch =
      config.steps_per_epoch > 0
          ? config.steps_per_epoch
          : (total_examples + config.batch_size - 1) / config.batch_size;

  const Rng root(config.seed);
  Rng init_rng = root.derive("init");
  TrainResult result;
  result.model = ToyEmbedder::random_init(d_out, d_in, init_rng);

  size_t global_step = 0;
  for (size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const Prober prober = (epoch == 1) ? initial_prober : result.model.as_prober();

    std::vector<double> r(tasks.size());
    for (size_t k = 0; k < tasks.size(); ++k) {
      Rng probe_rng = root.derive("probe/" + std::to_string(epoch) + "/" + tasks[k].task_id);
      const TrainTask view = detail::probe_view(tasks[k], config.probe_holdout);
      r[k] = probe_alignment(prober, view, config.probe_pairs, probe_rng);
    }

    const double sigma = anneal_sigma(epoch, config.epochs, config.sigma_min, config.sigma_max);
    std::vector<double> p;
    if (config.uniform_schedule) {
      p.assign(tasks.size(), 1.0 / static_cast<double>(tasks.size()));
    } else {
      p = schedule_distribution(r, sigma);
    }

    EpochLog epoch_log;
    epoch_log.epoch = epoch;
    epoch_log.sigma = sigma;
    for (size_t k = 0; k < tasks.size(); ++k) {
      epoch_log.profiles.push_back({tasks[k].task_id, r[k], p[k], epoch});
    }
    result.epochs.push_back(epoch_log);

    Rng step_rng = root.derive("steps/" + std::to_string(epoch));
    for (size_t s = 0; s < steps_per_epoch; ++s) {
      const size_t k = sample_index(p, step_rng);
      const TrainTask& task = tasks[k];
      const size_t usable = detail::train_count(task, config.probe_holdout);
      const size_t batch_n = std::min(config.batch_size, usable);
      const std::vector<size_t> picks = step_rng.sample_without_replacement(usable, batch_n);

      TrainBatch batch;
      for (size_t idx : picks) {
        batch.queries.push_back(task.examples[idx].query);
        batch.targets.push_back(task.examples[idx].target);
        batch.negatives.push_back(task.examples[idx].negatives);
      }

      const BatchGradient g = gradient(batch, result.model, config.tau);
      std::vector<double>& w = result.model.weights();
      const double decay = 1.0 - config.learning_rate * config.weight_decay;
      for (size_t i = 0; i < w.size(); ++i) {
        w[i] = w[i] * decay - config.learning_rate * g.grad[i];
      }

      ++global_step;
      result.steps.push_back(
          {global_step, epoch, task.task_id, g.loss, g.mean_positive_score, g.mean_margin});
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Log serialization (line-delimited TSV, two record kinds)
//   step <TAB> <step> <epoch> <task_id> <loss> <mean_pos> <mean_margin>
//   epoch <TAB> <epoch> <sigma> <task:R:P;task:R:P;...>
// ---------------------------------------------------------------------------

inline std::string training_log_to_tsv(const TrainResult& result) {
  std::string out;
  size_t next_epoch = 0;
  size_t step_idx = 0;
  for (size_t epoch = 1; next_epoch < result.epochs.size(); ++epoch) {
    const EpochLog& el = result.epochs[next_epoch++];
    out += "epoch\t" + std::to_string(el.epoch) + '\t' + format_double(el.sigma) + '\t';
    std::vector<std::string> parts;
    for (const TaskAlignmentProfile& prof : el.profiles) {
      parts.push_back(prof.task_id + ":" + format_double(prof.r) + ":" + format_double(prof.p));
    }
    out += join(parts, ";") + '\n';
    while (step_idx < result.steps.size() && result.steps[step_idx].epoch == el.epoch) {
      const StepLog& sl = result.steps[step_idx++];
      out += "step\t" + std::to_string(sl.step) + '\t' + std::to_string(sl.epoch) + '\t' +
             sl.task_id + '\t' + format_double(sl.loss) + '\t' +
             format_double(sl.mean_pos_score) + '\t' + format_double(sl.mean_margin) + '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation helper for curriculum experiments: per-task R@1 with the
// trained model, targets deduplicated by exact feature equality, averaged
// over tasks.
// ---------------------------------------------------------------------------

inline double mean_retrieval_score(const ToyEmbedder& model, const std::vector<TrainTask>& tasks) {
  if (tasks.empty()) throw ConfigError("mean_retrieval_score: no tasks");
  double total = 0.0;
  for (const TrainTask& task : tasks) {
    // deduplicate targets
    std::map<EmbeddingVector, size_t> target_key;
    std::vector<std::vector<double>> target_emb;
    std::vector<size_t> example_target(task.examples.size());
    for (size_t i = 0; i < task.examples.size(); ++i) {
      auto [it, inserted] = target_key.emplace(task.examples[i].target, target_emb.size());
      if (inserted) target_emb.push_back(model.embed_double(task.examples[i].target));
      example_target[i] = it->second;
    }
    size_t hits = 0;
    for (size_t i = 0; i < task.examples.size(); ++i) {
      const std::vector<double> q = model.embed_double(task.examples[i].query);
      size_t best = 0;
      double best_score = -2.0;
      for (size_t tgt = 0; tgt < target_emb.size(); ++tgt) {
        const double s = ddot(q, target_emb[tgt]);
        if (s > best_score) {
          best_score = s;
          best = tgt;
        }
      }
      if (best == example_target[i]) ++hits;
    }
    total += static_cast<double>(hits) / static_cast<double>(task.examples.size());
  }
  return total / static_cast<double>(tasks.size());
}

}  // namespace uvre
