#pragma once

// Shared training fixtures for the curriculum experiments.

#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "uvre/rng.hpp"
#include "uvre/schedule.hpp"
#include "uvre/trainer.hpp"

namespace fixtures {

// Two cross-view alignment tasks over one latent item set. The feature
// space is three disjoint 8-dim blocks: queries of both tasks live in block
// V1, easy targets in block V2, hard targets in block V3. Both tasks share
// the query view, so organizing V1 on the clean easy task is a foundation
// the hard task can anchor to; the hard task's targets carry heavy feature
// noise, which is what makes its starting alignment low.
// Trained with a 6-dim output (see two_task_config): the projection cannot
// represent all three views losslessly, so how capacity is allocated over
// training order matters.
struct TwoTaskFixture {
  std::vector<uvre::TrainTask> tasks;       // [0] easy, [1] hard
  std::vector<uvre::TrainTask> eval_tasks;  // held-out pairs, same latents
  size_t d_in = 24;
};

inline TwoTaskFixture build_two_task_fixture(uint64_t seed, size_t n_items = 64,
                                             double hard_noise = 0.9) {
  TwoTaskFixture fx;
  uvre::Rng rng(seed);
  const size_t latent_dim = 8;

  std::vector<std::vector<float>> latents;
  for (size_t i = 0; i < n_items; ++i) {
    latents.push_back(oracle::random_unit_vector(rng, latent_dim));
  }

  // Places a latent into one of the three view blocks with per-coordinate
  // uniform noise.
  auto lift = [&](const std::vector<float>& latent, size_t block, double noise, uvre::Rng& r) {
    uvre::EmbeddingVector v(fx.d_in, 0.0f);
    for (size_t i = 0; i < latent_dim; ++i) {
      v[block * latent_dim + i] =
          latent[i] + static_cast<float>((r.uniform01() * 2.0 - 1.0) * noise);
    }
    return v;
  };

  uvre::TrainTask easy;
  easy.task_id = "easy";
  uvre::TrainTask hard;
  hard.task_id = "hard";
  for (size_t item = 0; item < n_items; ++item) {
    uvre::TrainExample ex;
    ex.query = lift(latents[item], 0, 0.05, rng);
    ex.target = lift(latents[item], 1, 0.05, rng);
    easy.examples.push_back(std::move(ex));

    uvre::TrainExample hx;
    hx.query = lift(latents[item], 0, 0.05, rng);
    hx.target = lift(latents[item], 2, hard_noise, rng);
    hard.examples.push_back(std::move(hx));
  }
  fx.tasks = {easy, hard};

  // Held-out evaluation: one fresh, correctly-paired target per item (the
  // retrieval corpus) and three fresh queries per item pointing at it.
  uvre::TrainTask easy_eval;
  easy_eval.task_id = "easy";
  uvre::TrainTask hard_eval;
  hard_eval.task_id = "hard";
  for (size_t item = 0; item < n_items; ++item) {
    const uvre::EmbeddingVector easy_target = lift(latents[item], 1, 0.05, rng);
    const uvre::EmbeddingVector hard_target = lift(latents[item], 2, hard_noise, rng);
    for (int rep = 0; rep < 3; ++rep) {
      uvre::TrainExample ex;
      ex.query = lift(latents[item], 0, 0.05, rng);
      ex.target = easy_target;
      easy_eval.examples.push_back(std::move(ex));

      uvre::TrainExample hx;
      hx.query = lift(latents[item], 0, 0.05, rng);
      hx.target = hard_target;
      hard_eval.examples.push_back(std::move(hx));
    }
  }
  fx.eval_tasks = {easy_eval, hard_eval};
  return fx;
}

// The "strong off-the-shelf" prober for the epoch-1 probe: a fixed linear
// map that pools the three view blocks, so it scores cross-view pairs the
// way a pretrained general embedder would. Shipped as a ToyEmbedder so it
// can round-trip through checkpoint files.
inline uvre::ToyEmbedder build_pooling_prober(size_t d_in = 24, size_t latent_dim = 8) {
  uvre::ToyEmbedder prober(latent_dim, d_in);
  for (size_t r = 0; r < latent_dim; ++r) {
    for (size_t block = 0; block < d_in / latent_dim; ++block) {
      prober.at(r, block * latent_dim + r) = 1.0;
    }
  }
  return prober;
}

inline uvre::CurriculumConfig two_task_config(uint64_t seed) {
  uvre::CurriculumConfig config;
  config.epochs = 3;
  config.sigma_min = 0.1;
  config.sigma_max = 1.0;
  config.probe_pairs = 64;
  config.tau = 0.05;
  config.batch_size = 16;
  config.learning_rate = 0.45;
  config.steps_per_epoch = 24;
  config.d_out = 6;
  config.seed = seed;
  return config;
}

// A single linearly separable task: one clean positive pair per item, so a
// batch never contains duplicate targets and the loss can approach zero.
inline uvre::TrainTask build_separable_task(uint64_t seed, size_t n_items = 32, size_t d = 12) {
  uvre::Rng rng(seed);
  uvre::TrainTask task;
  task.task_id = "separable";
  for (size_t i = 0; i < n_items; ++i) {
    auto u = oracle::random_unit_vector(rng, d);
    uvre::TrainExample ex;
    ex.query = u;
    ex.target = u;
    for (auto& x : ex.query) x += static_cast<float>((rng.uniform01() - 0.5) * 0.02);
    for (auto& x : ex.target) x += static_cast<float>((rng.uniform01() - 0.5) * 0.02);
    task.examples.push_back(std::move(ex));
  }
  return task;
}

}  // namespace fixtures
