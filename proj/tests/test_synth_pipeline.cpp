#include <catch2/catch_amalgamated.hpp>

#include "support/oracles.hpp"
#include "uvre/assemble.hpp"
#include "uvre/mining.hpp"
#include "uvre/synth.hpp"

using namespace uvre;

namespace {

// A clean asset: descriptive caption, aligned caption embedding, moving frames.
VideoAsset clean_asset(Rng& rng, const std::string& id, size_t dim = 6, size_t frames = 4) {
  VideoAsset a;
  a.video_id = id;
  a.caption = "a person walks through the park with a dog " + id;
  for (size_t i = 0; i < frames; ++i) a.frame_features.push_back(oracle::random_unit_vector(rng, dim));
  a.caption_embedding = EmbeddingVector(mean_pool_normalized(a.frame_features));
  return a;
}

}  // namespace

TEST_CASE("rectify_annotation heuristics") {
  CHECK(rectify_annotation("a man plays guitar in a park").keep);
  SECTION("url boilerplate") {
    auto r = rectify_annotation("CLICK HERE http://example.com/watch");
    CHECK_FALSE(r.keep);
    CHECK(*r.reason == DropReason::UrlMarkup);
  }
  SECTION("empty and too short") {
    auto r = rectify_annotation("");
    CHECK_FALSE(r.keep);
    CHECK(*r.reason == DropReason::TooShort);
    CHECK_FALSE(rectify_annotation("two words").keep);
  }
  SECTION("non-alphabetic") {
    auto r = rectify_annotation("12345 67890 !!! ### 00:00:01 44 77 99");
    CHECK_FALSE(r.keep);
    CHECK(*r.reason == DropReason::NonAlphabetic);
  }
  SECTION("stop-list boilerplate") {
    auto r = rectify_annotation("like and subscribe");
    CHECK_FALSE(r.keep);
    CHECK(*r.reason == DropReason::Boilerplate);
  }
  SECTION("markup density") {
    auto r = rectify_annotation("<b>sale</b> <i>now</i> click the banner");
    CHECK_FALSE(r.keep);
    CHECK(*r.reason == DropReason::UrlMarkup);
  }
}

TEST_CASE("consistency_filter") {
  Rng rng(17);
  PooledConsistencyEmbedder embedder;

  SECTION("caption embedding equal to pooled video keeps at any theta <= 1") {
    VideoAsset a = clean_asset(rng, "veq");
    CHECK(consistency_filter(a, embedder, 1.0 - 1e-9));
  }
  SECTION("orthogonal pair drops at theta 0.3") {
    VideoAsset a;
    a.video_id = "orth";
    a.caption = "a cat sits quietly on a chair";
    a.frame_features = {{1.0f, 0.0f, 0.0f, 0.0f}, {1.0f, 0.1f, 0.0f, 0.0f}};
    a.caption_embedding = EmbeddingVector{0.0f, 0.0f, 1.0f, 0.0f};
    CHECK_FALSE(consistency_filter(a, embedder, 0.3));
  }
  SECTION("planted corpus: exactly the 20 shuffled pairs drop") {
    std::vector<VideoAsset> assets;
    std::set<std::string> shuffled_ids;
    for (int i = 0; i < 100; ++i) {
      VideoAsset a = clean_asset(rng, "p" + std::to_string(i), 8, 3);
      if (i % 5 == 0) {
        // break the pairing: caption embedding orthogonalized against the
        // pooled video embedding (sim ~ 0)
        EmbeddingVector pooled = mean_pool_normalized(a.frame_features);
        EmbeddingVector noise = oracle::random_unit_vector(rng, 8);
        const double proj = cosine_sim(l2_normalize(noise), pooled);
        EmbeddingVector orth(8);
        for (size_t d = 0; d < 8; ++d) {
          orth[d] = static_cast<float>(noise[d] - proj * pooled[d]);
        }
        a.caption_embedding = l2_normalize(orth);
        shuffled_ids.insert(a.video_id);
      } else {
        // aligned but noisy: sim ~ 0.9
        EmbeddingVector pooled = mean_pool_normalized(a.frame_features);
        EmbeddingVector jitter = oracle::random_unit_vector(rng, 8);
        EmbeddingVector cap(8);
        for (size_t d = 0; d < 8; ++d) cap[d] = static_cast<float>(pooled[d] + 0.22 * jitter[d]);
        a.caption_embedding = l2_normalize(cap);
      }
      assets.push_back(std::move(a));
    }
    CascadeConfig config;
    config.theta_c = 0.3;
    config.eps_t = 0.0;  // isolate the consistency stage
    AssetPool pool = run_cascade(assets, config);
    CHECK(pool.assets.size() == 80);
    CHECK(pool.stage_drops.at("consistency") == 20);
    CHECK(pool.stage_drops.at("rectify") == 0);
    CHECK(pool.stage_drops.at("dynamics") == 0);
    for (const DropRecord& d : pool.drop_log) {
      CHECK(shuffled_ids.count(d.video_id) == 1);
    }
  }
}

TEST_CASE("temporal_dynamics_filter") {
  SECTION("identical frames drop for any positive threshold") {
    VideoAsset a;
    a.video_id = "static";
    a.caption = "a wall stays perfectly still forever";
    a.frame_features = {{1.0f, 0.0f}, {1.0f, 0.0f}, {1.0f, 0.0f}};
    CHECK(mean_consecutive_frame_distance(a) == Catch::Approx(0.0).margin(1e-12));
    CHECK_FALSE(temporal_dynamics_filter(a, 1e-6));
  }
  SECTION("alternating orthogonal frames have mean distance 1") {
    VideoAsset a;
    a.video_id = "flip";
    a.caption = "rapid scene changes between two shots";
    a.frame_features = {{1.0f, 0.0f}, {0.0f, 1.0f}, {1.0f, 0.0f}, {0.0f, 1.0f}};
    CHECK(mean_consecutive_frame_distance(a) == Catch::Approx(1.0).margin(1e-9));
    CHECK(temporal_dynamics_filter(a, 0.05));
  }
  SECTION("known frame sequence matches hand-summed oracle") {
    VideoAsset a;
    a.video_id = "seq";
    a.caption = "gradually panning across the scene";
    a.frame_features = {{1.0f, 0.0f}, {0.8f, 0.6f}, {0.0f, 1.0f}};
    // hand-summed: d(f0,f1) = 1 - 0.8 = 0.2 ; d(f1,f2) = 1 - 0.6 = 0.4
    CHECK(mean_consecutive_frame_distance(a) == Catch::Approx((0.2 + 0.4) / 2.0).margin(1e-7));
  }
}

TEST_CASE("run_cascade attribution and conservation") {
  Rng rng(29);
  SECTION("all-clean fixture: zero drops") {
    std::vector<VideoAsset> assets;
    for (int i = 0; i < 10; ++i) assets.push_back(clean_asset(rng, "ok" + std::to_string(i)));
    AssetPool pool = run_cascade(assets, CascadeConfig{});
    CHECK(pool.assets.size() == 10);
    CHECK(pool.dropped_total() == 0);
  }
  SECTION("one violation per stage: three drops, one per stage") {
    std::vector<VideoAsset> assets;
    VideoAsset bad_caption = clean_asset(rng, "badcap");
    bad_caption.caption = "hi";
    assets.push_back(bad_caption);

    VideoAsset bad_align = clean_asset(rng, "badalign", 6);
    EmbeddingVector pooled = mean_pool_normalized(bad_align.frame_features);
    EmbeddingVector anti(6);
    for (size_t d = 0; d < 6; ++d) anti[d] = -pooled[d];
    bad_align.caption_embedding = anti;
    assets.push_back(bad_align);

    VideoAsset bad_static = clean_asset(rng, "badstatic");
    bad_static.frame_features = {bad_static.frame_features[0], bad_static.frame_features[0]};
    bad_static.caption_embedding = EmbeddingVector(mean_pool_normalized(bad_static.frame_features));
    assets.push_back(bad_static);

    assets.push_back(clean_asset(rng, "fine"));

    AssetPool pool = run_cascade(assets, CascadeConfig{});
    CHECK(pool.assets.size() == 1);
    CHECK(pool.assets[0].video_id == "fine");
    CHECK(pool.stage_drops.at("rectify") == 1);
    CHECK(pool.stage_drops.at("consistency") == 1);
    CHECK(pool.stage_drops.at("dynamics") == 1);
  }
  SECTION("conservation over 1000 randomized assets") {
    std::vector<VideoAsset> assets;
    for (int i = 0; i < 1000; ++i) {
      VideoAsset a = clean_asset(rng, "r" + std::to_string(i), 4, 3);
      const double roll = rng.uniform01();
      if (roll < 0.2) {
        a.caption = "xx";
      } else if (roll < 0.4) {
        EmbeddingVector pooled = mean_pool_normalized(a.frame_features);
        for (size_t d = 0; d < 4; ++d) pooled[d] = -pooled[d];
        a.caption_embedding = pooled;
      } else if (roll < 0.6) {
        a.frame_features = {a.frame_features[0], a.frame_features[0]};
      }
      assets.push_back(std::move(a));
    }
    CascadeConfig config;
    AssetPool pool = run_cascade(assets, config);
    CHECK(pool.input_count == 1000);
    CHECK(pool.assets.size() + pool.dropped_total() == 1000);
    CHECK(pool.drop_log.size() == pool.dropped_total());
  }
  SECTION("consistency and dynamics commute on the surviving set") {
    PooledConsistencyEmbedder embedder;
    std::vector<VideoAsset> assets;
    for (int i = 0; i < 200; ++i) {
      VideoAsset a = clean_asset(rng, "c" + std::to_string(i), 4, 3);
      if (rng.uniform01() < 0.3) {
        EmbeddingVector pooled = mean_pool_normalized(a.frame_features);
        for (size_t d = 0; d < 4; ++d) pooled[d] = -pooled[d];
        a.caption_embedding = pooled;
      }
      if (rng.uniform01() < 0.3) {
        a.frame_features = {a.frame_features[0], a.frame_features[0]};
        a.caption_embedding = EmbeddingVector(mean_pool_normalized(a.frame_features));
      }
      assets.push_back(std::move(a));
    }
    std::set<std::string> order_a, order_b;
    for (const VideoAsset& a : assets) {
      const bool cons = consistency_filter(a, embedder, 0.3);
      const bool dyn = temporal_dynamics_filter(a, 0.05);
      if (cons && dyn) order_a.insert(a.video_id);   // consistency then dynamics
      if (dyn && cons) order_b.insert(a.video_id);   // dynamics then consistency
    }
    CHECK(order_a == order_b);
  }
}

TEST_CASE("sample_caption_profile") {
  SECTION("same seed reproduces the draw sequence") {
    Rng a(1234), b(1234);
    for (int i = 0; i < 10; ++i) {
      CaptionProfile pa = sample_caption_profile(a);
      CaptionProfile pb = sample_caption_profile(b);
      CHECK(to_string(pa.focus) == to_string(pb.focus));
      CHECK(pa.style == pb.style);
      CHECK(pa.readability == pb.readability);
      CHECK(pa.education_level == pb.education_level);
    }
  }
  SECTION("focus frequencies converge to 0.30 / 0.60 / 0.10") {
    Rng rng(777);
    std::map<std::string, size_t> counts;
    const int n = 100000;
    for (int i = 0; i < n; ++i) counts[to_string(sample_caption_profile(rng).focus)]++;
    CHECK(static_cast<double>(counts["spatial"]) / n == Catch::Approx(0.30).margin(0.01));
    CHECK(static_cast<double>(counts["temporal"]) / n == Catch::Approx(0.60).margin(0.01));
    CHECK(static_cast<double>(counts["other"]) / n == Catch::Approx(0.10).margin(0.01));
  }
  SECTION("zero-probability focus never drawn") {
    Rng rng(55);
    ProfileTable table;
    table.p_spatial = 0.0;
    table.p_temporal = 1.0;
    table.p_other = 0.0;
    for (int i = 0; i < 5000; ++i) {
      CHECK(sample_caption_profile(rng, table).focus == CaptionFocus::Temporal);
    }
  }
}

namespace {

// Pool + responses able to derive a 1/1000-scaled canonical task mix.
struct MixFixture {
  AssetPool pool;
  std::vector<CaptionResponse> responses;
};

MixFixture build_mix_fixture(uint64_t seed, size_t n_assets = 120, size_t frames = 8) {
  Rng rng(seed);
  MixFixture fx;
  for (size_t i = 0; i < n_assets; ++i) {
    VideoAsset a = clean_asset(rng, "vid" + std::to_string(i), 6, frames);
    a.caption_pool.push_back({"original", a.caption, false});
    for (int c = 1; c < 8; ++c) {
      a.caption_pool.push_back({caption_styles()[c % 5],
                                "synthetic caption " + std::to_string(c) + " for video " +
                                    std::to_string(i),
                                true});
    }
    for (size_t f = 0; f < frames; ++f) {
      fx.responses.push_back({frame_ref(a.video_id, f), "concise",
                              "frame level caption " + std::to_string(f) + " of " + a.video_id});
      fx.responses.push_back({frame_ref(a.video_id, f), "query-composed",
                              "the subject from the reference frame continues the action"});
    }
    for (const ClipSpec& c : enumerate_clips(a, 4, 4)) {
      fx.responses.push_back({clip_ref(a.video_id, c.start, c.end), "query-composed",
                              "what happens after the reference clip ends"});
    }
    fx.pool.assets.push_back(std::move(a));
  }
  fx.pool.input_count = n_assets;
  return fx;
}

}  // namespace

TEST_CASE("assemble_instances") {
  SECTION("smallest T2T case: one asset, five captions, two instances") {
    AssetPool pool;
    VideoAsset a;
    a.video_id = "solo";
    a.caption = "a chef prepares dinner in a kitchen";
    a.frame_features = {{1.0f, 0.0f}, {0.0f, 1.0f}};
    for (int i = 0; i < 5; ++i) {
      a.caption_pool.push_back({"concise", "caption variant " + std::to_string(i), i > 0});
    }
    pool.assets.push_back(a);
    pool.input_count = 1;

    MixConfig mix;
    mix.counts[TaskType::T2T] = 2;
    auto instances = assemble_instances(pool, mix, {}, Rng(5));
    REQUIRE(instances.size() == 2);
    for (const auto& inst : instances) {
      CHECK(inst.task_type == TaskType::T2T);
      REQUIRE(inst.query_text.has_value());
      // positive is a text ref into the same asset's caption pool
      REQUIRE(inst.positive_ref.rfind("solo#t", 0) == 0);
      const size_t target_idx = std::stoul(inst.positive_ref.substr(6));
      CHECK(*inst.query_text != a.caption_pool[target_idx].text);
    }
  }

  SECTION("I2V instance references one frame and its source video") {
    Rng rng(3);
    AssetPool pool;
    pool.assets.push_back(clean_asset(rng, "v8", 6, 8));
    pool.input_count = 1;
    MixConfig mix;
    mix.counts[TaskType::I2V] = 3;
    auto instances = assemble_instances(pool, mix, {}, Rng(6));
    REQUIRE(instances.size() == 3);
    for (const auto& inst : instances) {
      CHECK_FALSE(inst.query_text.has_value());
      REQUIRE(inst.query_visual_ref.has_value());
      CHECK(inst.query_visual_ref->rfind("v8#f", 0) == 0);
      CHECK(inst.positive_ref == "v8");
    }
  }

  SECTION("canonical mix at 1/1000 scale: emitted counts exact") {
    MixFixture fx = build_mix_fixture(99);
    MixConfig mix;
    mix.counts = {{TaskType::T2V, 879}, {TaskType::I2V, 200}, {TaskType::T2T, 100},
                  {TaskType::TI2V, 89}, {TaskType::V2V, 36},  {TaskType::TV2V, 35},
                  {TaskType::T2I, 210}};
    AssemblyStats stats;
    auto instances = assemble_instances(fx.pool, mix, fx.responses, Rng(42), &stats);
    CHECK(instances.size() == 879 + 200 + 100 + 89 + 36 + 35 + 210);
    CHECK(stats.emitted.at(TaskType::T2V) == 879);
    CHECK(stats.emitted.at(TaskType::I2V) == 200);
    CHECK(stats.emitted.at(TaskType::T2T) == 100);
    CHECK(stats.emitted.at(TaskType::TI2V) == 89);
    CHECK(stats.emitted.at(TaskType::V2V) == 36);
    CHECK(stats.emitted.at(TaskType::TV2V) == 35);
    CHECK(stats.emitted.at(TaskType::T2I) == 210);
    CHECK(stats.original_caption_queries > 0);
    CHECK(stats.synthetic_caption_queries > 0);

    std::map<TaskType, size_t> seen;
    for (const auto& inst : instances) {
      inst.validate();
      seen[inst.task_type]++;
      if (inst.task_type == TaskType::TI2V || inst.task_type == TaskType::TV2V) {
        CHECK(inst.query_text.has_value());
        CHECK(inst.query_visual_ref.has_value());
      }
    }
    CHECK(seen == mix.counts);
  }

  SECTION("byte-identical manifests under the same seed") {
    MixFixture fx = build_mix_fixture(7);
    MixConfig mix;
    mix.counts = {{TaskType::T2V, 50}, {TaskType::I2V, 20}, {TaskType::T2T, 10}};
    const std::string a = instances_to_tsv(assemble_instances(fx.pool, mix, fx.responses, Rng(1)));
    const std::string b = instances_to_tsv(assemble_instances(fx.pool, mix, fx.responses, Rng(1)));
    const std::string c = instances_to_tsv(assemble_instances(fx.pool, mix, fx.responses, Rng(2)));
    CHECK(a == b);
    CHECK(a != c);
  }

  SECTION("requesting one task type does not perturb another's draw") {
    MixFixture fx = build_mix_fixture(8);
    MixConfig only;
    only.counts = {{TaskType::T2V, 40}};
    MixConfig both;
    both.counts = {{TaskType::T2V, 40}, {TaskType::I2V, 25}};
    auto a = assemble_instances(fx.pool, only, fx.responses, Rng(5));
    auto b = assemble_instances(fx.pool, both, fx.responses, Rng(5));
    REQUIRE(a.size() == 40);
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].positive_ref == b[i].positive_ref);
      CHECK(a[i].query_text == b[i].query_text);
    }
  }

  SECTION("typed failures") {
    MixFixture fx = build_mix_fixture(9, 2, 4);
    MixConfig mix;
    mix.counts = {{TaskType::V2V, 100}};  // only 2 clips derivable
    CHECK_THROWS_AS(assemble_instances(fx.pool, mix, fx.responses, Rng(1)),
                    InsufficientAssetsError);

    MixConfig needs_captions;
    needs_captions.counts = {{TaskType::TI2V, 1}};
    CHECK_THROWS_AS(assemble_instances(fx.pool, needs_captions, {}, Rng(1)),
                    MissingCaptionerOutputError);

    AssetPool empty;
    CHECK_THROWS_AS(assemble_instances(empty, mix, {}, Rng(1)), InsufficientAssetsError);
  }

  SECTION("instance manifest TSV round-trips") {
    MixFixture fx = build_mix_fixture(10, 6, 4);
    MixConfig mix;
    mix.counts = {{TaskType::T2V, 12}, {TaskType::TV2V, 3}};
    auto instances = assemble_instances(fx.pool, mix, fx.responses, Rng(77));
    const std::string tsv = instances_to_tsv(instances);
    auto back = parse_instances_tsv(tsv);
    REQUIRE(back.size() == instances.size());
    for (size_t i = 0; i < back.size(); ++i) {
      CHECK(back[i].instance_id == instances[i].instance_id);
      CHECK(back[i].task_type == instances[i].task_type);
      CHECK(back[i].query_text == instances[i].query_text);
      CHECK(back[i].query_visual_ref == instances[i].query_visual_ref);
      CHECK(back[i].positive_ref == instances[i].positive_ref);
    }
  }
}

TEST_CASE("enrich_caption_pools folds accepted synthetic captions in") {
  Rng rng(30);
  AssetPool pool;
  pool.assets.push_back(clean_asset(rng, "ev"));
  pool.input_count = 1;
  std::vector<CaptionResponse> responses = {
      {"ev", "descriptive", "a long and detailed account of the scene unfolding"},
      {"ev", "keywords", "xx"},  // fails rectification, must be skipped
      {"ev#f0", "concise", "a frame caption that must not join the video pool"},
  };
  enrich_caption_pools(pool, responses);
  REQUIRE(pool.assets[0].caption_pool.size() == 2);
  CHECK(pool.assets[0].caption_pool[0].text == pool.assets[0].caption);
  CHECK_FALSE(pool.assets[0].caption_pool[0].synthetic);
  CHECK(pool.assets[0].caption_pool[1].style == "descriptive");
  CHECK(pool.assets[0].caption_pool[1].synthetic);
}

TEST_CASE("mine_hard_negatives") {
  Rng rng(31);
  SECTION("K = 0 leaves the instance unchanged") {
    auto corpus = EmbeddingStore::from_rows({"a", "b"},
                                            {EmbeddingVector{1.0f, 0.0f}, EmbeddingVector{0.0f, 1.0f}});
    CHECK(mine_hard_negatives(std::vector<float>{1.0f, 0.0f}, corpus, 0, {}).empty());
  }
  SECTION("positive excluded, lone distractor returned") {
    auto corpus = EmbeddingStore::from_rows({"pos", "distractor"},
                                            {EmbeddingVector{1.0f, 0.0f}, EmbeddingVector{0.6f, 0.8f}});
    TrainingInstance inst;
    inst.instance_id = "i";
    inst.task_type = TaskType::I2V;
    inst.query_visual_ref = "q";
    inst.positive_ref = "pos";
    auto mined = with_hard_negatives(inst, std::vector<float>{1.0f, 0.0f}, corpus, 2);
    REQUIRE(mined.hard_negatives.size() == 1);
    CHECK(mined.hard_negatives[0] == "distractor");
  }
  SECTION("100-item corpus, K = 3, matches full-sort-then-exclude oracle") {
    for (int rep = 0; rep < 25; ++rep) {
      std::vector<std::string> ids;
      std::vector<EmbeddingVector> rows;
      for (int i = 0; i < 100; ++i) {
        ids.push_back("c" + std::to_string(i));
        rows.push_back(oracle::random_unit_vector(rng, 8));
      }
      auto corpus = EmbeddingStore::from_rows(ids, rows);
      std::vector<float> q = oracle::random_unit_vector(rng, 8);
      std::set<std::string> relevant;
      for (int i = 0; i < 5; ++i) relevant.insert("c" + std::to_string(rng.index(100)));

      auto got = mine_hard_negatives(q, corpus, 3, relevant);

      auto ranked = oracle::full_sort_ranking(q, corpus);
      std::vector<std::string> want;
      for (const auto& [id, score] : ranked) {
        if (relevant.count(id)) continue;
        want.push_back(id);
        if (want.size() == 3) break;
      }
      CHECK(got == want);
    }
  }
}
