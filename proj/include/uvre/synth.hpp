#pragma once

// Data-quality cascade over feature-space video assets, plus the caption
// profile sampler and the sidecar formats used to talk to an external
// caption generator.
//
// An asset is a video surrogate: per-frame feature vectors, the original
// caption, optionally a precomputed caption embedding (for the consistency
// filter) and a pool of alternative captions. Assets arrive as JSON lines:
//   {"video_id": "...", "caption": "...", "frames": [[...], ...],
//    "caption_embedding": [...], "caption_pool": [{"style": "...", "text": "..."}]}
//
// Filter cascade, in order: annotation rectification (text heuristics),
// cross-modal consistency (cosine against a pooled video embedding under a
// filter embedder), temporal dynamics (mean consecutive-frame cosine
// distance). Per-stage drop counts always reconcile: in = out + dropped.

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "uvre/embedding.hpp"
#include "uvre/errors.hpp"
#include "uvre/io_util.hpp"
#include "uvre/rng.hpp"

namespace uvre {

struct CaptionCandidate {
  std::string style;
  std::string text;
  bool synthetic = false;
};

struct VideoAsset {
  std::string video_id;
  std::vector<EmbeddingVector> frame_features;  // >= 2 frames, equal dims
  std::string caption;
  std::optional<EmbeddingVector> caption_embedding;
  std::vector<CaptionCandidate> caption_pool;

  void validate() const {
    if (video_id.empty()) throw FormatError("asset: empty video_id");
    if (frame_features.size() < 2) {
      throw FormatError("asset '" + video_id + "': needs >= 2 frames, has " +
                        std::to_string(frame_features.size()));
    }
    const size_t d = frame_features[0].size();
    if (d == 0) throw FormatError("asset '" + video_id + "': zero-dimensional frames");
    for (const auto& f : frame_features) {
      if (f.size() != d) throw FormatError("asset '" + video_id + "': ragged frame features");
    }
    if (caption_embedding && caption_embedding->empty()) {
      throw FormatError("asset '" + video_id + "': empty caption embedding");
    }
  }
};

// ---------------------------------------------------------------------------
// Stage 1: annotation rectification
// ---------------------------------------------------------------------------

enum class DropReason { TooShort, UrlMarkup, NonAlphabetic, Boilerplate };

inline std::string to_string(DropReason r) {
  switch (r) {
    case DropReason::TooShort: return "too_short";
    case DropReason::UrlMarkup: return "url_markup";
    case DropReason::NonAlphabetic: return "non_alphabetic";
    case DropReason::Boilerplate: return "boilerplate";
  }
  return "?";
}

struct RectifyResult {
  bool keep = true;
  std::optional<DropReason> reason;
};

inline const std::set<std::string>& boilerplate_stoplist() {
  static const std::set<std::string> list = {
      "click here",          "subscribe now",        "like and subscribe",
      "no description",      "no description available", "follow us",
      "download now",        "watch more",           "copyright all rights reserved",
  };
  return list;
}

namespace detail {

inline std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline bool looks_like_url_or_markup(const std::string& token) {
  const std::string t = lowercase(token);
  if (t.rfind("http://", 0) == 0 || t.rfind("https://", 0) == 0 || t.rfind("www.", 0) == 0) {
    return true;
  }
  if (t.find("</") != std::string::npos) return true;
  if (t.size() >= 2 && t.front() == '<' && t.back() == '>') return true;
  return false;
}

}  // namespace detail

// Keeps descriptive text; drops empty/boilerplate/link-heavy captions.
inline RectifyResult rectify_annotation(const std::string& caption) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : caption) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) tokens.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) tokens.push_back(cur);

  if (tokens.size() < 3) return {false, DropReason::TooShort};

  size_t urlish = 0;
  for (const std::string& t : tokens) urlish += detail::looks_like_url_or_markup(t) ? 1 : 0;
  if (static_cast<double>(urlish) > 0.2 * static_cast<double>(tokens.size())) {
    return {false, DropReason::UrlMarkup};
  }

  size_t non_alpha = 0, total = 0;
  for (char c : caption) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    ++total;
    if (!std::isalpha(static_cast<unsigned char>(c))) ++non_alpha;
  }
  if (total > 0 && static_cast<double>(non_alpha) > 0.5 * static_cast<double>(total)) {
    return {false, DropReason::NonAlphabetic};
  }

  if (boilerplate_stoplist().count(detail::lowercase(trim(caption)))) {
    return {false, DropReason::Boilerplate};
  }
  return {true, std::nullopt};
}

// ---------------------------------------------------------------------------
// Stage 2: cross-modal consistency
// ---------------------------------------------------------------------------

// The filter embedder maps an asset's caption and its video content into one
// space. The default uses the precomputed caption embedding shipped with the
// asset and mean-pools frame features for the video side.
class ConsistencyEmbedder {
 public:
  virtual ~ConsistencyEmbedder() = default;
  virtual EmbeddingVector embed_caption(const VideoAsset& asset) const = 0;
  virtual EmbeddingVector embed_video(const VideoAsset& asset) const = 0;
};

class PooledConsistencyEmbedder final : public ConsistencyEmbedder {
 public:
  EmbeddingVector embed_caption(const VideoAsset& asset) const override {
    if (!asset.caption_embedding) {
      throw FormatError("asset '" + asset.video_id +
                        "': consistency filter needs caption_embedding");
    }
    return l2_normalize(*asset.caption_embedding);
  }
  EmbeddingVector embed_video(const VideoAsset& asset) const override {
    return mean_pool_normalized(asset.frame_features);
  }
};

inline bool consistency_filter(const VideoAsset& asset, const ConsistencyEmbedder& embedder,
                               double theta_c) {
  const EmbeddingVector cap = embedder.embed_caption(asset);
  const EmbeddingVector vid = embedder.embed_video(asset);
  if (cap.size() != vid.size()) {
    throw DimensionMismatchError("asset '" + asset.video_id + "': caption dim " +
                                 std::to_string(cap.size()) + " vs video dim " +
                                 std::to_string(vid.size()));
  }
  return cosine_sim(cap, vid) >= theta_c;
}

// ---------------------------------------------------------------------------
// Stage 3: temporal dynamics
// ---------------------------------------------------------------------------

inline double mean_consecutive_frame_distance(const VideoAsset& asset) {
  const auto& frames = asset.frame_features;
  double total = 0.0;
  for (size_t i = 0; i + 1 < frames.size(); ++i) {
    total += cosine_distance(frames[i], frames[i + 1]);
  }
  return total / static_cast<double>(frames.size() - 1);
}

// Static content has near-identical consecutive frames; keep only assets
// whose mean consecutive-frame cosine distance reaches eps_t.
inline bool temporal_dynamics_filter(const VideoAsset& asset, double eps_t) {
  return mean_consecutive_frame_distance(asset) >= eps_t;
}

// ---------------------------------------------------------------------------
// Cascade
// ---------------------------------------------------------------------------

struct CascadeConfig {
  bool rectify_enabled = true;
  bool consistency_enabled = true;
  bool dynamics_enabled = true;
  double theta_c = 0.30;  // not fixed by any protocol; tuned to split fixtures
  double eps_t = 0.05;
  const ConsistencyEmbedder* embedder = nullptr;  // defaults to pooled
};

struct DropRecord {
  std::string video_id;
  std::string stage;   // "rectify" | "consistency" | "dynamics"
  std::string detail;  // rectify reason or measured value
};

struct AssetPool {
  std::vector<VideoAsset> assets;
  size_t input_count = 0;
  std::map<std::string, size_t> stage_drops;  // stage -> count
  std::vector<DropRecord> drop_log;

  size_t dropped_total() const {
    size_t n = 0;
    for (const auto& [stage, count] : stage_drops) n += count;
    return n;
  }
};

inline AssetPool run_cascade(const std::vector<VideoAsset>& raw, const CascadeConfig& config) {
  static const PooledConsistencyEmbedder default_embedder;
  const ConsistencyEmbedder& embedder = config.embedder ? *config.embedder : default_embedder;

  AssetPool pool;
  pool.input_count = raw.size();
  pool.stage_drops = {{"rectify", 0}, {"consistency", 0}, {"dynamics", 0}};

  for (const VideoAsset& asset : raw) {
    asset.validate();
    if (config.rectify_enabled) {
      const RectifyResult r = rectify_annotation(asset.caption);
      if (!r.keep) {
        pool.stage_drops["rectify"]++;
        pool.drop_log.push_back({asset.video_id, "rectify", to_string(*r.reason)});
        continue;
      }
    }
    if (config.consistency_enabled) {
      if (!consistency_filter(asset, embedder, config.theta_c)) {
        pool.stage_drops["consistency"]++;
        pool.drop_log.push_back({asset.video_id, "consistency",
                                 "below theta_c=" + format_double(config.theta_c)});
        continue;
      }
    }
    if (config.dynamics_enabled) {
      if (!temporal_dynamics_filter(asset, config.eps_t)) {
        pool.stage_drops["dynamics"]++;
        pool.drop_log.push_back({asset.video_id, "dynamics",
                                 "mean distance " + format_double(mean_consecutive_frame_distance(asset))});
        continue;
      }
    }
    pool.assets.push_back(asset);
  }
  return pool;
}

// ---------------------------------------------------------------------------
// Caption profiles
// ---------------------------------------------------------------------------

enum class CaptionFocus { Spatial, Temporal, Other };

inline std::string to_string(CaptionFocus f) {
  switch (f) {
    case CaptionFocus::Spatial: return "spatial";
    case CaptionFocus::Temporal: return "temporal";
    case CaptionFocus::Other: return "other";
  }
  return "?";
}

inline const std::vector<std::string>& caption_styles() {
  // the five description styles requested from the caption generator
  static const std::vector<std::string> styles = {"concise", "descriptive", "abstract",
                                                  "keywords", "partial"};
  return styles;
}

struct CaptionProfile {
  CaptionFocus focus = CaptionFocus::Temporal;
  std::string style;
  std::string readability;
  std::string education_level;
};

struct ProfileTable {
  double p_spatial = 0.30;
  double p_temporal = 0.60;
  double p_other = 0.10;
  std::vector<std::string> readability_levels = {"simple", "moderate", "advanced"};
  std::vector<std::string> education_levels = {"general", "secondary", "college"};
};

inline CaptionProfile sample_caption_profile(Rng& rng, const ProfileTable& table = ProfileTable{}) {
  const double total = table.p_spatial + table.p_temporal + table.p_other;
  if (total <= 0.0) throw ConfigError("profile table: probabilities sum to zero");
  const double u = rng.uniform01() * total;
  CaptionProfile profile;
  if (u < table.p_spatial) {
    profile.focus = CaptionFocus::Spatial;
  } else if (u < table.p_spatial + table.p_temporal) {
    profile.focus = CaptionFocus::Temporal;
  } else {
    profile.focus = CaptionFocus::Other;
  }
  profile.style = caption_styles()[rng.index(caption_styles().size())];
  profile.readability = table.readability_levels[rng.index(table.readability_levels.size())];
  profile.education_level = table.education_levels[rng.index(table.education_levels.size())];
  return profile;
}

// ---------------------------------------------------------------------------
// Asset JSONL
// ---------------------------------------------------------------------------

inline VideoAsset parse_asset_json(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("asset json: ") + e.what());
  }
  VideoAsset asset;
  try {
    asset.video_id = j.at("video_id").get<std::string>();
    asset.caption = j.value("caption", std::string{});
    for (const auto& frame : j.at("frames")) {
      asset.frame_features.push_back(frame.get<EmbeddingVector>());
    }
    if (j.contains("caption_embedding")) {
      asset.caption_embedding = j["caption_embedding"].get<EmbeddingVector>();
    }
    if (j.contains("caption_pool")) {
      for (const auto& c : j["caption_pool"]) {
        asset.caption_pool.push_back(
            {c.at("style").get<std::string>(), c.at("text").get<std::string>(),
             c.value("synthetic", false)});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("asset json: ") + e.what());
  }
  asset.validate();
  return asset;
}

inline std::string asset_to_json(const VideoAsset& asset) {
  nlohmann::ordered_json j;
  j["video_id"] = asset.video_id;
  j["caption"] = asset.caption;
  j["frames"] = asset.frame_features;
  if (asset.caption_embedding) j["caption_embedding"] = *asset.caption_embedding;
  if (!asset.caption_pool.empty()) {
    nlohmann::ordered_json pool = nlohmann::ordered_json::array();
    for (const auto& c : asset.caption_pool) {
      pool.push_back({{"style", c.style}, {"text", c.text}, {"synthetic", c.synthetic}});
    }
    j["caption_pool"] = pool;
  }
  return j.dump();
}

inline std::vector<VideoAsset> read_assets_jsonl(const std::string& path) {
  std::vector<VideoAsset> assets;
  for (const std::string& line : split_lines(read_file(path))) {
    if (trim(line).empty()) continue;
    assets.push_back(parse_asset_json(line));
  }
  return assets;
}

}  // namespace uvre
