#pragma once

// Multi-task training-instance assembly over a filtered asset pool, plus the
// sidecar formats that connect the pipeline to an external caption
// generator.
//
// Item references:
//   video  <video_id>
//   frame  <video_id>#f<index>
//   clip   <video_id>#c<start>-<end>     (frame range, end exclusive)
//   text   <video_id>#t<index>           (caption_pool entry)
//
// Caption-request sidecar, one TSV record per line:
//   ref  focus  style  readability  education_level  template_id
// Caption-response sidecar:
//   ref  style  text
// Template ids: video_caption, frame_caption, composed_frame_query,
// composed_clip_query.
//
// Instance manifest, one TSV record per line:
//   instance_id  task_type  query_text|-  query_visual_ref|-  positive_ref
//   negatives(comma-joined)|-

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "uvre/rng.hpp"
#include "uvre/synth.hpp"

namespace uvre {

enum class TaskType { T2T, T2I, T2V, TI2V, TV2V, I2V, V2V };

inline const std::vector<TaskType>& all_task_types() {
  static const std::vector<TaskType> types = {TaskType::T2T,  TaskType::T2I, TaskType::T2V,
                                              TaskType::TI2V, TaskType::TV2V, TaskType::I2V,
                                              TaskType::V2V};
  return types;
}

inline std::string to_string(TaskType t) {
  switch (t) {
    case TaskType::T2T: return "T2T";
    case TaskType::T2I: return "T2I";
    case TaskType::T2V: return "T2V";
    case TaskType::TI2V: return "TI2V";
    case TaskType::TV2V: return "TV2V";
    case TaskType::I2V: return "I2V";
    case TaskType::V2V: return "V2V";
  }
  return "?";
}

inline TaskType parse_task_type(const std::string& s) {
  for (TaskType t : all_task_types()) {
    if (to_string(t) == s) return t;
  }
  throw FormatError("unknown task type '" + s + "'");
}

struct TrainingInstance {
  std::string instance_id;
  TaskType task_type = TaskType::T2V;
  std::optional<std::string> query_text;
  std::optional<std::string> query_visual_ref;
  std::string positive_ref;
  std::vector<std::string> hard_negatives;

  void validate() const {
    if (!query_text && !query_visual_ref) {
      throw IntegrityError("instance '" + instance_id + "': query has no parts");
    }
    if ((task_type == TaskType::TI2V || task_type == TaskType::TV2V) &&
        (!query_text || !query_visual_ref)) {
      throw IntegrityError("instance '" + instance_id + "': composed query needs both parts");
    }
    for (const std::string& n : hard_negatives) {
      if (n == positive_ref) {
        throw IntegrityError("instance '" + instance_id + "': positive listed as hard negative");
      }
    }
  }
};

inline std::string frame_ref(const std::string& video_id, size_t index) {
  return video_id + "#f" + std::to_string(index);
}

inline std::string clip_ref(const std::string& video_id, size_t start, size_t end) {
  return video_id + "#c" + std::to_string(start) + "-" + std::to_string(end);
}

inline std::string text_ref(const std::string& video_id, size_t index) {
  return video_id + "#t" + std::to_string(index);
}

// Contiguous frame windows acting as clips.
struct ClipSpec {
  size_t start = 0;
  size_t end = 0;  // exclusive
};

inline std::vector<ClipSpec> enumerate_clips(const VideoAsset& asset, size_t clip_len,
                                             size_t clip_stride) {
  std::vector<ClipSpec> clips;
  if (clip_len < 1 || clip_stride < 1) throw ConfigError("clip_len and clip_stride must be >= 1");
  const size_t n = asset.frame_features.size();
  for (size_t start = 0; start + clip_len <= n; start += clip_stride) {
    clips.push_back({start, start + clip_len});
  }
  return clips;
}

// ---------------------------------------------------------------------------
// Caption sidecars
// ---------------------------------------------------------------------------

struct CaptionRequest {
  std::string ref;
  CaptionProfile profile;
  std::string template_id;
};

struct CaptionResponse {
  std::string ref;
  std::string style;
  std::string text;
};

inline std::string caption_requests_to_tsv(const std::vector<CaptionRequest>& requests) {
  std::string out;
  for (const CaptionRequest& r : requests) {
    out += r.ref + '\t' + to_string(r.profile.focus) + '\t' + r.profile.style + '\t' +
           r.profile.readability + '\t' + r.profile.education_level + '\t' + r.template_id + '\n';
  }
  return out;
}

inline std::vector<CaptionResponse> parse_caption_responses(const std::string& tsv) {
  std::vector<CaptionResponse> out;
  size_t lineno = 0;
  for (const std::string& line : split_lines(tsv)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 3) {
      throw FormatError("caption response line " + std::to_string(lineno) + ": expected 3 fields");
    }
    out.push_back({f[0], f[1], f[2]});
  }
  return out;
}

// One caption request per asset for enrichment, one per frame, and one
// composed-query request per frame and clip. Profiles are drawn from the
// seeded sampler, so request files are reproducible.
struct RequestPlan {
  bool video_captions = true;
  bool frame_captions = true;
  bool composed_queries = true;
  size_t captions_per_video = 2;
  size_t clip_len = 4;
  size_t clip_stride = 4;
};

inline std::vector<CaptionRequest> emit_caption_requests(const AssetPool& pool,
                                                         const RequestPlan& plan, Rng& rng) {
  std::vector<CaptionRequest> out;
  for (const VideoAsset& asset : pool.assets) {
    if (plan.video_captions) {
      for (size_t i = 0; i < plan.captions_per_video; ++i) {
        out.push_back({asset.video_id, sample_caption_profile(rng), "video_caption"});
      }
    }
    if (plan.frame_captions) {
      for (size_t f = 0; f < asset.frame_features.size(); ++f) {
        out.push_back({frame_ref(asset.video_id, f), sample_caption_profile(rng), "frame_caption"});
      }
    }
    if (plan.composed_queries) {
      for (size_t f = 0; f < asset.frame_features.size(); ++f) {
        out.push_back(
            {frame_ref(asset.video_id, f), sample_caption_profile(rng), "composed_frame_query"});
      }
      for (const ClipSpec& c : enumerate_clips(asset, plan.clip_len, plan.clip_stride)) {
        out.push_back({clip_ref(asset.video_id, c.start, c.end), sample_caption_profile(rng),
                       "composed_clip_query"});
      }
    }
  }
  return out;
}

// Folds accepted synthetic video captions back into each asset's caption
// pool; the original caption stays in slot 0. Rejected captions (rectify
// heuristics) are skipped.
inline void enrich_caption_pools(AssetPool& pool, const std::vector<CaptionResponse>& responses) {
  std::map<std::string, std::vector<const CaptionResponse*>> by_video;
  for (const CaptionResponse& r : responses) {
    if (r.ref.find('#') == std::string::npos) by_video[r.ref].push_back(&r);
  }
  for (VideoAsset& asset : pool.assets) {
    const bool original_present =
        !asset.caption_pool.empty() && asset.caption_pool[0].text == asset.caption;
    if (!original_present && !asset.caption.empty()) {
      asset.caption_pool.insert(asset.caption_pool.begin(), {"original", asset.caption, false});
    }
    auto it = by_video.find(asset.video_id);
    if (it == by_video.end()) continue;
    for (const CaptionResponse* r : it->second) {
      if (rectify_annotation(r->text).keep) {
        asset.caption_pool.push_back({r->style, r->text, true});
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

struct MixConfig {
  std::map<TaskType, size_t> counts;
  size_t clip_len = 4;
  size_t clip_stride = 4;
};

struct AssemblyStats {
  std::map<TaskType, size_t> emitted;
  size_t original_caption_queries = 0;
  size_t synthetic_caption_queries = 0;
};

namespace detail {

struct Candidate {
  std::optional<std::string> query_text;
  std::optional<std::string> query_visual_ref;
  std::string positive_ref;
  bool synthetic_text = false;
};

// Deterministic candidate enumeration per task type: assets in pool order,
// frames/clips ascending, captions in pool order.
inline std::vector<Candidate> enumerate_candidates(
    TaskType type, const AssetPool& pool,
    const std::map<std::string, std::vector<const CaptionResponse*>>& frame_caps,
    const std::map<std::string, std::vector<const CaptionResponse*>>& composed, const MixConfig& mix) {
  std::vector<Candidate> out;
  for (const VideoAsset& asset : pool.assets) {
    const std::vector<ClipSpec> clips = enumerate_clips(asset, mix.clip_len, mix.clip_stride);
    switch (type) {
      case TaskType::T2T:
        for (size_t i = 0; i < asset.caption_pool.size(); ++i) {
          for (size_t j = 0; j < asset.caption_pool.size(); ++j) {
            if (i == j || asset.caption_pool[i].text == asset.caption_pool[j].text) continue;
            out.push_back({asset.caption_pool[i].text, std::nullopt, text_ref(asset.video_id, j),
                           asset.caption_pool[i].synthetic});
          }
        }
        break;
      case TaskType::T2I:
        for (size_t f = 0; f < asset.frame_features.size(); ++f) {
          auto it = frame_caps.find(frame_ref(asset.video_id, f));
          if (it == frame_caps.end()) continue;
          for (const CaptionResponse* r : it->second) {
            out.push_back({r->text, std::nullopt, frame_ref(asset.video_id, f), true});
          }
        }
        break;
      case TaskType::T2V:
        for (const CaptionCandidate& c : asset.caption_pool) {
          out.push_back({c.text, std::nullopt, asset.video_id, c.synthetic});
        }
        break;
      case TaskType::TI2V:
        for (size_t f = 0; f < asset.frame_features.size(); ++f) {
          auto it = composed.find(frame_ref(asset.video_id, f));
          if (it == composed.end()) continue;
          for (const CaptionResponse* r : it->second) {
            out.push_back({r->text, frame_ref(asset.video_id, f), asset.video_id, true});
          }
        }
        break;
      case TaskType::TV2V:
        for (const ClipSpec& c : clips) {
          auto it = composed.find(clip_ref(asset.video_id, c.start, c.end));
          if (it == composed.end()) continue;
          for (const CaptionResponse* r : it->second) {
            out.push_back({r->text, clip_ref(asset.video_id, c.start, c.end), asset.video_id, true});
          }
        }
        break;
      case TaskType::I2V:
        for (size_t f = 0; f < asset.frame_features.size(); ++f) {
          out.push_back({std::nullopt, frame_ref(asset.video_id, f), asset.video_id, false});
        }
        break;
      case TaskType::V2V:
        for (const ClipSpec& c : clips) {
          out.push_back({std::nullopt, clip_ref(asset.video_id, c.start, c.end), asset.video_id,
                         false});
        }
        break;
    }
  }
  return out;
}

inline bool needs_captioner(TaskType type) {
  return type == TaskType::T2I || type == TaskType::TI2V || type == TaskType::TV2V;
}

}  // namespace detail

// Emits exactly the requested number of instances per task type, drawn as a
// seeded uniform sample over the derivable candidates of that type.
inline std::vector<TrainingInstance> assemble_instances(
    const AssetPool& pool, const MixConfig& mix, const std::vector<CaptionResponse>& responses,
    const Rng& base_rng, AssemblyStats* stats = nullptr) {
  size_t total_requested = 0;
  for (const auto& [type, count] : mix.counts) total_requested += count;
  if (pool.assets.empty() && total_requested > 0) {
    throw InsufficientAssetsError("assemble: empty asset pool");
  }

  std::map<std::string, std::vector<const CaptionResponse*>> frame_caps;
  std::map<std::string, std::vector<const CaptionResponse*>> composed;
  bool any_frame_caps = false, any_composed = false;
  for (const CaptionResponse& r : responses) {
    if (r.ref.find("#f") != std::string::npos) {
      // frame refs serve both frame captions (T2I) and composed queries
      // (TI2V); disambiguate by style tag prefix "query" for composed.
      if (r.style.rfind("query", 0) == 0) {
        composed[r.ref].push_back(&r);
        any_composed = true;
      } else {
        frame_caps[r.ref].push_back(&r);
        any_frame_caps = true;
      }
    } else if (r.ref.find("#c") != std::string::npos) {
      composed[r.ref].push_back(&r);
      any_composed = true;
    }
  }

  std::vector<TrainingInstance> out;
  for (TaskType type : all_task_types()) {
    auto it = mix.counts.find(type);
    if (it == mix.counts.end() || it->second == 0) continue;
    const size_t requested = it->second;

    std::vector<detail::Candidate> candidates =
        detail::enumerate_candidates(type, pool, frame_caps, composed, mix);
    if (candidates.empty() && detail::needs_captioner(type)) {
      const bool have_source = (type == TaskType::T2I) ? any_frame_caps : any_composed;
      if (!have_source) {
        throw MissingCaptionerOutputError("assemble: task " + to_string(type) +
                                          " needs caption generator output, none provided");
      }
    }
    if (requested > candidates.size()) {
      throw InsufficientAssetsError("assemble: task " + to_string(type) + ": requested " +
                                    std::to_string(requested) + ", derivable " +
                                    std::to_string(candidates.size()));
    }

    Rng rng = base_rng.derive("assemble/" + to_string(type));
    rng.shuffle(candidates);

    for (size_t i = 0; i < requested; ++i) {
      TrainingInstance inst;
      char serial[32];
      std::snprintf(serial, sizeof(serial), "%06zu", i);
      inst.instance_id = detail::lowercase(to_string(type)) + "-" + serial;
      inst.task_type = type;
      inst.query_text = candidates[i].query_text;
      inst.query_visual_ref = candidates[i].query_visual_ref;
      inst.positive_ref = candidates[i].positive_ref;
      inst.validate();
      if (stats && candidates[i].query_text) {
        if (candidates[i].synthetic_text) {
          stats->synthetic_caption_queries++;
        } else {
          stats->original_caption_queries++;
        }
      }
      out.push_back(std::move(inst));
    }
    if (stats) stats->emitted[type] = requested;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instance manifest TSV
// ---------------------------------------------------------------------------

inline std::string instances_to_tsv(const std::vector<TrainingInstance>& instances) {
  std::string out;
  for (const TrainingInstance& inst : instances) {
    out += inst.instance_id + '\t' + to_string(inst.task_type) + '\t';
    out += inst.query_text ? sanitize_field(*inst.query_text) : "-";
    out += '\t';
    out += inst.query_visual_ref ? *inst.query_visual_ref : "-";
    out += '\t';
    out += inst.positive_ref;
    out += '\t';
    out += inst.hard_negatives.empty() ? "-" : join(inst.hard_negatives, ",");
    out += '\n';
  }
  return out;
}

inline std::vector<TrainingInstance> parse_instances_tsv(const std::string& tsv) {
  std::vector<TrainingInstance> out;
  size_t lineno = 0;
  for (const std::string& line : split_lines(tsv)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 6) {
      throw FormatError("instance manifest line " + std::to_string(lineno) +
                        ": expected 6 fields, got " + std::to_string(f.size()));
    }
    TrainingInstance inst;
    inst.instance_id = f[0];
    inst.task_type = parse_task_type(f[1]);
    if (f[2] != "-") inst.query_text = f[2];
    if (f[3] != "-") inst.query_visual_ref = f[3];
    inst.positive_ref = f[4];
    if (f[5] != "-") inst.hard_negatives = split(f[5], ',');
    inst.validate();
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace uvre
