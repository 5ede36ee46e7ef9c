#pragma once

// Retrieval tasks in tripartite form: a corpus, a set of queries, and a
// relevance mapping, plus ability tags and the metric to score with.
//
// Manifest file format (UTF-8, tab-separated):
//   line 1: task_id  query_format  domain_tags  metric  query_prompt
//           corpus_ref  queries_ref  flags
//     - domain_tags: comma-separated subset of {CG,S,T,PR,LC}, or "-"
//     - flags: comma-separated ("multi_positive", ...), or "-"
//     - corpus_ref / queries_ref: store paths, resolved relative to the
//       manifest's directory
//   then one record per line:
//     query_id <TAB> corpus_id                     relevance pair
//     compose <TAB> query_id <TAB> text_id <TAB> visual_id
//                                                  composition recipe (CMP
//                                                  metadata only; the query
//                                                  store still holds one
//                                                  pre-fused embedding)

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "uvre/io_util.hpp"
#include "uvre/store.hpp"
#include "uvre/taxonomy.hpp"

namespace uvre {

struct CompositionRecipe {
  std::string text_id;
  std::string visual_id;
};

struct RetrievalTask {
  std::string task_id;
  QueryFormat query_format = QueryFormat::TXT;
  std::set<Domain> domain_tags;
  Metric metric = Metric::Recall1;
  std::string query_prompt;
  std::string corpus_ref;
  std::string queries_ref;
  bool multi_positive = false;
  // query id -> non-empty set of relevant corpus ids
  std::map<std::string, std::set<std::string>> relevance;
  // CMP only: query id -> (text id, visual id), metadata pass-through
  std::map<std::string, CompositionRecipe> composition;
};

namespace detail {

inline std::string resolve_ref(const std::string& manifest_path, const std::string& ref) {
  namespace fs = std::filesystem;
  fs::path p(ref);
  if (p.is_absolute()) return ref;
  return (fs::path(manifest_path).parent_path() / p).string();
}

}  // namespace detail

// Parses a manifest without touching the referenced stores. Structural
// problems are ManifestError; semantic ones are left to validate_task.
inline RetrievalTask parse_task_manifest(const std::string& path) {
  const std::vector<std::string> lines = split_lines(read_file(path));
  if (lines.empty()) throw ManifestError(path + ": empty manifest");

  const std::vector<std::string> head = split(lines[0], '\t');
  if (head.size() != 8) {
    throw ManifestError(path + ": header has " + std::to_string(head.size()) +
                        " fields, expected 8");
  }
  RetrievalTask task;
  task.task_id = head[0];
  if (task.task_id.empty()) throw ManifestError(path + ": missing task_id");
  task.query_format = parse_query_format(head[1]);
  if (head[2] != "-" && !head[2].empty()) {
    for (const std::string& tag : split(head[2], ',')) task.domain_tags.insert(parse_domain(tag));
  }
  task.metric = parse_metric(head[3]);
  task.query_prompt = head[4];
  task.corpus_ref = detail::resolve_ref(path, head[5]);
  task.queries_ref = detail::resolve_ref(path, head[6]);
  if (head[7] != "-" && !head[7].empty()) {
    for (const std::string& flag : split(head[7], ',')) {
      if (flag == "multi_positive") {
        task.multi_positive = true;
      } else {
        throw ManifestError(path + ": unknown flag '" + flag + "'");
      }
    }
  }

  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::vector<std::string> f = split(lines[i], '\t');
    if (f.size() == 2) {
      if (f[0].empty() || f[1].empty()) {
        throw ManifestError(path + ": line " + std::to_string(i + 1) + ": empty id");
      }
      task.relevance[f[0]].insert(f[1]);
    } else if (f.size() == 4 && f[0] == "compose") {
      task.composition[f[1]] = CompositionRecipe{f[2], f[3]};
    } else {
      throw ManifestError(path + ": line " + std::to_string(i + 1) + ": malformed record");
    }
  }
  if (task.relevance.empty()) throw ManifestError(path + ": no relevance records");
  return task;
}

// Checks a parsed task against its stores. Dangling ids and queries with no
// positives are IntegrityError; store shape problems are DimensionMismatch.
inline void validate_task(const RetrievalTask& task, const EmbeddingStore& queries,
                          const EmbeddingStore& corpus) {
  if (queries.empty()) throw IntegrityError(task.task_id + ": query store is empty");
  if (corpus.empty()) throw IntegrityError(task.task_id + ": corpus store is empty");
  if (queries.dimension() != corpus.dimension()) {
    throw DimensionMismatchError(task.task_id + ": query dim " +
                                 std::to_string(queries.dimension()) + " vs corpus dim " +
                                 std::to_string(corpus.dimension()));
  }
  for (const auto& [qid, rel] : task.relevance) {
    if (!queries.contains(qid)) {
      throw IntegrityError(task.task_id + ": relevance names absent query '" + qid + "'");
    }
    if (rel.empty()) throw IntegrityError(task.task_id + ": query '" + qid + "' has no positives");
    for (const std::string& cid : rel) {
      if (!corpus.contains(cid)) {
        throw IntegrityError(task.task_id + ": relevance names absent corpus id '" + cid + "'");
      }
    }
  }
  // Corpus entries may be distractors, but every query must be judged.
  for (const std::string& qid : queries.ids()) {
    if (task.relevance.find(qid) == task.relevance.end()) {
      throw IntegrityError(task.task_id + ": query '" + qid + "' has zero positives");
    }
  }
  if (task.multi_positive) {
    bool any_multi = false;
    for (const auto& [qid, rel] : task.relevance) any_multi = any_multi || rel.size() > 1;
    if (any_multi && task.metric != Metric::Precision1) {
      throw IntegrityError(task.task_id +
                           ": multi-positive task with >1 positives requires Precision@1");
    }
  }
}

struct LoadedTask {
  RetrievalTask task;
  EmbeddingStore queries;
  EmbeddingStore corpus;
};

// Parse + open stores + validate; the returned task satisfies all of its
// invariants or a typed error was thrown.
inline LoadedTask load_task(const std::string& manifest_path) {
  LoadedTask lt;
  lt.task = parse_task_manifest(manifest_path);
  lt.queries = read_store(lt.task.queries_ref);
  lt.corpus = read_store(lt.task.corpus_ref);
  validate_task(lt.task, lt.queries, lt.corpus);
  return lt;
}

inline std::string write_task_manifest(const RetrievalTask& task) {
  std::string out;
  std::vector<std::string> tags;
  for (Domain d : task.domain_tags) tags.push_back(to_string(d));
  out += task.task_id;
  out += '\t';
  out += to_string(task.query_format);
  out += '\t';
  out += tags.empty() ? "-" : join(tags, ",");
  out += '\t';
  out += to_string(task.metric);
  out += '\t';
  out += sanitize_field(task.query_prompt);
  out += '\t';
  out += task.corpus_ref;
  out += '\t';
  out += task.queries_ref;
  out += '\t';
  out += task.multi_positive ? "multi_positive" : "-";
  out += '\n';
  for (const auto& [qid, rel] : task.relevance) {
    for (const std::string& cid : rel) {
      out += qid;
      out += '\t';
      out += cid;
      out += '\n';
    }
  }
  for (const auto& [qid, recipe] : task.composition) {
    out += "compose\t" + qid + '\t' + recipe.text_id + '\t' + recipe.visual_id + '\n';
  }
  return out;
}

}  // namespace uvre
