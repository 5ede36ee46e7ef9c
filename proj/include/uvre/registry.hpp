#pragma once

// Task registry: the set of benchmark tasks an evaluation run scores,
// together with their taxonomy. Built once, then read-only.

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "uvre/task.hpp"
#include "uvre/taxonomy.hpp"

namespace uvre {

class TaskRegistry {
 public:
  void add(RetrievalTask task) {
    if (by_id_.count(task.task_id)) {
      throw IntegrityError("registry: duplicate task id '" + task.task_id + "'");
    }
    taxonomy_.assign(task.task_id, task.query_format, task.domain_tags);
    order_.push_back(task.task_id);
    by_id_.emplace(task.task_id, std::move(task));
  }

  size_t size() const { return order_.size(); }
  const std::vector<std::string>& task_ids() const { return order_; }

  const RetrievalTask& task(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw UnknownTaskError("registry: unknown task '" + id + "'");
    return it->second;
  }

  const AbilityTaxonomy& taxonomy() const { return taxonomy_; }

  std::set<std::string> abilities_of(const std::string& task_id) const {
    return taxonomy_.abilities_of(task_id);
  }

 private:
  std::vector<std::string> order_;
  std::map<std::string, RetrievalTask> by_id_;
  AbilityTaxonomy taxonomy_;
};

// Loads every "*.task" manifest in a directory, sorted by filename so the
// registry layout does not depend on directory iteration order.
inline std::vector<std::string> list_manifests(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("registry path is not a directory: " + dir);
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".task") {
      paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());
  return paths;
}

struct RegistryCheck {
  std::string task_id;
  bool ok = false;
  std::string detail;
};

struct RegistryReport {
  std::vector<RegistryCheck> task_checks;
  std::vector<std::string> bucket_failures;
  bool passed = false;
};

// Integrity report over a set of manifests: per-task validation results plus
// a check that every ability bucket the aggregation needs is populated.
inline RegistryReport validate_registry(const std::vector<std::string>& manifest_paths) {
  if (manifest_paths.empty()) throw Error("validate_registry: no manifests given");
  RegistryReport report;
  TaskRegistry registry;
  for (const std::string& path : manifest_paths) {
    RegistryCheck check;
    check.task_id = path;
    try {
      LoadedTask lt = load_task(path);
      check.task_id = lt.task.task_id;
      registry.add(std::move(lt.task));
      check.ok = true;
      check.detail = "ok";
    } catch (const Error& e) {
      check.ok = false;
      check.detail = e.what();
    }
    report.task_checks.push_back(std::move(check));
  }

  // Buckets required by aggregation: one per domain plus CMP and VIS.
  std::map<std::string, int> bucket_counts = {{"CG", 0}, {"S", 0},   {"T", 0},  {"PR", 0},
                                              {"LC", 0}, {"CMP", 0}, {"VIS", 0}};
  for (const std::string& id : registry.task_ids()) {
    const TaxonomyEntry& e = registry.taxonomy().entry(id);
    if (e.format == QueryFormat::CMP) bucket_counts["CMP"]++;
    if (e.format == QueryFormat::VIS) bucket_counts["VIS"]++;
    for (Domain d : e.domains) bucket_counts[to_string(d)]++;
  }
  for (const auto& [bucket, count] : bucket_counts) {
    if (count == 0) report.bucket_failures.push_back("ability bucket '" + bucket + "' is empty");
  }

  report.passed = report.bucket_failures.empty() &&
                  std::all_of(report.task_checks.begin(), report.task_checks.end(),
                              [](const RegistryCheck& c) { return c.ok; });
  return report;
}

}  // namespace uvre
