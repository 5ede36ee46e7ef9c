#pragma once

// Ability taxonomy: which query format and data domain each benchmark
// dataset exercises. Textual datasets carry exactly one domain tag; composed
// and visual datasets carry only their task ability. FG is derived from
// (S, T, PR) at aggregation time and is never assigned to a dataset.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "uvre/errors.hpp"

namespace uvre {

enum class QueryFormat { TXT, CMP, VIS };

enum class Domain { CG, S, T, PR, LC };

enum class Metric { Recall1, Recall10, Precision1 };

inline std::string to_string(QueryFormat f) {
  switch (f) {
    case QueryFormat::TXT: return "TXT";
    case QueryFormat::CMP: return "CMP";
    case QueryFormat::VIS: return "VIS";
  }
  return "?";
}

inline std::string to_string(Domain d) {
  switch (d) {
    case Domain::CG: return "CG";
    case Domain::S: return "S";
    case Domain::T: return "T";
    case Domain::PR: return "PR";
    case Domain::LC: return "LC";
  }
  return "?";
}

inline std::string to_string(Metric m) {
  switch (m) {
    case Metric::Recall1: return "Recall@1";
    case Metric::Recall10: return "Recall@10";
    case Metric::Precision1: return "Precision@1";
  }
  return "?";
}

inline QueryFormat parse_query_format(const std::string& s) {
  if (s == "TXT") return QueryFormat::TXT;
  if (s == "CMP") return QueryFormat::CMP;
  if (s == "VIS") return QueryFormat::VIS;
  throw ManifestError("unknown query format '" + s + "'");
}

inline Domain parse_domain(const std::string& s) {
  if (s == "CG") return Domain::CG;
  if (s == "S") return Domain::S;
  if (s == "T") return Domain::T;
  if (s == "PR") return Domain::PR;
  if (s == "LC") return Domain::LC;
  throw ManifestError("unknown domain tag '" + s + "'");
}

inline Metric parse_metric(const std::string& s) {
  if (s == "Recall@1") return Metric::Recall1;
  if (s == "Recall@10") return Metric::Recall10;
  if (s == "Precision@1") return Metric::Precision1;
  throw ManifestError("unknown metric '" + s + "'");
}

inline size_t metric_cutoff(Metric m) { return m == Metric::Recall10 ? 10 : 1; }

struct TaxonomyEntry {
  QueryFormat format;
  std::set<Domain> domains;  // exactly one entry for TXT, empty otherwise
};

// The 16 canonical benchmark datasets, in the column order used by
// published score tables and report files.
inline const std::vector<std::string>& canonical_dataset_order() {
  static const std::vector<std::string> order = {
      "MSRVTT", "DiDeMo", "CRB-G",  "CRB-S", "VDC-O", "CRB-T",      "CMRB",     "DREAM-E",
      "LoVR-TH", "PEV-K",  "LoVR-V", "VDC-D", "MS-TI", "MS-TV",      "MSRVTT-I2V", "LoVR-C2V"};
  return order;
}

inline const std::map<std::string, TaxonomyEntry>& canonical_taxonomy() {
  static const std::map<std::string, TaxonomyEntry> table = {
      {"MSRVTT", {QueryFormat::TXT, {Domain::CG}}},
      {"DiDeMo", {QueryFormat::TXT, {Domain::CG}}},
      {"CRB-G", {QueryFormat::TXT, {Domain::CG}}},
      {"CRB-S", {QueryFormat::TXT, {Domain::S}}},
      {"VDC-O", {QueryFormat::TXT, {Domain::S}}},
      {"CRB-T", {QueryFormat::TXT, {Domain::T}}},
      {"CMRB", {QueryFormat::TXT, {Domain::T}}},
      {"DREAM-E", {QueryFormat::TXT, {Domain::PR}}},
      {"LoVR-TH", {QueryFormat::TXT, {Domain::PR}}},
      {"PEV-K", {QueryFormat::TXT, {Domain::PR}}},
      {"LoVR-V", {QueryFormat::TXT, {Domain::LC}}},
      {"VDC-D", {QueryFormat::TXT, {Domain::LC}}},
      {"MS-TI", {QueryFormat::CMP, {}}},
      {"MS-TV", {QueryFormat::CMP, {}}},
      {"MSRVTT-I2V", {QueryFormat::VIS, {}}},
      {"LoVR-C2V", {QueryFormat::VIS, {}}},
  };
  return table;
}

// Ability tags of a registered dataset: its query format, plus its domain
// tags when textual. Falls back to the canonical table for known ids.
class AbilityTaxonomy {
 public:
  AbilityTaxonomy() = default;

  void assign(const std::string& task_id, QueryFormat format, const std::set<Domain>& domains) {
    if (format == QueryFormat::TXT && domains.size() != 1) {
      throw IntegrityError("taxonomy: textual dataset '" + task_id +
                           "' must carry exactly one domain tag");
    }
    if (format != QueryFormat::TXT && !domains.empty()) {
      throw IntegrityError("taxonomy: non-textual dataset '" + task_id +
                           "' must not carry domain tags");
    }
    table_[task_id] = TaxonomyEntry{format, domains};
  }

  bool contains(const std::string& task_id) const { return table_.count(task_id) != 0; }

  const TaxonomyEntry& entry(const std::string& task_id) const {
    auto it = table_.find(task_id);
    if (it == table_.end()) throw UnknownTaskError("taxonomy: unknown task '" + task_id + "'");
    return it->second;
  }

  // Tag set as strings, e.g. {"TXT","T"} or {"CMP"}.
  std::set<std::string> abilities_of(const std::string& task_id) const {
    const TaxonomyEntry& e = entry(task_id);
    std::set<std::string> tags = {to_string(e.format)};
    for (Domain d : e.domains) tags.insert(to_string(d));
    return tags;
  }

  const std::map<std::string, TaxonomyEntry>& table() const { return table_; }

 private:
  std::map<std::string, TaxonomyEntry> table_;
};

}  // namespace uvre
