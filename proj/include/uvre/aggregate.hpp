#pragma once

// Ability aggregation. Dataset scores roll up into ability scores as
// unweighted means of means, all computed on unrounded values:
//
//   S, T, PR, CG, LC : mean of the dataset scores in that domain bucket
//   CMP, VIS         : mean of the composed / visual dataset scores
//   FG               : mean(S, T, PR)
//   TXT              : mean(CG, FG, LC)
//   avg_datasets     : mean over all dataset scores
//   avg_abilities    : mean(TXT, CMP, VIS, CG, FG, LC)
//
// Rounding happens only at presentation time (half-up, 3 decimals).

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "uvre/evaluate.hpp"
#include "uvre/taxonomy.hpp"

namespace uvre {

// Axis order used by radar output and report columns.
inline const std::vector<std::string>& ability_axis_order() {
  static const std::vector<std::string> order = {"TXT", "CMP", "VIS", "CG", "FG",
                                                 "LC",  "S",   "T",   "PR"};
  return order;
}

struct EvalReport {
  std::string model_id;
  std::vector<DatasetScore> dataset_scores;
  std::map<std::string, double> ability_scores;  // keys: ability_axis_order()
  double avg_datasets = 0.0;
  double avg_abilities = 0.0;
};

inline double round_half_up_3(double v) { return std::floor(v * 1000.0 + 0.5) / 1000.0; }

inline EvalReport aggregate(const std::string& model_id,
                            const std::vector<DatasetScore>& dataset_scores,
                            const AbilityTaxonomy& taxonomy) {
  EvalReport report;
  report.model_id = model_id;
  report.dataset_scores = dataset_scores;

  std::map<std::string, std::vector<double>> buckets = {{"CG", {}}, {"S", {}},   {"T", {}},
                                                        {"PR", {}}, {"LC", {}},  {"CMP", {}},
                                                        {"VIS", {}}};
  double total = 0.0;
  for (const DatasetScore& ds : dataset_scores) {
    total += ds.value;
    const TaxonomyEntry& e = taxonomy.entry(ds.task_id);
    if (e.format == QueryFormat::CMP) buckets["CMP"].push_back(ds.value);
    if (e.format == QueryFormat::VIS) buckets["VIS"].push_back(ds.value);
    for (Domain d : e.domains) buckets[to_string(d)].push_back(ds.value);
  }
  if (dataset_scores.empty()) throw MissingBucketError("aggregate: no dataset scores");

  auto bucket_mean = [&](const std::string& name) {
    const std::vector<double>& v = buckets[name];
    if (v.empty()) throw MissingBucketError("aggregate: ability bucket '" + name + "' is empty");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };

  const double s = bucket_mean("S");
  const double t = bucket_mean("T");
  const double pr = bucket_mean("PR");
  const double cg = bucket_mean("CG");
  const double lc = bucket_mean("LC");
  const double cmp = bucket_mean("CMP");
  const double vis = bucket_mean("VIS");
  const double fg = (s + t + pr) / 3.0;
  const double txt = (cg + fg + lc) / 3.0;

  report.ability_scores = {{"TXT", txt}, {"CMP", cmp}, {"VIS", vis}, {"CG", cg}, {"FG", fg},
                           {"LC", lc},   {"S", s},     {"T", t},     {"PR", pr}};
  report.avg_datasets = total / static_cast<double>(dataset_scores.size());
  report.avg_abilities = (txt + cmp + vis + cg + fg + lc) / 6.0;
  return report;
}

// Aggregation over the canonical benchmark: dataset ids must be the 16
// canonical ones (any order), taxonomy comes from the builtin table.
inline EvalReport aggregate_canonical(const std::string& model_id,
                                      const std::vector<DatasetScore>& dataset_scores) {
  AbilityTaxonomy taxonomy;
  for (const auto& [id, entry] : canonical_taxonomy()) {
    taxonomy.assign(id, entry.format, entry.domains);
  }
  for (const DatasetScore& ds : dataset_scores) {
    if (!taxonomy.contains(ds.task_id)) {
      throw UnknownTaskError("aggregate_canonical: unknown dataset '" + ds.task_id + "'");
    }
  }
  return aggregate(model_id, dataset_scores, taxonomy);
}

}  // namespace uvre
