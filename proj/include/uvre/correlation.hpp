#pragma once

// Cross-model ability correlation analyses over a model-by-ability score
// table.
//
// The model subset behind published correlation figures is ambiguous, so
// every analysis runs under an explicit convention: the 14 baseline models
// only, all 16 rows, or one architecture family. Results carry their
// convention tag.

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "uvre/aggregate.hpp"
#include "uvre/io_util.hpp"
#include "uvre/report_io.hpp"
#include "uvre/stats.hpp"

namespace uvre {

enum class SubsetConvention { BaselinesOnly, AllModels, FamilyCLIP, FamilyMLLM };

inline std::string to_string(SubsetConvention c) {
  switch (c) {
    case SubsetConvention::BaselinesOnly: return "baselines-only";
    case SubsetConvention::AllModels: return "all-models";
    case SubsetConvention::FamilyCLIP: return "family-clip";
    case SubsetConvention::FamilyMLLM: return "family-mllm";
  }
  return "?";
}

inline const std::vector<SubsetConvention>& all_conventions() {
  static const std::vector<SubsetConvention> all = {
      SubsetConvention::BaselinesOnly, SubsetConvention::AllModels, SubsetConvention::FamilyCLIP,
      SubsetConvention::FamilyMLLM};
  return all;
}

struct ModelRow {
  std::string model_id;
  std::string family;  // "CLIP" | "MLLM"
  bool baseline = true;
  std::map<std::string, double> values;  // column -> score (abilities + datasets + AVG_*)
};

struct ModelAbilityTable {
  std::vector<ModelRow> rows;
  std::vector<std::string> columns;  // ordered: datasets, then abilities, then averages

  std::vector<const ModelRow*> subset(SubsetConvention c) const {
    std::vector<const ModelRow*> out;
    for (const ModelRow& row : rows) {
      switch (c) {
        case SubsetConvention::BaselinesOnly:
          if (row.baseline) out.push_back(&row);
          break;
        case SubsetConvention::AllModels: out.push_back(&row); break;
        case SubsetConvention::FamilyCLIP:
          if (row.family == "CLIP") out.push_back(&row);
          break;
        case SubsetConvention::FamilyMLLM:
          if (row.family == "MLLM") out.push_back(&row);
          break;
      }
    }
    return out;
  }

  std::vector<double> column(const std::vector<const ModelRow*>& subset,
                             const std::string& name) const {
    std::vector<double> out;
    out.reserve(subset.size());
    for (const ModelRow* row : subset) {
      auto it = row->values.find(name);
      if (it == row->values.end()) {
        throw FormatError("ability table: row '" + row->model_id + "' lacks column '" + name + "'");
      }
      out.push_back(it->second);
    }
    return out;
  }
};

// Builds the table from a parsed report CSV plus per-model family tags.
// Models absent from the family map raise; models absent from the baseline
// set count as non-baseline rows.
inline ModelAbilityTable build_ability_table(const ParsedReportTable& parsed,
                                             const std::map<std::string, std::string>& families,
                                             const std::set<std::string>& non_baselines) {
  ModelAbilityTable table;
  table.columns = parsed.dataset_columns;
  for (const std::string& a : ability_axis_order()) table.columns.push_back(a);
  table.columns.push_back("AVG_D");
  table.columns.push_back("AVG_A");

  for (const EvalReport& r : parsed.reports) {
    ModelRow row;
    row.model_id = r.model_id;
    auto fam = families.find(r.model_id);
    if (fam == families.end()) {
      throw FormatError("ability table: no family tag for model '" + r.model_id + "'");
    }
    row.family = fam->second;
    row.baseline = non_baselines.count(r.model_id) == 0;
    for (const DatasetScore& ds : r.dataset_scores) row.values[ds.task_id] = ds.value;
    for (const auto& [k, v] : r.ability_scores) row.values[k] = v;
    row.values["AVG_D"] = r.avg_datasets;
    row.values["AVG_A"] = r.avg_abilities;
    table.rows.push_back(std::move(row));
  }
  return table;
}

struct CorrelationMatrix {
  SubsetConvention convention = SubsetConvention::AllModels;
  size_t model_count = 0;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rho;  // symmetric, unit diagonal
};

// Pairwise Pearson over the nine ability columns for the chosen subset.
inline CorrelationMatrix ability_correlation_matrix(const ModelAbilityTable& table,
                                                    SubsetConvention convention) {
  const std::vector<const ModelRow*> subset = table.subset(convention);
  if (subset.size() < 3) {
    throw TooFewModelsError("correlation: convention " + to_string(convention) + " leaves " +
                            std::to_string(subset.size()) + " models, need >= 3");
  }
  CorrelationMatrix m;
  m.convention = convention;
  m.model_count = subset.size();
  m.labels = ability_axis_order();
  const size_t n = m.labels.size();
  std::vector<std::vector<double>> cols(n);
  for (size_t i = 0; i < n; ++i) cols[i] = table.column(subset, m.labels[i]);

  m.rho.assign(n, std::vector<double>(n, 1.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double r = pearson(cols[i], cols[j]);
      m.rho[i][j] = r;
      m.rho[j][i] = r;
    }
  }
  return m;
}

struct Representativeness {
  SubsetConvention convention = SubsetConvention::AllModels;
  std::string against;  // the average column used
  size_t model_count = 0;
  std::map<std::string, double> rho;  // column -> correlation with the average
};

// Correlation of every dataset and ability column against the
// across-abilities average, per subset convention.
inline Representativeness representativeness(const ModelAbilityTable& table,
                                             SubsetConvention convention,
                                             const std::string& against = "AVG_A") {
  const std::vector<const ModelRow*> subset = table.subset(convention);
  if (subset.size() < 3) {
    throw TooFewModelsError("representativeness: convention " + to_string(convention) +
                            " leaves " + std::to_string(subset.size()) + " models, need >= 3");
  }
  Representativeness result;
  result.convention = convention;
  result.against = against;
  result.model_count = subset.size();
  const std::vector<double> avg = table.column(subset, against);
  for (const std::string& col : table.columns) {
    if (col == against || col == "AVG_D" || col == "AVG_A") continue;
    result.rho[col] = pearson(table.column(subset, col), avg);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Output serialization
// ---------------------------------------------------------------------------

inline std::string correlation_matrix_to_csv(const CorrelationMatrix& m) {
  std::string out = "ability";
  for (const std::string& l : m.labels) out += "," + l;
  out += '\n';
  for (size_t i = 0; i < m.labels.size(); ++i) {
    out += m.labels[i];
    for (size_t j = 0; j < m.labels.size(); ++j) out += "," + format_double(m.rho[i][j]);
    out += '\n';
  }
  return out;
}

inline std::string correlation_matrix_to_json(const CorrelationMatrix& m) {
  nlohmann::ordered_json j;
  j["convention"] = to_string(m.convention);
  j["model_count"] = m.model_count;
  j["axes"] = m.labels;
  j["rho"] = m.rho;
  return j.dump(2) + "\n";
}

inline std::string representativeness_to_csv(const Representativeness& r) {
  std::string out = "column,rho_vs_" + r.against + "\n";
  for (const auto& [col, rho] : r.rho) out += col + "," + format_double(rho) + "\n";
  return out;
}

inline std::string scaling_fit_to_json(const ScalingFit& fit) {
  nlohmann::ordered_json j;
  j["a"] = fit.a;
  j["b"] = fit.b;
  j["gain_per_decade"] = fit.gain_per_decade;
  j["relative_gain"] = fit.relative_gain;
  j["residual_sum_squares"] = fit.residual_sum_squares;
  return j.dump(2) + "\n";
}

}  // namespace uvre
