#pragma once

// Report serialization. One CSV row per model:
//   model_id,<dataset columns...>,S,T,PR,CG,FG,LC,TXT,CMP,VIS,AVG_D,AVG_A
// Dataset columns follow the canonical order for canonical datasets and
// lexicographic order for anything else. Values are written so that parsing
// them back reproduces every double bit-exactly.
//
// Radar JSON: fixed axis order [TXT,CMP,VIS,CG,FG,LC,S,T,PR], one object per
// model.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "uvre/aggregate.hpp"
#include "uvre/io_util.hpp"

namespace uvre {

inline const std::vector<std::string>& report_ability_columns() {
  static const std::vector<std::string> cols = {"S",   "T",   "PR",  "CG",  "FG", "LC",
                                                "TXT", "CMP", "VIS", "AVG_D", "AVG_A"};
  return cols;
}

// Dataset column order for a set of reports: canonical ids first in
// canonical order, then the rest sorted.
inline std::vector<std::string> report_dataset_columns(const std::vector<EvalReport>& reports) {
  std::set<std::string> present;
  for (const EvalReport& r : reports) {
    for (const DatasetScore& ds : r.dataset_scores) present.insert(ds.task_id);
  }
  std::vector<std::string> cols;
  for (const std::string& id : canonical_dataset_order()) {
    if (present.count(id)) {
      cols.push_back(id);
      present.erase(id);
    }
  }
  for (const std::string& id : present) cols.push_back(id);
  return cols;
}

inline std::string reports_to_csv(const std::vector<EvalReport>& reports) {
  const std::vector<std::string> ds_cols = report_dataset_columns(reports);
  std::string out = "model_id";
  for (const std::string& c : ds_cols) out += "," + c;
  for (const std::string& c : report_ability_columns()) out += "," + c;
  out += '\n';
  for (const EvalReport& r : reports) {
    std::map<std::string, double> by_id;
    for (const DatasetScore& ds : r.dataset_scores) by_id[ds.task_id] = ds.value;
    out += r.model_id;
    for (const std::string& c : ds_cols) {
      auto it = by_id.find(c);
      out += ",";
      out += it == by_id.end() ? "" : format_double(it->second);
    }
    for (const std::string& c : report_ability_columns()) {
      out += ",";
      if (c == "AVG_D") {
        out += format_double(r.avg_datasets);
      } else if (c == "AVG_A") {
        out += format_double(r.avg_abilities);
      } else {
        out += format_double(r.ability_scores.at(c));
      }
    }
    out += '\n';
  }
  return out;
}

struct ParsedReportTable {
  std::vector<std::string> dataset_columns;
  std::vector<EvalReport> reports;
};

inline ParsedReportTable parse_report_csv(const std::string& csv) {
  const std::vector<std::string> lines = split_lines(csv);
  if (lines.empty()) throw FormatError("report csv: empty");
  const std::vector<std::string> header = split(lines[0], ',');
  const std::vector<std::string>& abil = report_ability_columns();
  if (header.size() < 1 + abil.size() || header[0] != "model_id") {
    throw FormatError("report csv: malformed header");
  }
  const size_t n_ds = header.size() - 1 - abil.size();
  for (size_t i = 0; i < abil.size(); ++i) {
    if (header[1 + n_ds + i] != abil[i]) {
      throw FormatError("report csv: expected column '" + abil[i] + "', found '" +
                        header[1 + n_ds + i] + "'");
    }
  }
  ParsedReportTable table;
  table.dataset_columns.assign(header.begin() + 1, header.begin() + 1 + n_ds);

  for (size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const std::vector<std::string> f = split(lines[li], ',');
    if (f.size() != header.size()) {
      throw FormatError("report csv: line " + std::to_string(li + 1) + " has " +
                        std::to_string(f.size()) + " fields, expected " +
                        std::to_string(header.size()));
    }
    EvalReport r;
    r.model_id = f[0];
    for (size_t i = 0; i < n_ds; ++i) {
      if (f[1 + i].empty()) continue;
      DatasetScore ds;
      ds.task_id = table.dataset_columns[i];
      ds.value = parse_double(f[1 + i], "report csv");
      r.dataset_scores.push_back(ds);
    }
    for (size_t i = 0; i < abil.size(); ++i) {
      const double v = parse_double(f[1 + n_ds + i], "report csv");
      if (abil[i] == "AVG_D") {
        r.avg_datasets = v;
      } else if (abil[i] == "AVG_A") {
        r.avg_abilities = v;
      } else {
        r.ability_scores[abil[i]] = v;
      }
    }
    table.reports.push_back(std::move(r));
  }
  return table;
}

// Radar chart data: nine axes in fixed order.
inline std::string reports_to_radar_json(const std::vector<EvalReport>& reports) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const EvalReport& r : reports) {
    nlohmann::ordered_json item;
    item["model_id"] = r.model_id;
    item["axes"] = ability_axis_order();
    std::vector<double> values;
    for (const std::string& a : ability_axis_order()) values.push_back(r.ability_scores.at(a));
    item["values"] = values;
    item["avg_datasets"] = r.avg_datasets;
    item["avg_abilities"] = r.avg_abilities;
    out.push_back(std::move(item));
  }
  return out.dump(2) + "\n";
}

}  // namespace uvre
