#include <catch2/catch_amalgamated.hpp>

#include "support/oracles.hpp"
#include "support/published.hpp"
#include "uvre/aggregate.hpp"
#include "uvre/correlation.hpp"
#include "uvre/report_io.hpp"
#include "uvre/stats.hpp"

using namespace uvre;

namespace {

// Table built from the shipped published scores: our aggregation provides
// the ability columns, exactly as the analyze pipeline consumes them.
ModelAbilityTable published_table() {
  const auto scores = published::load_scores_csv(published::scores_csv_path());
  std::vector<EvalReport> reports;
  for (const std::string& model : scores.models) {
    std::vector<DatasetScore> ds;
    for (const std::string& d : canonical_dataset_order()) {
      ds.push_back({d, Metric::Recall1, scores.scores.at(model).at(d), 1});
    }
    reports.push_back(aggregate_canonical(model, ds));
  }
  ParsedReportTable parsed = parse_report_csv(reports_to_csv(reports));
  std::map<std::string, std::string> families(scores.family.begin(), scores.family.end());
  return build_ability_table(parsed, families, {"GVE-3B", "GVE-7B"});
}

}  // namespace

TEST_CASE("pearson") {
  SECTION("perfect linear and anti-linear") {
    CHECK(pearson({1, 2, 3, 4}, {2, 4, 6, 8}) == Catch::Approx(1.0).margin(1e-12));
    CHECK(pearson({1, 2, 3, 4}, {6, 5, 4, 3}) == Catch::Approx(-1.0).margin(1e-12));
  }
  SECTION("hand-computed interior value") {
    CHECK(pearson({1, 2, 3, 4}, {1, 3, 2, 4}) == Catch::Approx(0.8).margin(1e-12));
  }
  SECTION("typed errors") {
    CHECK_THROWS_AS(pearson({1, 2, 3}, {1, 2}), LengthMismatchError);
    CHECK_THROWS_AS(pearson({1, 2}, {1, 2}), LengthMismatchError);
    CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), ConstantInputError);
    CHECK_THROWS_AS(pearson({1, 2, 3}, {5, 5, 5}), ConstantInputError);
  }
  SECTION("invariant under positive affine maps, negated by negative scaling") {
    Rng rng(44);
    for (int rep = 0; rep < 100; ++rep) {
      const size_t n = 3 + rng.index(20);
      std::vector<double> x(n), y(n);
      for (size_t i = 0; i < n; ++i) {
        x[i] = rng.uniform01() * 10.0;
        y[i] = rng.uniform01() * 10.0;
      }
      double base;
      try {
        base = pearson(x, y);
      } catch (const ConstantInputError&) {
        continue;
      }
      std::vector<double> xs = x;
      const double a = 0.3 + rng.uniform01() * 5.0;
      const double b = rng.uniform01() * 20.0 - 10.0;
      for (double& v : xs) v = a * v + b;
      CHECK(pearson(xs, y) == Catch::Approx(base).margin(1e-9));
      for (double& v : xs) v = -v;
      CHECK(pearson(xs, y) == Catch::Approx(-base).margin(1e-9));
      CHECK(std::fabs(base) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("ability_correlation_matrix structure") {
  ModelAbilityTable table = published_table();
  for (SubsetConvention c :
       {SubsetConvention::BaselinesOnly, SubsetConvention::AllModels, SubsetConvention::FamilyCLIP,
        SubsetConvention::FamilyMLLM}) {
    CorrelationMatrix m = ability_correlation_matrix(table, c);
    REQUIRE(m.labels.size() == 9);
    for (size_t i = 0; i < 9; ++i) {
      CHECK(m.rho[i][i] == 1.0);
      for (size_t j = 0; j < 9; ++j) {
        CHECK(m.rho[i][j] == m.rho[j][i]);
        CHECK(std::fabs(m.rho[i][j]) <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("duplicated column correlates at exactly 1") {
  ModelAbilityTable table = published_table();
  for (ModelRow& row : table.rows) row.values["S"] = row.values["T"];
  CorrelationMatrix m = ability_correlation_matrix(table, SubsetConvention::AllModels);
  size_t is = 0, it = 0;
  for (size_t i = 0; i < m.labels.size(); ++i) {
    if (m.labels[i] == "S") is = i;
    if (m.labels[i] == "T") it = i;
  }
  CHECK(m.rho[is][it] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("too few models raises") {
  ModelAbilityTable table = published_table();
  table.rows.resize(2);
  CHECK_THROWS_AS(ability_correlation_matrix(table, SubsetConvention::AllModels),
                  TooFewModelsError);
}

TEST_CASE("representativeness") {
  ModelAbilityTable table = published_table();

  SECTION("a column equal to the average correlates at 1") {
    ModelAbilityTable copy = table;
    for (ModelRow& row : copy.rows) row.values["MSRVTT"] = row.values["AVG_A"];
    Representativeness r = representativeness(copy, SubsetConvention::AllModels);
    CHECK(r.rho.at("MSRVTT") == Catch::Approx(1.0).margin(1e-12));
  }

  SECTION("published reference points under documented conventions") {
    // rho(PR, AVG) ~ 0.97 under the baselines-only convention
    Representativeness base = representativeness(table, SubsetConvention::BaselinesOnly);
    CHECK(base.rho.at("PR") == Catch::Approx(0.97).margin(0.05));
    // rho(MSRVTT, AVG) ~ 0.58 under the CLIP-family convention
    Representativeness clip = representativeness(table, SubsetConvention::FamilyCLIP);
    CHECK(clip.rho.at("MSRVTT") == Catch::Approx(0.58).margin(0.05));
  }

  SECTION("a shuffled column decorrelates") {
    ModelAbilityTable copy = table;
    // deterministic shuffle of one column across rows
    std::vector<double> vals;
    for (ModelRow& row : copy.rows) vals.push_back(row.values["MSRVTT"]);
    Rng rng(7);
    rng.shuffle(vals);
    for (size_t i = 0; i < copy.rows.size(); ++i) copy.rows[i].values["MSRVTT"] = vals[i];
    Representativeness r = representativeness(copy, SubsetConvention::AllModels);
    CHECK(std::fabs(r.rho.at("MSRVTT")) < 0.3);
  }
}

TEST_CASE("fit_log_scaling") {
  SECTION("exact log-linear points recover (a, b) to 1e-9") {
    ScalingFit fit = fit_log_scaling({{10, 1}, {100, 2}, {1000, 3}});
    CHECK(fit.a == Catch::Approx(1.0 / std::log(10.0)).margin(1e-9));
    CHECK(fit.b == Catch::Approx(0.0).margin(1e-9));
    CHECK(fit.gain_per_decade == Catch::Approx(1.0).margin(1e-9));
    CHECK(fit.residual_sum_squares == Catch::Approx(0.0).margin(1e-18));
    CHECK(fit.relative_gain == Catch::Approx(1.0).margin(1e-9));
  }
  SECTION("constant y gives zero slope and zero gain") {
    ScalingFit fit = fit_log_scaling({{10, 0.4}, {100, 0.4}, {1000, 0.4}});
    CHECK(fit.a == Catch::Approx(0.0).margin(1e-12));
    CHECK(fit.gain_per_decade == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("two points interpolate exactly") {
    ScalingFit fit = fit_log_scaling({{100, 0.5}, {10000, 0.6}});
    CHECK(fit.residual_sum_squares == Catch::Approx(0.0).margin(1e-18));
    // 2 decades apart, 0.1 total rise
    CHECK(fit.gain_per_decade == Catch::Approx(0.05).margin(1e-12));
  }
  SECTION("random exact generators recovered within 1e-9") {
    Rng rng(77);
    for (int rep = 0; rep < 200; ++rep) {
      const double a = rng.uniform01() * 2.0 - 1.0;
      const double b = rng.uniform01() * 4.0 - 2.0;
      std::vector<std::pair<double, double>> pts;
      const size_t n = 2 + rng.index(8);
      for (size_t i = 0; i < n; ++i) {
        const double x = std::pow(10.0, 1.0 + rng.uniform01() * 5.0);
        pts.push_back({x, a * std::log(x) + b});
      }
      bool distinct = false;
      for (size_t i = 1; i < n; ++i) distinct = distinct || pts[i].first != pts[0].first;
      if (!distinct) continue;
      ScalingFit fit = fit_log_scaling(pts);
      CHECK(fit.a == Catch::Approx(a).margin(1e-9));
      CHECK(fit.b == Catch::Approx(b).margin(1e-9));
      CHECK(fit.residual_sum_squares <= 1e-18);
    }
  }
  SECTION("typed errors") {
    CHECK_THROWS_AS(fit_log_scaling({{10, 1}}), DegenerateXError);
    CHECK_THROWS_AS(fit_log_scaling({{10, 1}, {10, 2}}), DegenerateXError);
    CHECK_THROWS_AS(fit_log_scaling({{-1, 1}, {10, 2}}), DegenerateXError);
    CHECK_THROWS_AS(fit_log_scaling({{0, 1}, {10, 2}}), DegenerateXError);
  }
}

TEST_CASE("analysis output serialization") {
  ModelAbilityTable table = published_table();
  CorrelationMatrix m = ability_correlation_matrix(table, SubsetConvention::BaselinesOnly);
  const std::string csv = correlation_matrix_to_csv(m);
  CHECK(csv.rfind("ability,TXT,CMP,VIS,CG,FG,LC,S,T,PR\n", 0) == 0);
  const std::string json = correlation_matrix_to_json(m);
  auto j = nlohmann::json::parse(json);
  CHECK(j["convention"] == "baselines-only");
  CHECK(j["model_count"] == 14);
  CHECK(j["rho"].size() == 9);

  ScalingFit fit = fit_log_scaling({{10, 1}, {100, 2}});
  auto sj = nlohmann::json::parse(scaling_fit_to_json(fit));
  CHECK(sj["gain_per_decade"].get<double>() == Catch::Approx(1.0).margin(1e-9));
}
