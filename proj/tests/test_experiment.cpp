#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "tailband/experiment.hpp"
#include "testutil.hpp"

using namespace tailband;

namespace {

ScenarioConfig small_scenario() {
  ScenarioConfig cfg;
  cfg.distribution = parse_distribution("pareto", {0.5});
  cfg.machines = 4;
  cfg.machine_size = 100;
  cfg.exceedances = 10;
  cfg.estimators = {EstimatorKind::hill};
  cfg.replications = 6;
  cfg.master_seed = 99;
  return cfg;
}

bool same_records(const std::vector<EstimateRecord>& a, const std::vector<EstimateRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool values_match =
        (a[i].value == b[i].value) || (std::isnan(a[i].value) && std::isnan(b[i].value));
    if (a[i].rep != b[i].rep || a[i].estimator != b[i].estimator || a[i].mode != b[i].mode ||
        !values_match || a[i].failed != b[i].failed || a[i].reason != b[i].reason) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("grid construction") {
  const std::vector<double> xs = log_spaced_grid({1.0, 10.0, 50});
  REQUIRE(xs.size() == 50);
  CHECK(xs.front() == 1.0);
  CHECK(xs.back() == 10.0);
  for (std::size_t i = 1; i < xs.size(); ++i) CHECK(xs[i] > xs[i - 1]);
  // log spacing: constant ratio
  CHECK(xs[1] / xs[0] == doctest::Approx(xs[25] / xs[24]).epsilon(1e-9));

  const std::vector<double> ss = left_open_grid({0.02, 1.0, 50});
  REQUIRE(ss.size() == 50);
  CHECK(ss.front() > 0.02);
  CHECK(ss.back() == 1.0);
  for (std::size_t i = 1; i < ss.size(); ++i) CHECK(ss[i] > ss[i - 1]);

  CHECK(log_spaced_grid({2.0, 10.0, 1}) == std::vector<double>{2.0});
  CHECK_THROWS_AS(log_spaced_grid({0.0, 10.0, 5}), std::invalid_argument);
  CHECK_THROWS_AS(left_open_grid({0.5, 0.5, 5}), std::invalid_argument);
}

TEST_CASE("scenario validation") {
  ScenarioConfig cfg = small_scenario();
  CHECK_NOTHROW(cfg.validate());
  cfg.exceedances = cfg.machine_size;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = small_scenario();
  cfg.estimators = {EstimatorKind::weissman_quantile};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // missing quantile_p
  cfg.quantile_p = 0.01;
  CHECK_NOTHROW(cfg.validate());
  cfg.quantile_p = 0.5;  // >= d/m
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = small_scenario();
  cfg.estimators = {EstimatorKind::pickands};
  cfg.exceedances = 25;  // 4d = m
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = small_scenario();
  cfg.estimators = {EstimatorKind::hill, EstimatorKind::hill};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("run_scenario record cardinality and determinism") {
  ScenarioConfig cfg = small_scenario();
  cfg.replications = 2;
  const ScenarioResult a = run_scenario(cfg);
  CHECK(a.records.size() == 4);  // 2 reps x (distributed, oracle)
  CHECK(a.curves.empty());
  const ScenarioResult b = run_scenario(cfg);
  CHECK(same_records(a.records, b.records));
}

TEST_CASE("run_scenario is identical across thread counts") {
  ScenarioConfig cfg = small_scenario();
  cfg.estimators = {EstimatorKind::hill, EstimatorKind::moment, EstimatorKind::pwm_gpd};
  cfg.replications = 12;
  const ScenarioResult t1 = run_scenario(cfg, {.threads = 1, .curves = true});
  const ScenarioResult t4 = run_scenario(cfg, {.threads = 4, .curves = true});
  const ScenarioResult t8 = run_scenario(cfg, {.threads = 8, .curves = true});
  CHECK(same_records(t1.records, t4.records));
  CHECK(same_records(t1.records, t8.records));
  REQUIRE(t1.curves.size() == t4.curves.size());
  REQUIRE(t1.curves.size() == t8.curves.size());
  for (std::size_t i = 0; i < t1.curves.size(); ++i) {
    CHECK(t1.curves[i].value == t4.curves[i].value);
    CHECK(t1.curves[i].value == t8.curves[i].value);
    CHECK(t1.curves[i].grid_point == t8.curves[i].grid_point);
  }
}

TEST_CASE("J = 1 scenario pairs distributed and oracle exactly") {
  ScenarioConfig cfg = small_scenario();
  cfg.machines = 1;
  cfg.machine_size = 200;
  cfg.exceedances = 20;
  cfg.estimators = {EstimatorKind::hill, EstimatorKind::moment, EstimatorKind::pwm_gpd};
  cfg.replications = 10;
  const ScenarioResult result = run_scenario(cfg);
  for (std::size_t i = 0; i < result.records.size(); i += 2) {
    CHECK(result.records[i].mode == Mode::distributed);
    CHECK(result.records[i + 1].mode == Mode::oracle);
    CHECK(result.records[i].value == result.records[i + 1].value);
  }
  const std::vector<OracleGapRow> gaps = oracle_gap(result.records);
  for (const OracleGapRow& row : gaps) {
    CHECK(row.ks_two_sample == 0.0);
    CHECK(row.diff_mean == 0.0);
    CHECK(row.diff_sd == 0.0);
  }
}

TEST_CASE("failures are recorded, not thrown") {
  ScenarioConfig cfg = small_scenario();
  cfg.exceedances = 1;  // moment is degenerate at d = 1 on every machine
  cfg.estimators = {EstimatorKind::moment};
  cfg.replications = 3;
  const ScenarioResult result = run_scenario(cfg);
  REQUIRE(result.records.size() == 6);
  for (const EstimateRecord& r : result.records) {
    if (r.mode == Mode::distributed) {
      CHECK(r.failed);
      CHECK(std::isnan(r.value));
      CHECK(!r.reason.empty());
    } else {
      CHECK(!r.failed);  // oracle k = J*d = 4 is fine
    }
  }
}

TEST_CASE("summarize hand cases") {
  std::vector<EstimateRecord> records;
  records.push_back({0, EstimatorKind::hill, Mode::oracle, 0.4, false, ""});
  records.push_back({1, EstimatorKind::hill, Mode::oracle, 0.6, false, ""});
  const std::vector<SummaryRow> rows = summarize(records, 0.5, 100);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].count == 2);
  CHECK(rows[0].mean == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(rows[0].bias == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(rows[0].sd == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(rows[0].rmse == doctest::Approx(0.1).epsilon(1e-12));

  // constant estimates
  std::vector<EstimateRecord> constant;
  for (std::size_t r = 0; r < 5; ++r) {
    constant.push_back({r, EstimatorKind::hill, Mode::distributed, 0.7, false, ""});
  }
  const std::vector<SummaryRow> crows = summarize(constant, 0.5, 10);
  CHECK(crows[0].bias == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(crows[0].sd == 0.0);
  CHECK(crows[0].rmse == doctest::Approx(0.2).epsilon(1e-14));

  // empty group
  std::vector<EstimateRecord> failed;
  failed.push_back({0, EstimatorKind::hill, Mode::oracle, 0.0, true, "x"});
  CHECK_THROWS_AS(summarize(failed, 0.5, 10), std::invalid_argument);
}

TEST_CASE("rmse identity holds on random inputs") {
  std::mt19937_64 rng(321);
  std::uniform_real_distribution<double> unif(0.1, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<EstimateRecord> records;
    const std::size_t count = 2 + trial % 40;
    for (std::size_t r = 0; r < count; ++r) {
      records.push_back({r, EstimatorKind::moment, Mode::distributed, unif(rng), false, ""});
    }
    const SummaryRow row = summarize(records, 0.5, 64)[0];
    CHECK(std::abs(row.rmse * row.rmse - row.bias * row.bias - row.sd * row.sd) <= 1e-12);
  }
}

TEST_CASE("ks_statistic hand cases") {
  const auto uniform_cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_statistic({0.5}, uniform_cdf) == 0.5);

  const std::size_t n = 20;
  std::vector<double> staircase(n);
  for (std::size_t i = 1; i <= n; ++i) {
    staircase[i - 1] = (static_cast<double>(i) - 0.5) / static_cast<double>(n);
  }
  CHECK(ks_statistic(staircase, uniform_cdf) == doctest::Approx(0.5 / n).epsilon(1e-12));

  CHECK_THROWS_AS(ks_statistic({}, uniform_cdf), std::invalid_argument);
}

TEST_CASE("two sample ks hand and brute-force cases") {
  CHECK(two_sample_ks({0.0}, {1.0}) == 1.0);
  CHECK(two_sample_ks({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
  CHECK_THROWS_AS(two_sample_ks({}, {1.0}), std::invalid_argument);

  std::mt19937_64 rng(888);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> size_dist(1, 40);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<double> a(size_dist(rng));
    std::vector<double> b(size_dist(rng));
    for (double& v : a) v = std::floor(unif(rng) * 10.0);  // force ties
    for (double& v : b) v = std::floor(unif(rng) * 10.0);
    CHECK(two_sample_ks(a, b) == doctest::Approx(testutil::two_sample_ks_brute(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("oracle_gap pairs by replication") {
  std::vector<EstimateRecord> records;
  records.push_back({0, EstimatorKind::hill, Mode::distributed, 1.0, false, ""});
  records.push_back({0, EstimatorKind::hill, Mode::oracle, 0.8, false, ""});
  records.push_back({1, EstimatorKind::hill, Mode::distributed, 2.0, false, ""});
  records.push_back({1, EstimatorKind::hill, Mode::oracle, 2.4, false, ""});
  records.push_back({2, EstimatorKind::hill, Mode::distributed, 9.0, true, "bad"});
  records.push_back({2, EstimatorKind::hill, Mode::oracle, 2.0, false, ""});
  const std::vector<OracleGapRow> rows = oracle_gap(records);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].pairs == 2);
  CHECK(rows[0].diff_mean == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(rows[0].diff_sd == doctest::Approx(0.3).epsilon(1e-12));

  std::vector<EstimateRecord> unpaired;
  unpaired.push_back({0, EstimatorKind::hill, Mode::distributed, 1.0, false, ""});
  CHECK_THROWS_AS(oracle_gap(unpaired), std::invalid_argument);
}

TEST_CASE("normal cdf is accurate against an independent series") {
  for (double x = -3.0; x <= 3.0; x += 0.25) {
    CHECK(std::abs(normal_cdf(x) - testutil::normal_cdf_series(x)) <= 1e-7);
  }
  CHECK(normal_cdf(0.0) == 0.5);
}
