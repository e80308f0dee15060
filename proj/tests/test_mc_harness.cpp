#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "frontier/mc_harness.hpp"

using namespace frontier;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.scenario = ScenarioKind::UniformTriangle;
  cfg.replications = 12;
  cfg.sample_size = 800;
  cfg.query_points = {0.5, 1.0};
  cfg.estimators = {parse_estimator_spec("fdh"), parse_estimator_spec("knownrho:2@grid1"),
                    parse_estimator_spec("pickands-rho@k20"), parse_estimator_spec("moment@k30"),
                    parse_estimator_spec("xq-moment:0.01")};
  cfg.base_seed = 99;
  return cfg;
}

}  // namespace

TEST(FdhMomentOracle, LeadingTerms) {
  EXPECT_NEAR(fdh_moment_oracle(1, 5000, 2.0, 1.0), std::sqrt(std::numbers::pi) / (2 * std::sqrt(5000.0)), 1e-15);
  EXPECT_NEAR(fdh_moment_oracle(1, 5000, 2.0, 1.0), 0.012533141373155002512, 1e-15);
  EXPECT_NEAR(fdh_moment_oracle(2, 5000, 2.0, 1.0), 2.0e-4, 1e-17);
  // rho = 2: the first moment scales as n^{-1/2}, the second as n^{-1}.
  EXPECT_NEAR(fdh_moment_oracle(2, 20000, 2.0, 1.0), 0.25 * fdh_moment_oracle(2, 5000, 2.0, 1.0), 1e-18);
  EXPECT_NEAR(fdh_moment_oracle(1, 20000, 2.0, 1.0), 0.5 * fdh_moment_oracle(1, 5000, 2.0, 1.0), 1e-16);
  EXPECT_THROW(fdh_moment_oracle(0, 10, 2.0, 1.0), Error);
  EXPECT_THROW(fdh_moment_oracle(1, 10, 0.0, 1.0), Error);
}

TEST(EstimatorSpec, Parsing) {
  const auto a = parse_estimator_spec("knownrho:2@grid1");
  EXPECT_EQ(a.kind, EstimatorKind::KnownRhoStar);
  EXPECT_EQ(a.rho, 2.0);
  EXPECT_EQ(a.policy.mode, KPolicy::Mode::Grid);
  EXPECT_EQ(a.label(), "knownrho:2@grid1");

  const auto b = parse_estimator_spec("knownell:2:1", KPolicy::fixed(70));
  EXPECT_EQ(b.kind, EstimatorKind::KnownEll);
  EXPECT_EQ(b.ell, 1.0);
  EXPECT_EQ(b.label(), "knownell:2:1@k70");

  EXPECT_EQ(parse_estimator_spec("moment@k200").policy.value, 200u);
  EXPECT_EQ(parse_estimator_spec("pickands-rho@1250").policy.value, 1250u);
  EXPECT_EQ(parse_estimator_spec("fdh").label(), "fdh");
  EXPECT_EQ(parse_estimator_spec("xq-pickands:0.01").label(), "xq-pickands:0.01");
  EXPECT_EQ(parse_estimator_spec("pickands").label(), "pickands@auto");

  for (const char* bad : {"nope", "knownrho", "knownrho:-1", "knownell:2", "xq-moment:2", "moment@kx", "robust",
                          "fdh:3", "knownrho:abc"}) {
    try {
      parse_estimator_spec(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ConfigError) << bad;
    }
  }
}

TEST(RunExperiment, MseDecomposition) {
  auto cfg = small_config();
  cfg.keep_samples = true;
  const auto rep = run_experiment(cfg);
  ASSERT_EQ(rep.cells.size(), 10u);
  for (const auto& c : rep.cells) {
    if (c.successes < 2) continue;
    const double r = static_cast<double>(c.successes);
    double mean = 0.0;
    for (double e : c.errors) mean += e;
    mean /= r;
    double var = 0.0;
    for (double e : c.errors) var += (e - mean) * (e - mean);
    var /= r - 1;
    EXPECT_NEAR(c.mse, c.bias * c.bias + var * (r - 1) / r, 1e-12 * std::max(1.0, c.mse)) << c.estimator;
    EXPECT_NEAR(c.bias, mean, 1e-15);
  }
}

TEST(RunExperiment, CellLayoutAndNa) {
  const auto rep = run_experiment(small_config());
  EXPECT_EQ(rep.cells[0].x, 0.5);
  EXPECT_EQ(rep.cells[0].estimator, "fdh");
  EXPECT_FALSE(rep.cells[0].avg_ci_length.has_value());
  EXPECT_FALSE(rep.cells[0].coverage.has_value());
  EXPECT_EQ(rep.cells[0].failure_rate, 0.0);
  EXPECT_LE(rep.cells[0].bias, 0.0);
  EXPECT_EQ(rep.cells[5].x, 1.0);
  EXPECT_TRUE(rep.cells[6].avg_ci_length.has_value());
  EXPECT_EQ(rep.cells[7].truth, 2.0);
  EXPECT_NEAR(rep.cells[9].truth, 0.9, 1e-12);
  for (const auto& c : rep.cells) {
    EXPECT_GE(c.failure_rate, 0.0);
    EXPECT_LE(c.failure_rate, 1.0);
    if (c.coverage) {
      EXPECT_GE(*c.coverage, 0.0);
      EXPECT_LE(*c.coverage, 1.0);
    }
  }
}

TEST(RunExperiment, SingleReplication) {
  auto cfg = small_config();
  cfg.replications = 1;
  const auto rep = run_experiment(cfg);
  for (const auto& c : rep.cells) {
    if (c.successes == 1) {
      EXPECT_NEAR(c.mse, c.bias * c.bias, 1e-15);
      if (c.coverage) {
        EXPECT_TRUE(*c.coverage == 0.0 || *c.coverage == 1.0);
      }
    } else {
      EXPECT_EQ(c.failure_rate, 1.0);
      EXPECT_TRUE(std::isnan(c.bias));
    }
  }
}

TEST(RunExperiment, ReproducibleAndThreadIndependent) {
  auto cfg = small_config();
  const auto a = emit_report_table(run_experiment(cfg), TableFormat::Csv);
  const auto b = emit_report_table(run_experiment(cfg), TableFormat::Csv);
  cfg.threads = 4;
  const auto c = emit_report_table(run_experiment(cfg), TableFormat::Csv);
  cfg.threads = 0;
  const auto d = emit_report_table(run_experiment(cfg), TableFormat::Csv);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_EQ(a, d);
  cfg.base_seed = 100;
  EXPECT_NE(a, emit_report_table(run_experiment(cfg), TableFormat::Csv));
}

TEST(RunExperiment, ConfigErrors) {
  auto cfg = small_config();
  cfg.query_points = {0.0};
  try {
    run_experiment(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
  }
  cfg = small_config();
  cfg.replications = 0;
  EXPECT_THROW(run_experiment(cfg), Error);
  cfg = small_config();
  cfg.estimators.clear();
  EXPECT_THROW(run_experiment(cfg), Error);
  cfg = small_config();
  cfg.ci_level = 1.0;
  EXPECT_THROW(run_experiment(cfg), Error);
}

TEST(RunExperiment, FailuresAreCounted) {
  auto cfg = small_config();
  cfg.sample_size = 30;
  cfg.query_points = {0.2};  // N_x around 1
  cfg.estimators = {parse_estimator_spec("pickands-rho@k5")};
  const auto rep = run_experiment(cfg);
  EXPECT_EQ(rep.cells[0].failure_rate, 1.0);
  EXPECT_EQ(rep.cells[0].successes, 0u);
}

TEST(ReportTable, EmptyAndRoundTrip) {
  ExperimentReport empty;
  EXPECT_EQ(emit_report_table(empty, TableFormat::Csv), "x,estimator,k_mean,bias,mse,avg_ci_length,coverage,failure_rate\n");
  EXPECT_EQ(parse_report_csv(emit_report_table(empty, TableFormat::Csv)).cells.size(), 0u);

  ExperimentReport one;
  ReportCell c;
  c.x = 0.25;
  c.estimator = "knownrho:2@grid1";
  c.k_mean = 186.123456789;
  c.bias = -1.23456789e-4;
  c.mse = 3.3e-5;
  c.avg_ci_length = 0.0712345678;
  c.coverage = 0.95;
  c.failure_rate = 0.0;
  one.cells.push_back(c);
  const auto text = emit_report_table(one, TableFormat::Csv);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  const auto back = parse_report_csv(text);
  ASSERT_EQ(back.cells.size(), 1u);
  const auto& d = back.cells[0];
  EXPECT_EQ(d.estimator, c.estimator);
  EXPECT_NEAR(d.k_mean, c.k_mean, 5e-6 * c.k_mean);
  EXPECT_NEAR(d.bias, c.bias, 5e-6 * std::abs(c.bias));
  EXPECT_NEAR(*d.avg_ci_length, *c.avg_ci_length, 5e-6 * *c.avg_ci_length);
  EXPECT_EQ(*d.coverage, 0.95);
  EXPECT_EQ(emit_report_table(back, TableFormat::Csv), text);

  c.avg_ci_length.reset();
  c.coverage.reset();
  one.cells[0] = c;
  const auto na = emit_report_table(one, TableFormat::Csv);
  EXPECT_NE(na.find(",NA,NA,"), std::string::npos);
  EXPECT_FALSE(parse_report_csv(na).cells[0].coverage.has_value());

  const auto aligned = emit_report_table(one, TableFormat::Aligned);
  EXPECT_NE(aligned.find("knownrho:2@grid1"), std::string::npos);
  EXPECT_THROW(parse_report_csv("h\n1,2,3\n"), Error);
}
