#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "shiftaudit/audit.hpp"
#include "shiftaudit/distributions.hpp"
#include "shiftaudit/report.hpp"
#include "support.hpp"

namespace shiftaudit {
namespace {

using testing::expect_error;

DistributionPtr group(double tau, int z) {
  return std::make_shared<GaussianGroupDistribution>(GaussianGroupParams::with_tau(tau, z));
}

AuditConfig gds_config(double beta, double tau, int depth, Index n, int runs) {
  AuditConfig cfg;
  cfg.statistic = Statistic::InterGroupGap;
  TreeParams tree;
  tree.max_depth = depth;
  cfg.learner = {tree, 0};
  cfg.sample_size = n;
  cfg.normative = make_underrep({0.5, group(tau, 0), group(tau, 1)});
  cfg.alternative = make_underrep({beta, group(tau, 0), group(tau, 1)});
  cfg.n_control_runs = runs;
  cfg.n_shifted_runs = runs;
  cfg.seed = 3;
  return cfg;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

TEST(Audit, ConstantLearnerCarriesNoSignal) {
  AuditConfig cfg = gds_config(1.0, 2.0, 5, 3000, 10);
  cfg.learner = LearnerSpec::defaults(Algorithm::Constant);
  const auto gap = run_audit(cfg);
  for (double s : gap.control_scores) EXPECT_EQ(s, 0.0);
  for (double s : gap.shifted_scores) EXPECT_EQ(s, 0.0);
  EXPECT_EQ(gap.auc_roc, 0.5);

  cfg.statistic = Statistic::OverallAccuracy;
  const auto overall = run_audit(cfg);
  for (double s : overall.control_scores) EXPECT_EQ(s, 0.5);
  for (double s : overall.shifted_scores) EXPECT_EQ(s, 0.5);
}

TEST(Audit, ReportShapeAndVerdicts) {
  AuditConfig cfg = gds_config(1.0, 2.0, 8, 3000, 12);
  cfg.n_shifted_runs = 7;
  const auto report = run_audit(cfg);
  ASSERT_EQ(report.control_scores.size(), 12u);
  ASSERT_EQ(report.shifted_scores.size(), 7u);
  ASSERT_EQ(report.verdicts.size(), 7u);
  EXPECT_EQ(report.threshold, percentile_threshold(report.control_scores, 0.9));
  int rejected = 0;
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_EQ(report.verdicts[i], report.shifted_scores[i] > report.threshold);
    rejected += report.verdicts[i];
  }
  EXPECT_DOUBLE_EQ(report.tpr_at_percentile, rejected / 7.0);
  EXPECT_EQ(report.auc_roc, auc_roc(report.control_scores, report.shifted_scores));
  for (const auto& run : report.control_runs) EXPECT_EQ(run.target_train_size, 600);
}

TEST(Audit, ResultsDoNotDependOnWorkerCount) {
  AuditConfig cfg = gds_config(0.8, 2.0, 6, 3000, 10);
  cfg.workers = 1;
  const auto serial = run_audit_with_baseline(cfg);
  cfg.workers = 4;
  const auto parallel = run_audit_with_baseline(cfg);
  EXPECT_EQ(audit_report_json(cfg, serial.attack, &serial.naive), audit_report_json(cfg, parallel.attack, &parallel.naive));
}

TEST(Audit, SeedsDifferAcrossSettingsAndRuns) {
  const AuditConfig cfg = gds_config(1.0, 2.0, 5, 3000, 10);
  EXPECT_NE(run_seed(cfg, "control", 0), run_seed(cfg, "shifted", 0));
  EXPECT_NE(run_seed(cfg, "control", 0), run_seed(cfg, "control", 1));
  const auto report = run_audit(cfg);
  EXPECT_NE(report.control_runs[0].seed, report.shifted_runs[0].seed);
}

TEST(Audit, NoShiftMatchesControlDistribution) {
  const auto report = run_audit(gds_config(0.5, 2.0, 8, 4000, 60));
  const double critical = 1.628 * std::sqrt(2.0 / 60.0);
  EXPECT_LT(ks_statistic(report.control_scores, report.shifted_scores), critical);
  // Control gaps are centered near zero.
  int positive = 0;
  for (double s : report.control_scores) positive += s > 0.0;
  EXPECT_GT(positive, 15);
  EXPECT_LT(positive, 45);
}

TEST(Audit, StrongShiftExceedsControlThreshold) {
  const auto report = run_audit(gds_config(1.0, 2.0, 12, 20000, 30));
  EXPECT_GT(report.tpr_at_percentile, 0.5);
  int positive = 0;
  for (double s : report.shifted_scores) positive += s > 0.0;
  EXPECT_GT(positive, 20);
}

TEST(Audit, RaisingPercentileNeverRaisesTpr) {
  const auto report = run_audit(gds_config(0.9, 2.0, 10, 5000, 20));
  double previous = 1.0;
  for (double p = 0.05; p < 1.0; p += 0.05) {
    const auto r = make_report(report.statistic, p, report.control_runs, report.shifted_runs);
    EXPECT_LE(r.tpr_at_percentile, previous);
    previous = r.tpr_at_percentile;
  }
}

TEST(Audit, DiagnosticsRecordPerformanceDrop) {
  // Overall accuracy under a rotated decision boundary.
  LatentLinearParams base;
  base.weights = Eigen::Vector2d(1.0, 0.0);
  LatentLinearParams rotated = base;
  rotated.weights = Eigen::Vector2d(0.0, 1.0);
  AuditConfig cfg;
  cfg.statistic = Statistic::OverallAccuracy;
  cfg.learner = LearnerSpec::defaults(Algorithm::Logit);
  cfg.sample_size = 3000;
  cfg.normative = std::make_shared<LatentLinearDistribution>(base);
  cfg.alternative = std::make_shared<LatentLinearDistribution>(rotated);
  cfg.n_control_runs = 10;
  cfg.n_shifted_runs = 10;
  const auto report = run_audit(cfg);
  for (const auto& run : report.control_runs) EXPECT_GT(run.target_test_performance, 0.95);
  for (const auto& run : report.shifted_runs) EXPECT_LT(run.target_test_performance, 0.7);
  EXPECT_EQ(report.auc_roc, 1.0);
}

TEST(Audit, GameWinRateMatchesTprIdentity) {
  AuditConfig cfg = gds_config(1.0, 2.0, 12, 20000, 30);
  const auto report = run_audit(cfg);
  const double fpr = tpr_at_threshold(report.control_scores, report.threshold);
  int wins = 0;
  const int games = 60;
  for (int g = 0; g < games; ++g) wins += play_game(cfg, report.threshold, run_seed(cfg, "game", g)).win;
  const double expected = 0.5 * (1.0 - fpr) + 0.5 * report.tpr_at_percentile;
  EXPECT_NEAR(wins / static_cast<double>(games), expected, 3.0 * std::sqrt(0.25 / games) + 0.1);
}

TEST(NaiveBaseline, NoShiftGivesNominalRate) {
  const auto report = naive_baseline(gds_config(0.5, 2.0, 8, 4000, 60));
  EXPECT_LT(report.tpr_at_percentile, 0.3);
  EXPECT_NEAR(report.auc_roc, 0.5, 0.2);
}

TEST(NaiveBaseline, ScoresAreAbsoluteGroupDisparity) {
  const auto report = naive_baseline(gds_config(1.0, 2.0, 8, 4000, 10));
  for (const auto& run : report.shifted_runs) {
    ASSERT_TRUE(run.target_group_performance[0] && run.target_group_performance[1]);
    EXPECT_DOUBLE_EQ(run.naive_score, std::abs(*run.target_group_performance[0] - *run.target_group_performance[1]));
  }
}

TEST(AuditConfig, Validation) {
  AuditConfig cfg = gds_config(1.0, 2.0, 5, 3000, 10);
  cfg.n_control_runs = 9;
  expect_error(ErrorCode::InvalidArgument, [&] { cfg.validate(); });
  cfg = gds_config(1.0, 2.0, 5, 3000, 10);
  cfg.alternative = nullptr;
  expect_error(ErrorCode::ConfigError, [&] { cfg.validate(); });
  cfg = gds_config(1.0, 2.0, 5, 3000, 10);
  cfg.percentile = 1.0;
  expect_error(ErrorCode::InvalidArgument, [&] { cfg.validate(); });
}

TEST(Audit, FailingRunsAreReportedTogether) {
  AuditConfig cfg = gds_config(1.0, 2.0, 5, 300, 10);  // attack-test part too small for group bundles
  try {
    run_audit(cfg);
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RunFailed);
    EXPECT_NE(std::string(e.what()).find("control run 0"), std::string::npos) << e.what();
  }
}

TEST(Enums, RoundTrip) {
  for (auto s : {Statistic::OverallAccuracy, Statistic::InterGroupGap}) EXPECT_EQ(parse_statistic(to_string(s)), s);
  for (auto o : {GapOrientation::Learned, GapOrientation::Performance, GapOrientation::Absolute}) {
    EXPECT_EQ(parse_gap_orientation(to_string(o)), o);
  }
  expect_error(ErrorCode::ConfigError, [] { parse_statistic("accuracy"); });
}

}  // namespace
}  // namespace shiftaudit
