#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "shiftaudit/attack.hpp"
#include "shiftaudit/distributions.hpp"
#include "support.hpp"

namespace shiftaudit {
namespace {

using testing::expect_error;
using testing::Gen;
using testing::separated_gaussians;

TrainedModel constant_model(double label, Index dim = 2) {
  const Dataset one_class(FeatureMatrix::Zero(3, dim), Eigen::VectorXd::Constant(3, label), GroupVector::Zero(3),
                          TaskKind::Classification);
  return train({ConstantParams{label}, 0}, one_class);
}

std::vector<AttackBundle> synthetic_bundles(const std::vector<double>& target, const std::vector<double>& shadow) {
  std::vector<AttackBundle> out;
  for (double f : target) out.push_back({f, Origin::Target, std::nullopt});
  for (double f : shadow) out.push_back({f, Origin::Shadow, std::nullopt});
  return out;
}

TEST(AttackDataset, BundleCounts) {
  const Dataset queries = separated_gaussians(100, 1);
  const auto target = train(LearnerSpec::defaults(Algorithm::Logit), separated_gaussians(200, 2));
  const std::vector<TrainedModel> shadows{train(LearnerSpec::defaults(Algorithm::Logit), separated_gaussians(200, 3))};
  const auto bundles = build_attack_dataset(target, shadows, queries, 10, 4);
  ASSERT_EQ(bundles.size(), 20u);
  int targets = 0;
  for (const auto& b : bundles) targets += b.origin == Origin::Target;
  EXPECT_EQ(targets, 10);
}

TEST(AttackDataset, SeveralShadowsKeepOriginsBalanced) {
  const Dataset queries = separated_gaussians(100, 1);
  const auto target = constant_model(1.0);
  const std::vector<TrainedModel> shadows{constant_model(0.0), constant_model(0.0), constant_model(1.0)};
  const auto bundles = build_attack_dataset(target, shadows, queries, 10, 4);
  ASSERT_EQ(bundles.size(), 60u);
  int targets = 0;
  for (const auto& b : bundles) targets += b.origin == Origin::Target;
  EXPECT_EQ(targets, 30);
}

TEST(AttackDataset, IdenticalModelsGiveIdenticalFeatures) {
  const Dataset queries = separated_gaussians(200, 5);
  const std::vector<TrainedModel> shadows{constant_model(1.0)};
  const auto bundles = build_attack_dataset(constant_model(1.0), shadows, queries, 20, 6);
  std::vector<double> t;
  std::vector<double> s;
  for (const auto& b : bundles) (b.origin == Origin::Target ? t : s).push_back(b.feature);
  std::sort(t.begin(), t.end());
  std::sort(s.begin(), s.end());
  EXPECT_EQ(t, s);
}

TEST(AttackDataset, BundlesCoverEachQueryOnce) {
  // Only the target's correctness on label-1 rows is nonzero, so summed target
  // features count how often those rows were used.
  Gen gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n_q = gen.integer(1, 20);
    const Index n = n_q * gen.integer(2, 10);
    Dataset queries = separated_gaussians(n, static_cast<std::uint64_t>(trial));
    const std::vector<TrainedModel> shadows{constant_model(0.0)};
    const auto bundles = build_attack_dataset(constant_model(1.0), shadows, queries, n_q, trial);
    double covered = 0.0;
    for (const auto& b : bundles) {
      if (b.origin == Origin::Target) covered += b.feature * static_cast<double>(n_q);
    }
    EXPECT_NEAR(covered, static_cast<double>(queries.count_label(1.0)), 1e-9);
  }
}

TEST(AttackDataset, MemorizingTargetScoresHigher) {
  // The target memorizes the query points themselves; the shadow never saw them.
  LatentLinearParams p;
  p.noise_sd = 1.5;
  LatentLinearDistribution dist(p);
  Rng rng = make_rng(8);
  const Dataset queries = dist.sample(1000, rng);
  TreeParams deep;
  deep.max_depth = 30;
  const auto target = train({deep, 1}, queries);
  const std::vector<TrainedModel> shadows{train({deep, 1}, dist.sample(1000, rng))};
  const auto bundles = build_attack_dataset(target, shadows, queries, 50, 9);
  double t = 0.0;
  double s = 0.0;
  for (const auto& b : bundles) (b.origin == Origin::Target ? t : s) += b.feature;
  EXPECT_GT(t, s);
  EXPECT_EQ(t, 20.0);  // every bundle perfectly memorized
}

TEST(AttackDataset, RejectsTooFewQueries) {
  const std::vector<TrainedModel> shadows{constant_model(0.0)};
  expect_error(ErrorCode::NotEnoughQueries,
               [&] { build_attack_dataset(constant_model(1.0), shadows, separated_gaussians(99, 1), 50, 0); });
  expect_error(ErrorCode::InvalidArgument, [&] {
    build_attack_dataset(constant_model(1.0), std::vector<TrainedModel>{}, separated_gaussians(200, 1), 50, 0);
  });
}

TEST(GroupBundles, BundlesAreGroupPure) {
  const Dataset queries = sample_gaussian_gds({2.0, 1000}, 0.5, 10);
  const std::vector<TrainedModel> shadows{constant_model(0.0, 1)};
  const auto bundles = build_group_bundles(constant_model(1.0, 1), shadows, queries, 50, 11);
  int per_group[2] = {0, 0};
  for (const auto& b : bundles) {
    ASSERT_TRUE(b.group.has_value());
    ++per_group[*b.group];
  }
  EXPECT_EQ(per_group[0], 2 * static_cast<int>(queries.count_group(0) / 50));
  EXPECT_EQ(per_group[1], 2 * static_cast<int>(queries.count_group(1) / 50));
  expect_error(ErrorCode::MissingGroup, [&] {
    build_group_bundles(constant_model(1.0, 1), shadows, sample_gaussian_gds({2.0, 1000}, 0.0, 1), 50, 11);
  });
}

TEST(TrainAttack, SeparatedFeatures) {
  const auto bundles = synthetic_bundles({0.9, 0.9, 0.9, 0.9}, {0.6, 0.6, 0.6, 0.6});
  const auto model = train_attack(bundles, 50);
  EXPECT_EQ(model.n_t, 50);
  EXPECT_EQ(attack_accuracy(model, bundles), 1.0);
  EXPECT_TRUE(model.predicts_target(0.9));
  EXPECT_FALSE(model.predicts_target(0.6));
}

TEST(TrainAttack, NoSignalNearHalf) {
  Gen gen(12);
  std::vector<double> t(400);
  std::vector<double> s(400);
  for (auto& v : t) v = gen.uniform(0.4, 0.8);
  for (auto& v : s) v = gen.uniform(0.4, 0.8);
  const auto bundles = synthetic_bundles(t, s);
  const auto model = train_attack(bundles, 50);
  EXPECT_NEAR(attack_accuracy(model, bundles), 0.5, 3.0 * std::sqrt(0.25 / 800.0) + 0.02);
}

TEST(TrainAttack, SwappingRolesNegatesDirection) {
  Gen gen(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> t(gen.integer(5, 60));
    std::vector<double> s(t.size());
    const double shift = gen.uniform(-0.2, 0.2);
    for (auto& v : t) v = 0.6 + shift + 0.1 * gen.normal();
    for (auto& v : s) v = 0.6 + 0.1 * gen.normal();
    const auto forward = synthetic_bundles(t, s);
    const auto backward = synthetic_bundles(s, t);
    const auto a = train_attack(forward, 10);
    const auto b = train_attack(backward, 10);
    EXPECT_LT(a.weight * b.weight, 0.0);
    EXPECT_NEAR(std::abs(attack_accuracy(a, forward) - 0.5), std::abs(attack_accuracy(b, backward) - 0.5), 1e-9);
  }
}

TEST(TrainAttack, IdenticalModelsAreUnbeatable) {
  const Dataset queries = separated_gaussians(4000, 14);
  const auto model = train(LearnerSpec::defaults(Algorithm::DecisionTree, 3), separated_gaussians(400, 15));
  const std::vector<TrainedModel> shadows{model};
  const auto train_bundles = build_attack_dataset(model, shadows, queries, 20, 16);
  const auto test_bundles = build_attack_dataset(model, shadows, separated_gaussians(4000, 17), 20, 18);
  const auto attack = train_attack(train_bundles, 20);
  // Target and shadow features coincide bundle by bundle, so every rule scores exactly 0.5.
  EXPECT_NEAR(attack_accuracy(attack, test_bundles), 0.5, 3.0 * std::sqrt(0.25 / 400.0));
}

TEST(TrainAttack, RequiresBothOrigins) {
  expect_error(ErrorCode::SingleClass, [] { train_attack(synthetic_bundles({0.5, 0.6}, {}), 10); });
}

TEST(PerformanceOriented, FlipsOnlyWhenNeeded) {
  AttackModel low_is_target{-2.0, 1.0, 10, TaskKind::Classification};
  const auto fixed = low_is_target.performance_oriented();
  EXPECT_TRUE(fixed.predicts_target(0.9));
  EXPECT_FALSE(fixed.predicts_target(0.1));
  // The boundary itself stays at 0.5.
  EXPECT_NEAR(-fixed.bias / fixed.weight, 0.5, 1e-12);

  AttackModel regression{1.0, -0.5, 10, TaskKind::Regression};  // high MSE reads as target
  const auto reg_fixed = regression.performance_oriented();
  EXPECT_TRUE(reg_fixed.predicts_target(0.1));
  EXPECT_FALSE(reg_fixed.predicts_target(0.9));
}

TEST(InterGroupGap, DifferenceOfGroupAccuracies) {
  std::vector<AttackBundle> bundles{
      {0.9, Origin::Target, 0}, {0.2, Origin::Shadow, 0},  // group 0: both right
      {0.9, Origin::Target, 1}, {0.9, Origin::Shadow, 1},  // group 1: shadow wrong
  };
  const AttackModel model{1.0, -0.5, 10, TaskKind::Classification};
  EXPECT_DOUBLE_EQ(inter_group_attack_gap(model, bundles), 1.0 - 0.5);
  bundles.resize(2);
  expect_error(ErrorCode::MissingGroup, [&] { inter_group_attack_gap(model, bundles); });
}

}  // namespace
}  // namespace shiftaudit
