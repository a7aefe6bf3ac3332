#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "shiftaudit/distributions.hpp"
#include "support.hpp"

namespace shiftaudit {
namespace {

using testing::expect_error;

// Two-sample Kolmogorov-Smirnov statistic.
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

double ks_critical_1pct(std::size_t n, std::size_t m) {
  return 1.628 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

std::vector<double> feature_where(const Dataset& d, int y, std::optional<int> z) {
  std::vector<double> out;
  for (Index i = 0; i < d.size(); ++i) {
    if (static_cast<int>(d.labels()(i)) == y && (!z || d.groups()(i) == *z)) out.push_back(d.row(i)(0));
  }
  return out;
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

DistributionPtr gaussian(double tau, double group_mix) {
  return std::make_shared<GaussianGroupDistribution>(GaussianGroupParams::with_tau(tau, group_mix));
}

TEST(GaussianGroup, TauZeroMakesGroupsIdentical) {
  const Dataset d = sample_gaussian_gds({0.0, 100000}, 0.5, 1);
  EXPECT_NEAR(mean_of(feature_where(d, 1, std::nullopt)), 1.0, 0.02);
  std::vector<double> g0;
  std::vector<double> g1;
  for (Index i = 0; i < d.size(); ++i) (d.groups()(i) == 0 ? g0 : g1).push_back(d.row(i)(0));
  EXPECT_LT(ks_statistic(g0, g1), ks_critical_1pct(g0.size(), g1.size()));
}

TEST(GaussianGroup, TauShiftsGroupOne) {
  const Dataset d = sample_gaussian_gds({2.0, 100000}, 0.5, 2);
  EXPECT_NEAR(mean_of(feature_where(d, 0, 1)), 1.0, 0.02);
  EXPECT_NEAR(mean_of(feature_where(d, 0, 0)), -1.0, 0.02);
  EXPECT_NEAR(mean_of(feature_where(d, 1, 1)), 3.0, 0.02);
}

TEST(GaussianGroup, GroupMixZeroHasOnlyGroupZero) {
  const Dataset d = sample_gaussian_gds({2.0, 5000}, 0.0, 3);
  EXPECT_EQ(d.count_group(1), 0);
}

TEST(GaussianGroup, ComponentParameters) {
  GaussianGroupParams p;
  p.groups[0] = {0.0, 0.5, 1.0};
  p.groups[1] = {2.0, 2.0, 2.0};
  p.group_mix = 1.0;
  p.offset = 0.25;
  GaussianGroupDistribution dist(p);
  Rng rng = make_rng(4);
  const Dataset d = dist.sample(100000, rng);
  const auto y1 = feature_where(d, 1, 1);
  EXPECT_NEAR(mean_of(y1), 4.25, 0.03);
  double ss = 0.0;
  for (double v : y1) ss += (v - 4.25) * (v - 4.25);
  EXPECT_NEAR(std::sqrt(ss / y1.size()), 2.0, 0.03);

  p.groups[0].sd = 0.0;
  expect_error(ErrorCode::InvalidArgument, [&] { GaussianGroupDistribution bad(p); });
}

TEST(GaussianGroup, SameSeedSameSample) {
  const Dataset a = sample_gaussian_gds({1.0, 1000}, 0.5, 9);
  const Dataset b = sample_gaussian_gds({1.0, 1000}, 0.5, 9);
  const Dataset c = sample_gaussian_gds({1.0, 1000}, 0.5, 10);
  EXPECT_EQ(a.features(), b.features());
  EXPECT_EQ(a.groups(), b.groups());
  EXPECT_NE(a.features(), c.features());
}

TEST(Mixture, Boundaries) {
  const MixtureSpec all_base{1.0, gaussian(0.0, 0.0), gaussian(0.0, 1.0)};
  EXPECT_EQ(sample_mixture(all_base, 1000, 1).count_group(1), 0);
  const MixtureSpec all_alt{0.0, gaussian(0.0, 0.0), gaussian(0.0, 1.0)};
  EXPECT_EQ(sample_mixture(all_alt, 1000, 1).count_group(0), 0);
}

TEST(Mixture, AlphaOneReplaysBaseSampler) {
  const auto base = gaussian(1.0, 0.5);
  const Dataset mixed = sample_mixture({1.0, base, gaussian(3.0, 0.5)}, 500, 21);
  // The mixture spends one uniform per row on the component choice, then draws the base batch.
  Rng rng = make_rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 500; ++i) unit(rng);
  const Dataset direct = base->sample(500, rng);
  EXPECT_EQ(mixed.features(), direct.features());
  EXPECT_EQ(mixed.labels(), direct.labels());
}

TEST(Mixture, HalfWeightFraction) {
  const MixtureSpec spec{0.5, gaussian(0.0, 0.5), gaussian(2.0, 0.5)};
  double share = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto tagged = sample_mixture_tagged(spec, 100000, seed);
    share += std::accumulate(tagged.from_first.begin(), tagged.from_first.end(), 0.0) / 100000.0;
  }
  share /= 5.0;
  EXPECT_GE(share, 0.495);
  EXPECT_LE(share, 0.505);
}

TEST(Underrep, BetaOneHasNoGroupOne) {
  EXPECT_EQ(sample_underrep({1.0, gaussian(2.0, 0.0), gaussian(2.0, 1.0)}, 1000, 5).count_group(1), 0);
}

TEST(Underrep, BetaHalfMatchesBalancedGroupCounts) {
  const Dataset d = sample_underrep({0.5, gaussian(2.0, 0.0), gaussian(2.0, 1.0)}, 20000, 6);
  const double expected = 10000.0;
  const double chi2 = std::pow(d.count_group(0) - expected, 2) / expected +
                      std::pow(d.count_group(1) - expected, 2) / expected;
  EXPECT_LT(chi2, 6.635);  // chi-square, 1 dof, 1%
}

TEST(Underrep, BetaPointNineGroupShare) {
  const Dataset d = sample_underrep({0.9, gaussian(2.0, 0.0), gaussian(2.0, 1.0)}, 100000, 7);
  EXPECT_NEAR(static_cast<double>(d.count_group(0)) / 100000.0, 0.9, 0.005);
}

TEST(Underrep, ConditionalLawGivenGroupIsUnchanged) {
  const auto g0 = gaussian(2.0, 0.0);
  const auto g1 = gaussian(2.0, 1.0);
  Rng rng = make_rng(8);
  const Dataset reference = g1->sample(20000, rng);
  for (double beta : {0.5, 0.7, 0.9}) {
    const Dataset d = sample_underrep({beta, g0, g1}, 60000, 9);
    for (int y : {0, 1}) {
      const auto a = feature_where(d, y, 1);
      const auto b = feature_where(reference, y, 1);
      EXPECT_LT(ks_statistic(a, b), ks_critical_1pct(a.size(), b.size())) << "beta " << beta << " y " << y;
    }
  }
}

TEST(Underrep, RejectsBetaBelowHalf) {
  expect_error(ErrorCode::InvalidArgument, [] { make_underrep({0.4, gaussian(0, 0), gaussian(0, 1)}); });
}

TEST(LatentLinear, LabelsFollowTheScoreSign) {
  LatentLinearParams p;
  p.weights = Eigen::Vector2d(1.0, -2.0);
  p.bias = 0.5;
  LatentLinearDistribution dist(p);
  Rng rng = make_rng(10);
  const Dataset d = dist.sample(2000, rng);
  for (Index i = 0; i < d.size(); ++i) {
    const double score = d.row(i)(0) - 2.0 * d.row(i)(1) + 0.5;
    EXPECT_EQ(d.labels()(i), score > 0.0 ? 1.0 : 0.0);
  }
  p.task = TaskKind::Regression;
  LatentLinearDistribution reg(p);
  const Dataset r = reg.sample(10, rng);
  EXPECT_NEAR(r.labels()(3), r.row(3)(0) - 2.0 * r.row(3)(1) + 0.5, 1e-12);
}

TEST(Pool, DrawsWithoutReplacement) {
  FeatureMatrix x(100, 1);
  for (Index i = 0; i < 100; ++i) x(i, 0) = static_cast<double>(i);
  PoolDistribution pool(Dataset(x, Eigen::VectorXd::Zero(100), GroupVector::Zero(100), TaskKind::Classification));
  Rng rng = make_rng(11);
  const Dataset d = pool.sample(100, rng);
  std::set<double> seen(d.features().col(0).begin(), d.features().col(0).end());
  EXPECT_EQ(seen.size(), 100u);
  expect_error(ErrorCode::PoolExhausted, [&] { pool.sample(101, rng); });
}

TEST(Pool, ReserveSplitIsDisjoint) {
  FeatureMatrix x(50, 1);
  for (Index i = 0; i < 50; ++i) x(i, 0) = static_cast<double>(i);
  const Dataset data(x, Eigen::VectorXd::Zero(50), GroupVector::Zero(50), TaskKind::Classification);
  const auto [reserved, remainder] = reserve_split(data, 12, 3);
  EXPECT_EQ(reserved.size(), 12);
  EXPECT_EQ(remainder.size(), 38);
  std::set<double> all(reserved.features().col(0).begin(), reserved.features().col(0).end());
  all.insert(remainder.features().col(0).begin(), remainder.features().col(0).end());
  EXPECT_EQ(all.size(), 50u);
}

}  // namespace
}  // namespace shiftaudit
