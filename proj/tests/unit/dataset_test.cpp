#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <gtest/gtest.h>

#include "shiftaudit/dataset.hpp"
#include "support.hpp"

namespace shiftaudit {
namespace {

using testing::expect_error;
using testing::Gen;

// Rows carry their own index as the only feature so partitions can be traced.
Dataset indexed_dataset(Index n, double class1_share, std::uint64_t seed) {
  Gen gen(seed);
  FeatureMatrix x(n, 1);
  Eigen::VectorXd y(n);
  GroupVector z(n);
  const auto ones = static_cast<Index>(std::llround(class1_share * static_cast<double>(n)));
  for (Index i = 0; i < n; ++i) {
    x(i, 0) = static_cast<double>(i);
    y(i) = i < ones ? 1.0 : 0.0;
    z(i) = gen.coin() ? 1 : 0;
  }
  return Dataset(std::move(x), std::move(y), std::move(z), TaskKind::Classification);
}

std::vector<double> ids(const Dataset& d) {
  std::vector<double> out(d.features().col(0).begin(), d.features().col(0).end());
  std::sort(out.begin(), out.end());
  return out;
}

TEST(StratifiedSplit, EightExamplesTwoWay) {
  const Dataset data = indexed_dataset(8, 0.5, 1);
  PartitionPlan plan;
  plan.fractions = {0.5, 0.5, 0, 0, 0};
  plan.seed = 1;
  const auto parts = stratified_split(data, plan);
  for (int p = 0; p < 2; ++p) {
    EXPECT_EQ(parts[p].size(), 4);
    EXPECT_EQ(parts[p].count_label(1.0), 2);
    EXPECT_EQ(parts[p].count_label(0.0), 2);
  }
  for (int p = 2; p < 5; ++p) EXPECT_TRUE(parts[p].is_empty());
}

TEST(StratifiedSplit, SeedDeterminism) {
  const Dataset data = indexed_dataset(8, 0.5, 1);
  PartitionPlan plan;
  plan.fractions = {0.5, 0.5, 0, 0, 0};
  plan.seed = 1;
  const auto a = stratified_split(data, plan);
  const auto b = stratified_split(data, plan);
  plan.seed = 2;
  const auto c = stratified_split(data, plan);
  EXPECT_EQ(a[0].features(), b[0].features());
  EXPECT_EQ(a[1].features(), b[1].features());
  EXPECT_NE(a[0].features(), c[0].features());
  EXPECT_EQ(c[0].count_label(1.0), 2);
  EXPECT_EQ(c[1].count_label(1.0), 2);
}

TEST(StratifiedSplit, ThousandExamplesFiveWay) {
  const Dataset data = indexed_dataset(1000, 0.7, 2);
  PartitionPlan plan;
  plan.seed = 5;
  const auto parts = stratified_split(data, plan);
  for (const auto& p : parts) {
    EXPECT_EQ(p.size(), 200);
    EXPECT_LE(std::abs(static_cast<double>(p.count_label(1.0)) - 0.7 * 200.0), 1.0);
  }
}

TEST(StratifiedSplit, PartitionAndStratificationProperties) {
  Gen gen(11);
  for (int trial = 0; trial < 300; ++trial) {
    const Index n = gen.integer(20, 400);
    const Dataset data = indexed_dataset(n, gen.uniform(0.2, 0.8), gen.integer(0, 1 << 30));
    PartitionPlan plan;
    double total = 0.0;
    for (auto& f : plan.fractions) total += (f = gen.uniform(0.1, 1.0));
    for (auto& f : plan.fractions) f /= total;
    plan.seed = static_cast<std::uint64_t>(trial);

    std::optional<Partitions> split;
    try {
      split = stratified_split(data, plan);
    } catch (const Error& e) {
      // Tiny strata may legitimately fail to fill a part.
      EXPECT_TRUE(e.code() == ErrorCode::EmptyPartition || e.code() == ErrorCode::StratumTooSmall) << e.what();
      continue;
    }
    const Partitions& parts = *split;
    std::vector<double> all;
    for (const auto& p : parts) {
      const auto part_ids = ids(p);
      all.insert(all.end(), part_ids.begin(), part_ids.end());
    }
    std::sort(all.begin(), all.end());
    EXPECT_EQ(all, ids(data));  // union is the input, and no row appears twice

    for (double c : {0.0, 1.0}) {
      const double class_total = static_cast<double>(data.count_label(c));
      for (std::size_t p = 0; p < kPartitionCount; ++p) {
        EXPECT_LE(std::abs(static_cast<double>(parts[p].count_label(c)) - plan.fractions[p] * class_total), 1.0);
      }
    }
  }
}

TEST(StratifiedSplit, RejectsBadPlans) {
  const Dataset data = indexed_dataset(50, 0.5, 1);
  PartitionPlan plan;
  plan.fractions = {0.5, 0.5, 0.5, 0, 0};
  expect_error(ErrorCode::InvalidArgument, [&] { stratified_split(data, plan); });
  plan.fractions = {0.99, 0.01, 0, 0, 0};
  expect_error(ErrorCode::EmptyPartition, [&] { stratified_split(indexed_dataset(10, 0.5, 1), plan); });
}

TEST(Apportion, ExactTotals) {
  Gen gen(12);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> fractions(5);
    double total = 0.0;
    for (auto& f : fractions) total += (f = gen.uniform(0.0, 1.0));
    for (auto& f : fractions) f /= total;
    std::vector<Index> bonus(5, 0);
    const Index n = gen.integer(0, 1000);
    const auto counts = apportion(n, fractions, bonus);
    Index sum = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      sum += counts[i];
      EXPECT_LT(std::abs(static_cast<double>(counts[i]) - fractions[i] * static_cast<double>(n)), 1.0);
    }
    EXPECT_EQ(sum, n);
  }
}

TEST(Csv, ThreeRowFile) {
  std::istringstream in("f1,f2,y,z\n0.5,1,0,1\n-2,3e-1,1,0\n4,5,1,1\n");
  const Dataset d = read_csv(in, {"y", std::string("z"), TaskKind::Classification});
  EXPECT_EQ(d.size(), 3);
  EXPECT_EQ(d.dim(), 2);
  EXPECT_EQ(d.row(1)(1), 0.3);
  EXPECT_EQ(d.labels()(1), 1.0);
  EXPECT_EQ(d.groups()(2), 1);
}

TEST(Csv, GroupColumnIsOptional) {
  std::istringstream in("y,a\n1,2\n0,3\n");
  const Dataset d = read_csv(in, {"y", std::nullopt, TaskKind::Classification});
  EXPECT_EQ(d.dim(), 1);
  EXPECT_EQ(d.count_group(0), 2);
}

TEST(Csv, BadCellNamesRowAndColumn) {
  std::istringstream in("f1,f2,y,z\n1,2,0,0\nabc,2,1,0\n");
  try {
    read_csv(in, {"y", std::string("z"), TaskKind::Classification});
    FAIL() << "no error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.column(), "f1");
  }
}

TEST(Csv, SchemaProblems) {
  std::istringstream missing_label("a,b\n1,2\n");
  expect_error(ErrorCode::SchemaMismatch, [&] { read_csv(missing_label, {"y", std::nullopt, TaskKind::Classification}); });
  std::istringstream bad_label("a,y\n1,2\n");
  expect_error(ErrorCode::ParseError, [&] { read_csv(bad_label, {"y", std::nullopt, TaskKind::Classification}); });
  std::istringstream regression("a,y\n1,2.5\n");
  EXPECT_EQ(read_csv(regression, {"y", std::nullopt, TaskKind::Regression}).labels()(0), 2.5);
}

TEST(Csv, WriteThenReadRoundTrips) {
  const Dataset data = testing::separated_gaussians(50, 3);
  std::stringstream buffer;
  write_csv(buffer, data);
  const Dataset back = read_csv(buffer, {"y", std::string("z"), TaskKind::Classification});
  EXPECT_EQ(back.features(), data.features());
  EXPECT_EQ(back.labels(), data.labels());
  EXPECT_EQ(back.groups(), data.groups());
}

TEST(Dataset, RejectsMalformedColumns) {
  expect_error(ErrorCode::DimensionMismatch, [] {
    Dataset(FeatureMatrix::Zero(3, 1), Eigen::VectorXd::Zero(2), GroupVector::Zero(3), TaskKind::Classification);
  });
  expect_error(ErrorCode::InvalidArgument, [] {
    Dataset(FeatureMatrix::Zero(2, 1), Eigen::VectorXd::Constant(2, 0.5), GroupVector::Zero(2),
            TaskKind::Classification);
  });
}

}  // namespace
}  // namespace shiftaudit
