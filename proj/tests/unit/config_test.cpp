#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "shiftaudit/config.hpp"
#include "support.hpp"

namespace shiftaudit {
namespace {

using testing::expect_error;

const char* kGaussians = R"(
[dist.g0]
kind = gaussian_group
group_mix = 0
tau = 2

[dist.g1]
kind = gaussian_group
group_mix = 1
tau = 2

[dist.balanced]
kind = underrep
beta = 0.5
group0 = g0
group1 = g1

[dist.skewed]
kind = underrep
beta = 0.9
group0 = g0
group1 = g1
)";

ExperimentConfig parse(const std::string& text, std::optional<std::uint64_t> seed = std::nullopt) {
  std::istringstream in(text);
  return parse_experiment_config(in, std::filesystem::temp_directory_path(), seed);
}

TEST(Config, FullAudit) {
  const auto cfg = parse(std::string(R"(
[audit]
statistic = inter_group_gap
gap_orientation = absolute
normative = balanced
alternative = skewed
sample_size = 4000
fractions = 0.3, 0.2, 0.2, 0.1, 0.2
n_control_runs = 20
n_shifted_runs = 15
percentile = 0.8
n_q = 25
seed = 42
workers = 3

[learner]
algorithm = dt
max_depth = 9

[output]
dir = /tmp/somewhere
)") + kGaussians);
  const AuditConfig& a = cfg.audit;
  EXPECT_EQ(a.gap_orientation, GapOrientation::Absolute);
  EXPECT_EQ(a.sample_size, 4000);
  EXPECT_EQ(a.partition.fractions[0], 0.3);
  EXPECT_EQ(a.n_control_runs, 20);
  EXPECT_EQ(a.n_shifted_runs, 15);
  EXPECT_EQ(a.percentile, 0.8);
  EXPECT_EQ(a.n_q, 25);
  EXPECT_EQ(a.seed, 42u);
  EXPECT_EQ(a.workers, 3);
  EXPECT_EQ(std::get<TreeParams>(a.learner.params).max_depth, 9);
  EXPECT_EQ(a.alternative->describe().rfind("underrep(0.9", 0), 0u);
  EXPECT_EQ(cfg.output_dir, "/tmp/somewhere");
  EXPECT_FALSE(cfg.sweep);
}

TEST(Config, SeedOverride) {
  const std::string text = std::string("[audit]\nnormative = balanced\nalternative = skewed\nseed = 4\n") + kGaussians;
  EXPECT_EQ(parse(text).audit.seed, 4u);
  EXPECT_EQ(parse(text, 99).audit.seed, 99u);
}

TEST(Config, Rejections) {
  const std::string dists = kGaussians;
  const auto rejects = [&](const std::string& text, const std::string& fragment) {
    try {
      parse(text + dists);
      ADD_FAILURE() << "accepted:\n" << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ConfigError) << e.what();
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
  };
  rejects("[audit]\nnormative = balanced\nalternative = skewed\nbogus = 1\n", "unknown key 'bogus'");
  rejects("[audit]\nnormative = balanced\nalternative = nowhere\n", "nowhere");
  rejects("[audit]\nnormative = balanced\nalternative = skewed\nn_q = ten\n", "integer");
  rejects("[audit]\nnormative = balanced\nalternative = skewed\n[learner]\nalgorithm = logit\nmax_depth = 3\n",
          "unknown key 'max_depth'");
  rejects("[audit]\nnormative = balanced\nalternative = skewed\nn_control_runs = 5\n", "n_control_runs");
  rejects("[audit]\nnormative = balanced\n", "required");
  rejects("[mystery]\nkey = 1\n", "unknown section");
  rejects("[audit]\nnormative = loop\nalternative = skewed\n[dist.loop]\nkind = mixture\nweight = 0.5\nfirst = loop\nsecond = g0\n",
          "refers to itself");
}

TEST(Config, Sweeps) {
  const auto alpha = parse(std::string(R"(
[audit]
statistic = overall_accuracy
[sweep]
axis = alpha
grid = 0, 0.5, 1
first = g0
second = g1
)") + kGaussians);
  ASSERT_TRUE(alpha.sweep);
  EXPECT_EQ(alpha.sweep->size(), 3u);
  EXPECT_EQ(alpha.sweep->base.statistic, Statistic::OverallAccuracy);

  const auto learners = parse(std::string(R"(
[audit]
normative = balanced
alternative = skewed
[sweep]
axis = learner
learners = dt, gbm, const
[learner.gbm]
n_rounds = 7
[learner.const]
value = 0
)") + kGaussians);
  ASSERT_TRUE(learners.sweep);
  ASSERT_EQ(learners.sweep->learners.size(), 3u);
  EXPECT_EQ(std::get<BoostingParams>(learners.sweep->learners[1].params).n_rounds, 7);
  EXPECT_EQ(std::get<ConstantParams>(learners.sweep->learners[2].params).value, 0.0);
}

TEST(Config, CsvPoolsAndReserves) {
  const auto dir = std::filesystem::temp_directory_path() / "shift_audit_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "pool.csv");
    csv << "a,b,label,grp\n";
    for (int i = 0; i < 40; ++i) csv << i << ',' << i % 7 << ',' << i % 2 << ',' << (i / 20) << '\n';
  }
  std::ofstream(dir / "exp.ini") << R"(
[audit]
normative = rest
alternative = slice
[dist.pool]
kind = csv
path = pool.csv
label_col = label
group_col = grp
[dist.slice]
kind = reserve
source = pool
n_reserved = 15
part = reserved
[dist.rest]
kind = reserve
source = pool
n_reserved = 15
part = remainder
)";
  const auto cfg = load_experiment_config(dir / "exp.ini");
  EXPECT_EQ(cfg.audit.normative->dim(), 2);
  Rng rng = make_rng(1);
  EXPECT_EQ(cfg.audit.alternative->sample(15, rng).size(), 15);
  expect_error(ErrorCode::PoolExhausted, [&] { cfg.audit.alternative->sample(16, rng); });
  EXPECT_EQ(cfg.audit.normative->sample(25, rng).size(), 25);

  std::ofstream(dir / "missing.ini") << "[audit]\nnormative = p\nalternative = p\n[dist.p]\nkind = csv\npath = nope.csv\nlabel_col = y\n";
  expect_error(ErrorCode::ConfigError, [&] { load_experiment_config(dir / "missing.ini"); });
  std::filesystem::remove_all(dir);
}

TEST(Config, MissingFile) {
  try {
    load_experiment_config("/nonexistent/exp.ini");
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    EXPECT_NE(std::string(e.what()).find("/nonexistent/exp.ini"), std::string::npos);
  }
}

TEST(Config, ReferenceListsEveryKey) {
  const std::string ref = config_reference();
  for (const char* key : {"[audit]", "gap_orientation", "n_shadows", "[learner]", "n_estimators", "kind=csv",
                          "label_col", "[sweep]", "learners", "[output]"}) {
    EXPECT_NE(ref.find(key), std::string::npos) << key;
  }
}

}  // namespace
}  // namespace shiftaudit
