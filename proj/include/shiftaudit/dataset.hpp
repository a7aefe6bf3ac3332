#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace shiftaudit {

using Index = Eigen::Index;
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using GroupVector = Eigen::Matrix<int, Eigen::Dynamic, 1>;

enum class TaskKind { Classification, Regression };

std::string_view to_string(TaskKind task);
TaskKind parse_task(std::string_view text);

struct Example {
  Eigen::VectorXd features;
  double label = 0.0;
  int group = 0;
};

/// Tabular examples stored column-wise: one feature row, one label and one
/// group tag (0 or 1) per example. Immutable once built.
class Dataset {
 public:
  Dataset(FeatureMatrix features, Eigen::VectorXd labels, GroupVector groups, TaskKind task);

  /// Zero rows with the given width.
  static Dataset empty(Index dim, TaskKind task);
  static Dataset from_examples(std::span<const Example> examples, Index dim, TaskKind task);
  static Dataset concat(const Dataset& a, const Dataset& b);

  Index size() const { return labels_.size(); }
  bool is_empty() const { return size() == 0; }
  Index dim() const { return features_.cols(); }
  TaskKind task() const { return task_; }

  const FeatureMatrix& features() const { return features_; }
  const Eigen::VectorXd& labels() const { return labels_; }
  const GroupVector& groups() const { return groups_; }

  auto row(Index i) const { return features_.row(i); }
  Example example(Index i) const;

  Dataset subset(std::span<const Index> rows) const;
  Dataset with_group(int group) const;
  Index count_group(int group) const;
  Index count_label(double label) const;

 private:
  FeatureMatrix features_;
  Eigen::VectorXd labels_;
  GroupVector groups_;
  TaskKind task_;
};

// ---------------------------------------------------------------------------
// Five-way partitioning

enum class Partition : std::size_t { TargetTrain = 0, ShadowTrain, AttackTrain, ModelTest, AttackTest };
inline constexpr std::size_t kPartitionCount = 5;

struct PartitionPlan {
  std::array<double, kPartitionCount> fractions{0.2, 0.2, 0.2, 0.2, 0.2};
  bool stratify = true;
  std::uint64_t seed = 0;

  void validate() const;
};

using Partitions = std::array<Dataset, kPartitionCount>;

inline const Dataset& part(const Partitions& parts, Partition p) {
  return parts[static_cast<std::size_t>(p)];
}

/// Shuffles and cuts `data` into five disjoint parts. Counts are apportioned by
/// largest remainder, per label class when stratifying (classification only),
/// so each part's class count is within one of its exact proportional share.
/// Zero fractions produce empty parts; a positive fraction that rounds to zero
/// rows raises EmptyPartition.
Partitions stratified_split(const Dataset& data, const PartitionPlan& plan);

/// Largest-remainder apportionment of `total` items over `fractions`. Ties in
/// the remainder go to the entry with the fewest `bonus` so far, then the lowest
/// index; `bonus` is updated so repeated calls spread the extra items.
std::vector<Index> apportion(Index total, std::span<const double> fractions,
                             std::span<Index> bonus);

// ---------------------------------------------------------------------------
// CSV

struct CsvSchema {
  std::string label_column;
  std::optional<std::string> group_column;
  TaskKind task = TaskKind::Classification;
};

/// Header row required. Every column that is neither the label nor the group
/// column is a numeric feature, kept in file order. Without a group column
/// every example is tagged group 0.
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);
Dataset read_csv(std::istream& in, const CsvSchema& schema);

/// Writes columns x0..x{d-1},y,z.
void write_csv(std::ostream& out, const Dataset& data);

}  // namespace shiftaudit
