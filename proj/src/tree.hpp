#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "shiftaudit/dataset.hpp"
#include "shiftaudit/random.hpp"

namespace shiftaudit::detail {

struct TreeNode {
  int feature = -1;  ///< -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

/// Binary tree with axis-aligned splits; a row goes left when x[feature] <= threshold.
class RegressionTree {
 public:
  int leaf_of(const double* row) const;
  double predict(const double* row) const { return nodes_[static_cast<std::size_t>(leaf_of(row))].value; }

  std::vector<TreeNode>& nodes() { return nodes_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }

 private:
  std::vector<TreeNode> nodes_;
};

/// Row indices of every column sorted by value (ties by row index). Computed
/// once and shared by every tree grown on the same feature matrix.
class SortedColumns {
 public:
  explicit SortedColumns(const FeatureMatrix& x);
  const std::vector<std::int32_t>& column(Index j) const { return columns_[static_cast<std::size_t>(j)]; }

 private:
  std::vector<std::vector<std::int32_t>> columns_;
};

struct TreeGrowth {
  int max_depth = 5;          ///< <= 0 means unlimited
  double min_samples_split = 2.0;
  double min_samples_leaf = 1.0;
  int max_features = 0;       ///< <= 0 means all features
};

/// Least-squares CART on `target` with per-row weights (0 excludes a row).
/// For 0/1 targets the split score coincides with Gini impurity, so the same
/// routine grows classification trees; leaf values are weighted means.
/// Thresholds are the largest left-side value, which makes every split depend
/// on the ordering of feature values only. Ties in split score go to the lowest
/// feature index, then the lowest threshold.
RegressionTree grow_tree(const FeatureMatrix& x, const SortedColumns& sorted,
                         const Eigen::VectorXd& target, std::span<const double> weight,
                         const TreeGrowth& growth, Rng* rng);

}  // namespace shiftaudit::detail
