#include "tree.hpp"

#include <algorithm>
#include <numeric>

namespace shiftaudit::detail {

int RegressionTree::leaf_of(const double* row) const {
  int at = 0;
  while (nodes_[static_cast<std::size_t>(at)].feature >= 0) {
    const auto& node = nodes_[static_cast<std::size_t>(at)];
    at = row[node.feature] <= node.threshold ? node.left : node.right;
  }
  return at;
}

SortedColumns::SortedColumns(const FeatureMatrix& x) : columns_(static_cast<std::size_t>(x.cols())) {
  for (Index j = 0; j < x.cols(); ++j) {
    auto& col = columns_[static_cast<std::size_t>(j)];
    col.resize(static_cast<std::size_t>(x.rows()));
    std::iota(col.begin(), col.end(), 0);
    std::stable_sort(col.begin(), col.end(),
                     [&](std::int32_t a, std::int32_t b) { return x(a, j) < x(b, j); });
  }
}

namespace {

struct Builder {
  const FeatureMatrix& x;
  const Eigen::VectorXd& y;
  std::span<const double> w;
  const TreeGrowth& growth;
  Rng* rng;

  // orders[f] holds the active rows; every node owns the same [begin, end)
  // range in each of them, sorted by that node's feature.
  std::vector<std::vector<std::int32_t>> orders;
  std::vector<char> goes_left;
  std::vector<std::int32_t> scratch;
  RegressionTree tree;

  int build(std::size_t begin, std::size_t end, int depth) {
    const auto& rows = orders[0];
    double total_w = 0.0;
    double total_s = 0.0;
    double y_min = y[rows[begin]];
    double y_max = y_min;
    for (std::size_t i = begin; i < end; ++i) {
      const auto r = rows[i];
      total_w += w[static_cast<std::size_t>(r)];
      total_s += w[static_cast<std::size_t>(r)] * y[r];
      y_min = std::min(y_min, y[r]);
      y_max = std::max(y_max, y[r]);
    }

    const int id = static_cast<int>(tree.nodes().size());
    tree.nodes().push_back(TreeNode{-1, 0.0, -1, -1, total_s / total_w});

    const bool depth_exhausted = growth.max_depth > 0 && depth >= growth.max_depth;
    if (depth_exhausted || total_w < growth.min_samples_split || y_min == y_max) return id;

    const Index d = x.cols();
    std::vector<Index> features(static_cast<std::size_t>(d));
    std::iota(features.begin(), features.end(), Index{0});
    if (growth.max_features > 0 && growth.max_features < d && rng != nullptr) {
      std::shuffle(features.begin(), features.end(), *rng);
      features.resize(static_cast<std::size_t>(growth.max_features));
      std::sort(features.begin(), features.end());
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_score = -1.0;
    std::size_t best_cut = 0;
    for (Index f : features) {
      const auto& ord = orders[static_cast<std::size_t>(f)];
      double left_w = 0.0;
      double left_s = 0.0;
      for (std::size_t i = begin; i + 1 < end; ++i) {
        const auto r = ord[i];
        left_w += w[static_cast<std::size_t>(r)];
        left_s += w[static_cast<std::size_t>(r)] * y[r];
        const double here = x(r, f);
        const double next = x(ord[i + 1], f);
        if (!(here < next)) continue;
        const double right_w = total_w - left_w;
        if (left_w < growth.min_samples_leaf || right_w < growth.min_samples_leaf) continue;
        const double right_s = total_s - left_s;
        const double score = left_s * left_s / left_w + right_s * right_s / right_w;
        if (score > best_score) {
          best_score = score;
          best_feature = static_cast<int>(f);
          best_threshold = here;
          best_cut = i + 1;
        }
      }
    }
    if (best_feature < 0) return id;

    const auto& chosen = orders[static_cast<std::size_t>(best_feature)];
    for (std::size_t i = begin; i < end; ++i) goes_left[static_cast<std::size_t>(chosen[i])] = i < best_cut;
    for (auto& ord : orders) {
      // Stable partition keeps each side sorted.
      std::size_t out_left = begin;
      std::size_t out_right = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const auto r = ord[i];
        if (goes_left[static_cast<std::size_t>(r)]) {
          ord[out_left++] = r;
        } else {
          scratch[out_right++] = r;
        }
      }
      std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(out_right),
                ord.begin() + static_cast<std::ptrdiff_t>(out_left));
    }

    const std::size_t mid = begin + (best_cut - begin);
    const int left = build(begin, mid, depth + 1);
    const int right = build(mid, end, depth + 1);
    auto& node = tree.nodes()[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left;
    node.right = right;
    return id;
  }
};

}  // namespace

RegressionTree grow_tree(const FeatureMatrix& x, const SortedColumns& sorted,
                         const Eigen::VectorXd& target, std::span<const double> weight,
                         const TreeGrowth& growth, Rng* rng) {
  Builder b{x, target, weight, growth, rng, {}, {}, {}, {}};
  b.orders.resize(static_cast<std::size_t>(x.cols()));
  for (Index f = 0; f < x.cols(); ++f) {
    const auto& col = sorted.column(f);
    auto& ord = b.orders[static_cast<std::size_t>(f)];
    ord.reserve(col.size());
    for (auto r : col) {
      if (weight[static_cast<std::size_t>(r)] > 0.0) ord.push_back(r);
    }
  }
  b.goes_left.assign(static_cast<std::size_t>(x.rows()), 0);
  b.scratch.resize(static_cast<std::size_t>(x.rows()));
  if (!b.orders.empty() && !b.orders[0].empty()) b.build(0, b.orders[0].size(), 0);
  return std::move(b.tree);
}

}  // namespace shiftaudit::detail
