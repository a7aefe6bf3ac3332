#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "shiftaudit/dataset.hpp"
#include "shiftaudit/learners.hpp"

namespace shiftaudit {

enum class Origin { Target, Shadow };

/// Mean performance of one model over one bundle of n_q query points.
struct AttackBundle {
  double feature = 0.0;
  Origin origin = Origin::Shadow;
  std::optional<int> group;  ///< set when every query point shares one group
};

/// Logistic meta-classifier on the scalar bundle feature. Predicts "target"
/// iff weight * feature + bias > 0.
struct AttackModel {
  double weight = 0.0;
  double bias = 0.0;
  Index n_t = 0;
  TaskKind task = TaskKind::Classification;

  bool predicts_target(double feature) const { return weight * feature + bias > 0.0; }

  /// Same decision boundary, with the direction fixed so that better
  /// performance (higher accuracy, lower MSE) reads as "target".
  AttackModel performance_oriented() const;
};

struct ShadowSetup {
  Index n_shadows = 1;
  LearnerSpec learner;
};

/// Shuffles `queries` by `seed`, cuts floor(size / n_q) disjoint bundles and
/// evaluates each on the target and every shadow. With several shadows the
/// target bundles are repeated once per shadow so both origins stay balanced.
std::vector<AttackBundle> build_attack_dataset(const TrainedModel& target,
                                               std::span<const TrainedModel> shadows,
                                               const Dataset& queries, Index n_q,
                                               std::uint64_t seed);

/// As build_attack_dataset, but bundles are cut within each group so every
/// bundle is group-pure. Raises MissingGroup if a group has fewer than n_q rows.
std::vector<AttackBundle> build_group_bundles(const TrainedModel& target,
                                              std::span<const TrainedModel> shadows,
                                              const Dataset& queries, Index n_q,
                                              std::uint64_t seed);

struct AttackTraining {
  double l2 = 1e-4;
  double tolerance = 1e-8;
  int max_iterations = 500;
};

/// Fits the meta-classifier (target = positive class) on the standardized
/// feature and maps the result back to raw feature units.
AttackModel train_attack(std::span<const AttackBundle> bundles, Index n_t,
                         const AttackTraining& options = {},
                         TaskKind task = TaskKind::Classification);

/// Balanced accuracy: mean of the target and shadow per-class accuracies.
double attack_accuracy(const AttackModel& model, std::span<const AttackBundle> bundles);

/// attack_accuracy on group-0 bundles minus attack_accuracy on group-1 bundles.
double inter_group_attack_gap(const AttackModel& model, std::span<const AttackBundle> bundles);

}  // namespace shiftaudit
