#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "shiftaudit/dataset.hpp"

namespace shiftaudit {

enum class Algorithm { DecisionTree, Logit, GaussianNB, RandomForest, GradientBoosting, Mlp, Constant, Svm };

std::string_view to_string(Algorithm algorithm);
/// Accepts dt, logit, gnb (nb), rf, gbm, mlp (nn), const and svm. svm parses
/// but training it raises UnsupportedAlgorithm.
Algorithm parse_algorithm(std::string_view name);

// Per-algorithm hyperparameters.

struct TreeParams {
  int max_depth = 5;
  int min_samples_split = 2;
  int min_samples_leaf = 1;
};

struct LogitParams {
  double l2 = 1e-4;
  double tolerance = 1e-6;
  int max_iterations = 200;
};

struct GaussianNBParams {
  double var_smoothing = 1e-9;
};

struct ForestParams {
  int n_estimators = 50;
  int max_depth = 0;     ///< 0: grow until pure
  int max_features = 0;  ///< 0: floor(sqrt(d)) for classification, d for regression
  int min_samples_leaf = 1;
};

struct BoostingParams {
  int n_rounds = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
};

struct MlpParams {
  int hidden = 32;
  int epochs = 100;
  int batch_size = 32;
  double step_size = 1e-3;
  double l2 = 1e-4;
  double tolerance = 1e-4;
  int n_iter_no_change = 10;
};

/// Ignores the data: every fit returns the same value, so any two const
/// models are interchangeable.
struct ConstantParams {
  double value = 1.0;  ///< class label (0 or 1) or regression value
};

struct SvmParams {};

using Hyperparameters = std::variant<TreeParams, LogitParams, GaussianNBParams, ForestParams,
                                     BoostingParams, MlpParams, ConstantParams, SvmParams>;

struct LearnerSpec {
  Hyperparameters params = TreeParams{};
  std::uint64_t seed = 0;

  Algorithm algorithm() const;
  void validate() const;
  static LearnerSpec defaults(Algorithm algorithm, std::uint64_t seed = 0);
};

struct TrainingDiagnostics {
  double train_performance = 0.0;  ///< accuracy or MSE on the training set
  bool converged = true;
  int iterations = 0;
};

/// The learned function itself; implementations live in the library.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual Eigen::VectorXd predict(const FeatureMatrix& x) const = 0;
};

/// Black-box view of a fitted model: queries and its own diagnostics only.
class TrainedModel {
 public:
  TrainedModel(std::shared_ptr<const Predictor> predictor, Algorithm algorithm, TaskKind task,
               Index dim, TrainingDiagnostics diagnostics);

  /// Hard class label for classification, real value for regression.
  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
  Eigen::VectorXd predict(const FeatureMatrix& x) const;
  Eigen::VectorXd predict(const Dataset& data) const { return predict(data.features()); }

  Algorithm algorithm() const { return algorithm_; }
  TaskKind task() const { return task_; }
  Index dim() const { return dim_; }
  const TrainingDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  std::shared_ptr<const Predictor> predictor_;
  Algorithm algorithm_;
  TaskKind task_;
  Index dim_;
  TrainingDiagnostics diagnostics_;
};

TrainedModel train(const LearnerSpec& spec, const Dataset& data);

/// Per-example outcome: 1/0 correctness for classification, squared error for regression.
Eigen::VectorXd pointwise_performance(const TrainedModel& model, const Dataset& data);

/// Mean accuracy for classification, mean squared error for regression.
double performance(const TrainedModel& model, const Dataset& data);

/// Performance where larger is better (accuracy, or negated MSE).
double performance_score(TaskKind task, double performance);

}  // namespace shiftaudit
