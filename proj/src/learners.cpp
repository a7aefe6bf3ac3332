#include "shiftaudit/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>

#include "logistic.hpp"
#include "shiftaudit/error.hpp"
#include "shiftaudit/random.hpp"
#include "tree.hpp"

namespace shiftaudit {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::DecisionTree: return "dt";
    case Algorithm::Logit: return "logit";
    case Algorithm::GaussianNB: return "gnb";
    case Algorithm::RandomForest: return "rf";
    case Algorithm::GradientBoosting: return "gbm";
    case Algorithm::Mlp: return "mlp";
    case Algorithm::Constant: return "const";
    case Algorithm::Svm: return "svm";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "dt") return Algorithm::DecisionTree;
  if (name == "logit") return Algorithm::Logit;
  if (name == "gnb" || name == "nb") return Algorithm::GaussianNB;
  if (name == "rf") return Algorithm::RandomForest;
  if (name == "gbm") return Algorithm::GradientBoosting;
  if (name == "mlp" || name == "nn") return Algorithm::Mlp;
  if (name == "const") return Algorithm::Constant;
  if (name == "svm") return Algorithm::Svm;
  throw Error(ErrorCode::UnsupportedAlgorithm, "unknown algorithm '" + std::string(name) + "'");
}

Algorithm LearnerSpec::algorithm() const {
  return std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TreeParams>) return Algorithm::DecisionTree;
        else if constexpr (std::is_same_v<T, LogitParams>) return Algorithm::Logit;
        else if constexpr (std::is_same_v<T, GaussianNBParams>) return Algorithm::GaussianNB;
        else if constexpr (std::is_same_v<T, ForestParams>) return Algorithm::RandomForest;
        else if constexpr (std::is_same_v<T, BoostingParams>) return Algorithm::GradientBoosting;
        else if constexpr (std::is_same_v<T, MlpParams>) return Algorithm::Mlp;
        else if constexpr (std::is_same_v<T, ConstantParams>) return Algorithm::Constant;
        else return Algorithm::Svm;
      },
      params);
}

LearnerSpec LearnerSpec::defaults(Algorithm algorithm, std::uint64_t seed) {
  LearnerSpec spec;
  spec.seed = seed;
  switch (algorithm) {
    case Algorithm::DecisionTree: spec.params = TreeParams{}; break;
    case Algorithm::Logit: spec.params = LogitParams{}; break;
    case Algorithm::GaussianNB: spec.params = GaussianNBParams{}; break;
    case Algorithm::RandomForest: spec.params = ForestParams{}; break;
    case Algorithm::GradientBoosting: spec.params = BoostingParams{}; break;
    case Algorithm::Mlp: spec.params = MlpParams{}; break;
    case Algorithm::Constant: spec.params = ConstantParams{}; break;
    case Algorithm::Svm: spec.params = SvmParams{}; break;
  }
  return spec;
}

namespace {

[[noreturn]] void bad_param(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, "learner hyperparameter: " + what);
}

}  // namespace

void LearnerSpec::validate() const {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TreeParams>) {
          if (p.max_depth < 1) bad_param("max_depth must be >= 1");
          if (p.min_samples_leaf < 1 || p.min_samples_split < 2) bad_param("min samples too small");
        } else if constexpr (std::is_same_v<T, LogitParams>) {
          if (!(p.l2 >= 0.0) || !(p.tolerance > 0.0) || p.max_iterations < 1) bad_param("logit");
        } else if constexpr (std::is_same_v<T, GaussianNBParams>) {
          if (!(p.var_smoothing > 0.0)) bad_param("var_smoothing must be > 0");
        } else if constexpr (std::is_same_v<T, ForestParams>) {
          if (p.n_estimators < 1) bad_param("n_estimators must be >= 1");
          if (p.max_depth < 0 || p.max_features < 0 || p.min_samples_leaf < 1) bad_param("rf");
        } else if constexpr (std::is_same_v<T, BoostingParams>) {
          if (p.n_rounds < 1 || p.max_depth < 1) bad_param("gbm rounds and depth must be >= 1");
          if (!(p.learning_rate > 0.0)) bad_param("learning_rate must be > 0");
        } else if constexpr (std::is_same_v<T, MlpParams>) {
          if (p.hidden < 1) bad_param("hidden width must be >= 1");
          if (p.epochs < 1 || p.batch_size < 1 || p.n_iter_no_change < 1) bad_param("mlp schedule");
          if (!(p.step_size > 0.0) || !(p.l2 >= 0.0)) bad_param("mlp step size");
        } else if constexpr (std::is_same_v<T, ConstantParams>) {
          if (!std::isfinite(p.value)) bad_param("const value must be finite");
        }
      },
      params);
}

// ---------------------------------------------------------------------------

TrainedModel::TrainedModel(std::shared_ptr<const Predictor> predictor, Algorithm algorithm,
                           TaskKind task, Index dim, TrainingDiagnostics diagnostics)
    : predictor_(std::move(predictor)),
      algorithm_(algorithm),
      task_(task),
      dim_(dim),
      diagnostics_(diagnostics) {}

double TrainedModel::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  if (x.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "query has wrong feature count");
  FeatureMatrix row = x;
  return predictor_->predict(row)[0];
}

Eigen::VectorXd TrainedModel::predict(const FeatureMatrix& x) const {
  if (x.cols() != dim_) throw Error(ErrorCode::DimensionMismatch, "query has wrong feature count");
  return predictor_->predict(x);
}

namespace {

// ---------------------------------------------------------------------------
// Predictors

class ConstantPredictor final : public Predictor {
 public:
  explicit ConstantPredictor(double value) : value_(value) {}
  Eigen::VectorXd predict(const FeatureMatrix& x) const override {
    return Eigen::VectorXd::Constant(x.rows(), value_);
  }

 private:
  double value_;
};

class TreePredictor final : public Predictor {
 public:
  TreePredictor(detail::RegressionTree tree, bool classify) : tree_(std::move(tree)), classify_(classify) {}
  Eigen::VectorXd predict(const FeatureMatrix& x) const override {
    Eigen::VectorXd out(x.rows());
    for (Index i = 0; i < x.rows(); ++i) {
      const double v = tree_.predict(x.row(i).data());
      out[i] = classify_ ? (v > 0.5 ? 1.0 : 0.0) : v;
    }
    return out;
  }

 private:
  detail::RegressionTree tree_;
  bool classify_;
};

class ForestPredictor final : public Predictor {
 public:
  ForestPredictor(std::vector<detail::RegressionTree> trees, bool classify)
      : trees_(std::move(trees)), classify_(classify) {}
  Eigen::VectorXd predict(const FeatureMatrix& x) const override {
    Eigen::VectorXd out(x.rows());
    for (Index i = 0; i < x.rows(); ++i) {
      double sum = 0.0;
      for (const auto& t : trees_) sum += t.predict(x.row(i).data());
      const double mean = sum / static_cast<double>(trees_.size());
      out[i] = classify_ ? (mean > 0.5 ? 1.0 : 0.0) : mean;
    }
    return out;
  }

 private:
  std::vector<detail::RegressionTree> trees_;
  bool classify_;
};

class BoostingPredictor final : public Predictor {
 public:
  BoostingPredictor(double init, double rate, std::vector<detail::RegressionTree> trees, bool classify)
      : init_(init), rate_(rate), trees_(std::move(trees)), classify_(classify) {}
  Eigen::VectorXd predict(const FeatureMatrix& x) const override {
    Eigen::VectorXd out(x.rows());
    for (Index i = 0; i < x.rows(); ++i) {
      double f = init_;
      for (const auto& t : trees_) f += rate_ * t.predict(x.row(i).data());
      out[i] = classify_ ? (f > 0.0 ? 1.0 : 0.0) : f;
    }
    return out;
  }

 private:
  double init_;
  double rate_;
  std::vector<detail::RegressionTree> trees_;
  bool classify_;
};

class LinearPredictor final : public Predictor {
 public:
  LinearPredictor(Eigen::VectorXd weights, double bias) : weights_(std::move(weights)), bias_(bias) {}
  Eigen::VectorXd predict(const FeatureMatrix& x) const override {
    const Eigen::VectorXd score = (x * weights_).array() + bias_;
    return (score.array() > 0.0).cast<double>();
  }

 private:
  Eigen::VectorXd weights_;
  double bias_;
};

class GaussianNBPredictor final : public Predictor {
 public:
  GaussianNBPredictor(Eigen::Matrix<double, 2, Eigen::Dynamic> means,
                      Eigen::Matrix<double, 2, Eigen::Dynamic> variances, Eigen::Vector2d log_prior)
      : means_(std::move(means)), variances_(std::move(variances)), log_prior_(log_prior) {}

  Eigen::VectorXd predict(const FeatureMatrix& x) const override {
    Eigen::VectorXd out(x.rows());
    for (Index i = 0; i < x.rows(); ++i) {
      std::array<double, 2> score{};
      for (int c = 0; c < 2; ++c) {
        const Eigen::ArrayXd diff = x.row(i).transpose().array() - means_.row(c).transpose().array();
        const Eigen::ArrayXd var = variances_.row(c).transpose().array();
        score[static_cast<std::size_t>(c)] =
            log_prior_[c] - 0.5 * ((2.0 * std::numbers::pi * var).log() + diff.square() / var).sum();
      }
      out[i] = score[1] > score[0] ? 1.0 : 0.0;
    }
    return out;
  }

 private:
  Eigen::Matrix<double, 2, Eigen::Dynamic> means_;
  Eigen::Matrix<double, 2, Eigen::Dynamic> variances_;
  Eigen::Vector2d log_prior_;
};

class MlpPredictor final : public Predictor {
 public:
  MlpPredictor(Eigen::MatrixXd w1, Eigen::RowVectorXd b1, Eigen::VectorXd w2, double b2, bool classify)
      : w1_(std::move(w1)), b1_(std::move(b1)), w2_(std::move(w2)), b2_(b2), classify_(classify) {}

  Eigen::VectorXd raw(const FeatureMatrix& x) const {
    const Eigen::MatrixXd hidden = ((x * w1_).rowwise() + b1_).cwiseMax(0.0);
    return (hidden * w2_).array() + b2_;
  }

  Eigen::VectorXd predict(const FeatureMatrix& x) const override {
    const Eigen::VectorXd out = raw(x);
    return classify_ ? Eigen::VectorXd((out.array() > 0.0).cast<double>()) : out;
  }

 private:
  Eigen::MatrixXd w1_;
  Eigen::RowVectorXd b1_;
  Eigen::VectorXd w2_;
  double b2_;
  bool classify_;
};

// ---------------------------------------------------------------------------
// Fitting

struct Fitted {
  std::shared_ptr<const Predictor> predictor;
  bool converged = true;
  int iterations = 0;
};

Fitted fit_tree(const TreeParams& p, const Dataset& data) {
  const detail::SortedColumns sorted(data.features());
  const std::vector<double> weight(static_cast<std::size_t>(data.size()), 1.0);
  detail::TreeGrowth growth;
  growth.max_depth = p.max_depth;
  growth.min_samples_split = p.min_samples_split;
  growth.min_samples_leaf = p.min_samples_leaf;
  auto tree = detail::grow_tree(data.features(), sorted, data.labels(), weight, growth, nullptr);
  return {std::make_shared<TreePredictor>(std::move(tree), data.task() == TaskKind::Classification)};
}

Fitted fit_forest(const ForestParams& p, const Dataset& data, Rng& rng) {
  const bool classify = data.task() == TaskKind::Classification;
  const detail::SortedColumns sorted(data.features());
  detail::TreeGrowth growth;
  growth.max_depth = p.max_depth;
  growth.min_samples_leaf = p.min_samples_leaf;
  growth.max_features = p.max_features > 0
                            ? p.max_features
                            : (classify ? std::max(1, static_cast<int>(std::sqrt(static_cast<double>(data.dim()))))
                                        : static_cast<int>(data.dim()));
  const auto n = static_cast<std::size_t>(data.size());
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<detail::RegressionTree> trees;
  std::vector<double> counts(n);
  for (int t = 0; t < p.n_estimators; ++t) {
    std::fill(counts.begin(), counts.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) counts[pick(rng)] += 1.0;
    trees.push_back(detail::grow_tree(data.features(), sorted, data.labels(), counts, growth, &rng));
  }
  return {std::make_shared<ForestPredictor>(std::move(trees), classify)};
}

Fitted fit_boosting(const BoostingParams& p, const Dataset& data) {
  const bool classify = data.task() == TaskKind::Classification;
  const detail::SortedColumns sorted(data.features());
  const Eigen::VectorXd& y = data.labels();
  const Index n = data.size();
  const std::vector<double> weight(static_cast<std::size_t>(n), 1.0);
  detail::TreeGrowth growth;
  growth.max_depth = p.max_depth;

  double init = 0.0;
  if (classify) {
    const double prior = std::clamp(y.mean(), 1e-12, 1.0 - 1e-12);
    init = std::log(prior / (1.0 - prior));
  } else {
    init = y.mean();
  }
  Eigen::VectorXd f = Eigen::VectorXd::Constant(n, init);
  Eigen::VectorXd residual(n);
  Eigen::VectorXd hess(n);
  std::vector<detail::RegressionTree> trees;
  trees.reserve(static_cast<std::size_t>(p.n_rounds));
  std::vector<int> leaf(static_cast<std::size_t>(n));

  for (int round = 0; round < p.n_rounds; ++round) {
    for (Index i = 0; i < n; ++i) {
      if (classify) {
        const double prob = detail::sigmoid(f[i]);
        residual[i] = y[i] - prob;
        hess[i] = prob * (1.0 - prob);
      } else {
        residual[i] = y[i] - f[i];
        hess[i] = 1.0;
      }
    }
    auto tree = detail::grow_tree(data.features(), sorted, residual, weight, growth, nullptr);
    auto& nodes = tree.nodes();
    if (classify) {
      // One Newton step per leaf for the log-loss.
      std::vector<double> num(nodes.size(), 0.0);
      std::vector<double> den(nodes.size(), 0.0);
      for (Index i = 0; i < n; ++i) {
        const auto l = static_cast<std::size_t>(tree.leaf_of(data.features().row(i).data()));
        leaf[static_cast<std::size_t>(i)] = static_cast<int>(l);
        num[l] += residual[i];
        den[l] += hess[i];
      }
      for (std::size_t l = 0; l < nodes.size(); ++l) {
        if (nodes[l].feature < 0) nodes[l].value = std::abs(den[l]) < 1e-150 ? 0.0 : num[l] / den[l];
      }
    } else {
      for (Index i = 0; i < n; ++i) {
        leaf[static_cast<std::size_t>(i)] = tree.leaf_of(data.features().row(i).data());
      }
    }
    for (Index i = 0; i < n; ++i) {
      f[i] += p.learning_rate * nodes[static_cast<std::size_t>(leaf[static_cast<std::size_t>(i)])].value;
    }
    trees.push_back(std::move(tree));
  }
  return {std::make_shared<BoostingPredictor>(init, p.learning_rate, std::move(trees), classify)};
}

Fitted fit_logit(const LogitParams& p, const Dataset& data) {
  const auto fit = detail::fit_logistic(data.features(), data.labels(), p.l2, p.tolerance, p.max_iterations);
  return {std::make_shared<LinearPredictor>(fit.weights, fit.bias), fit.converged, fit.iterations};
}

Fitted fit_gnb(const GaussianNBParams& p, const Dataset& data) {
  const FeatureMatrix& x = data.features();
  const Index d = data.dim();
  const Eigen::RowVectorXd overall_mean = x.colwise().mean();
  const Eigen::RowVectorXd overall_var =
      (x.rowwise() - overall_mean).array().square().colwise().mean();
  double floor = p.var_smoothing * overall_var.maxCoeff();
  if (!(floor > 0.0)) floor = p.var_smoothing;

  Eigen::Matrix<double, 2, Eigen::Dynamic> means(2, d);
  Eigen::Matrix<double, 2, Eigen::Dynamic> vars(2, d);
  Eigen::Vector2d log_prior;
  for (int c = 0; c < 2; ++c) {
    std::vector<Index> rows;
    for (Index i = 0; i < data.size(); ++i) {
      if (data.labels()[i] == c) rows.push_back(i);
    }
    FeatureMatrix xc(static_cast<Index>(rows.size()), d);
    for (std::size_t k = 0; k < rows.size(); ++k) xc.row(static_cast<Index>(k)) = x.row(rows[k]);
    means.row(c) = xc.colwise().mean();
    vars.row(c) = (xc.rowwise() - means.row(c)).array().square().colwise().mean();
    vars.row(c).array() += floor;
    log_prior[c] = std::log(static_cast<double>(rows.size()) / static_cast<double>(data.size()));
  }
  return {std::make_shared<GaussianNBPredictor>(std::move(means), std::move(vars), log_prior)};
}

struct Adam {
  double step;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int t = 0;

  template <typename Param, typename Grad, typename Moment>
  void update(Param& param, const Grad& grad, Moment& m, Moment& v, double rate) const {
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    param.array() -= rate * m.array() / (v.array().sqrt() + eps);
  }
};

Fitted fit_mlp(const MlpParams& p, const Dataset& data, Rng& rng) {
  const bool classify = data.task() == TaskKind::Classification;
  const Index n = data.size();
  const Index d = data.dim();
  const Index h = p.hidden;

  const double bound1 = std::sqrt(6.0 / static_cast<double>(d + h));
  const double bound2 = std::sqrt(6.0 / static_cast<double>(h + 1));
  std::uniform_real_distribution<double> u1(-bound1, bound1);
  std::uniform_real_distribution<double> u2(-bound2, bound2);
  Eigen::MatrixXd w1(d, h);
  Eigen::RowVectorXd b1(h);
  Eigen::VectorXd w2(h);
  Eigen::VectorXd b2(1);
  for (Index i = 0; i < w1.size(); ++i) w1.data()[i] = u1(rng);
  for (Index i = 0; i < h; ++i) b1[i] = u1(rng);
  for (Index i = 0; i < h; ++i) w2[i] = u2(rng);
  b2[0] = u2(rng);

  Eigen::MatrixXd m_w1 = Eigen::MatrixXd::Zero(d, h), v_w1 = m_w1;
  Eigen::RowVectorXd m_b1 = Eigen::RowVectorXd::Zero(h), v_b1 = m_b1;
  Eigen::VectorXd m_w2 = Eigen::VectorXd::Zero(h), v_w2 = m_w2;
  Eigen::VectorXd m_b2 = Eigen::VectorXd::Zero(1), v_b2 = m_b2;
  Adam adam{p.step_size};

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  double best_loss = std::numeric_limits<double>::infinity();
  int no_improvement = 0;
  bool converged = false;
  int epoch = 0;
  for (; epoch < p.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (Index start = 0; start < n; start += p.batch_size) {
      const Index b = std::min<Index>(p.batch_size, n - start);
      FeatureMatrix xb(b, d);
      Eigen::VectorXd yb(b);
      for (Index k = 0; k < b; ++k) {
        const Index r = order[static_cast<std::size_t>(start + k)];
        xb.row(k) = data.features().row(r);
        yb[k] = data.labels()[r];
      }
      const Eigen::MatrixXd pre = (xb * w1).rowwise() + b1;
      const Eigen::MatrixXd act = pre.cwiseMax(0.0);
      const Eigen::VectorXd out = (act * w2).array() + b2[0];

      Eigen::VectorXd dout(b);
      double loss = 0.0;
      for (Index k = 0; k < b; ++k) {
        if (classify) {
          loss += detail::softplus(out[k]) - yb[k] * out[k];
          dout[k] = detail::sigmoid(out[k]) - yb[k];
        } else {
          const double r = out[k] - yb[k];
          loss += 0.5 * r * r;
          dout[k] = r;
        }
      }
      const double bd = static_cast<double>(b);
      loss = loss / bd + 0.5 * p.l2 * (w1.squaredNorm() + w2.squaredNorm()) / bd;
      epoch_loss += loss * bd;
      dout /= bd;

      const Eigen::VectorXd g_w2 = act.transpose() * dout + p.l2 * w2 / bd;
      const Eigen::VectorXd g_b2 = Eigen::VectorXd::Constant(1, dout.sum());
      const Eigen::MatrixXd d_pre = ((dout * w2.transpose()).array() * (pre.array() > 0.0).cast<double>()).matrix();
      const Eigen::MatrixXd g_w1 = xb.transpose() * d_pre + p.l2 * w1 / bd;
      const Eigen::RowVectorXd g_b1 = d_pre.colwise().sum();

      ++adam.t;
      const double rate = adam.step * std::sqrt(1.0 - std::pow(adam.beta2, adam.t)) /
                          (1.0 - std::pow(adam.beta1, adam.t));
      adam.update(w1, g_w1, m_w1, v_w1, rate);
      adam.update(b1, g_b1, m_b1, v_b1, rate);
      adam.update(w2, g_w2, m_w2, v_w2, rate);
      adam.update(b2, g_b2, m_b2, v_b2, rate);
    }
    epoch_loss /= static_cast<double>(n);
    if (!std::isfinite(epoch_loss)) break;
    if (epoch_loss > best_loss - p.tolerance) {
      ++no_improvement;
    } else {
      no_improvement = 0;
    }
    best_loss = std::min(best_loss, epoch_loss);
    if (no_improvement > p.n_iter_no_change) {
      converged = true;
      ++epoch;
      break;
    }
  }
  return {std::make_shared<MlpPredictor>(std::move(w1), std::move(b1), std::move(w2), b2[0], classify),
          converged, epoch};
}

bool supports(Algorithm algorithm, TaskKind task) {
  if (task == TaskKind::Classification) return algorithm != Algorithm::Svm;
  switch (algorithm) {
    case Algorithm::Mlp:
    case Algorithm::GradientBoosting:
    case Algorithm::DecisionTree:
    case Algorithm::RandomForest:
    case Algorithm::Constant:
      return true;
    default:
      return false;
  }
}

}  // namespace

TrainedModel train(const LearnerSpec& spec, const Dataset& data) {
  const Algorithm algorithm = spec.algorithm();
  if (algorithm == Algorithm::Svm) {
    throw Error(ErrorCode::UnsupportedAlgorithm, "svm is not provided by this toolkit");
  }
  spec.validate();
  if (data.is_empty()) throw Error(ErrorCode::InvalidArgument, "cannot train on an empty dataset");
  if (!supports(algorithm, data.task())) {
    throw Error(ErrorCode::IncompatibleTask, std::string(to_string(algorithm)) + " does not support " +
                                                 std::string(to_string(data.task())));
  }

  Rng rng = make_rng(derive_seed(spec.seed, "learner"));
  Fitted fitted;
  const bool classify = data.task() == TaskKind::Classification;
  const Index positives = classify ? data.count_label(1.0) : 0;
  if (const auto* c = std::get_if<ConstantParams>(&spec.params)) {
    if (classify && c->value != 0.0 && c->value != 1.0) bad_param("const value must be 0 or 1 for classification");
    fitted.predictor = std::make_shared<ConstantPredictor>(c->value);
  } else if (classify && (positives == 0 || positives == data.size())) {
    fitted.predictor = std::make_shared<ConstantPredictor>(positives == 0 ? 0.0 : 1.0);
  } else {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, TreeParams>) fitted = fit_tree(p, data);
          else if constexpr (std::is_same_v<T, LogitParams>) fitted = fit_logit(p, data);
          else if constexpr (std::is_same_v<T, GaussianNBParams>) fitted = fit_gnb(p, data);
          else if constexpr (std::is_same_v<T, ForestParams>) fitted = fit_forest(p, data, rng);
          else if constexpr (std::is_same_v<T, BoostingParams>) fitted = fit_boosting(p, data);
          else if constexpr (std::is_same_v<T, MlpParams>) fitted = fit_mlp(p, data, rng);
        },
        spec.params);
  }

  TrainedModel model(fitted.predictor, algorithm, data.task(), data.dim(), {});
  TrainingDiagnostics diag;
  diag.train_performance = performance(model, data);
  diag.converged = fitted.converged;
  diag.iterations = fitted.iterations;
  return TrainedModel(fitted.predictor, algorithm, data.task(), data.dim(), diag);
}

Eigen::VectorXd pointwise_performance(const TrainedModel& model, const Dataset& data) {
  if (model.task() != data.task()) throw Error(ErrorCode::IncompatibleTask, "model and data tasks differ");
  const Eigen::VectorXd pred = model.predict(data);
  if (data.task() == TaskKind::Classification) {
    return (pred.array() == data.labels().array()).cast<double>();
  }
  return (pred - data.labels()).array().square();
}

double performance(const TrainedModel& model, const Dataset& data) {
  if (data.is_empty()) throw Error(ErrorCode::EmptySample, "performance of an empty dataset");
  return pointwise_performance(model, data).mean();
}

double performance_score(TaskKind task, double perf) {
  return task == TaskKind::Classification ? perf : -perf;
}

}  // namespace shiftaudit
