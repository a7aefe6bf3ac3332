#include "shiftaudit/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "logistic.hpp"
#include "shiftaudit/error.hpp"
#include "shiftaudit/random.hpp"

namespace shiftaudit {

AttackModel AttackModel::performance_oriented() const {
  const bool higher_is_better = task == TaskKind::Classification;
  const bool flip = higher_is_better ? weight < 0.0 : weight > 0.0;
  AttackModel out = *this;
  if (flip) {
    out.weight = -weight;
    out.bias = -bias;
  }
  return out;
}

namespace {

std::vector<Index> shuffled_rows(std::span<const Index> rows, std::uint64_t seed) {
  std::vector<Index> out(rows.begin(), rows.end());
  Rng rng = make_rng(seed);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

void append_bundles(std::vector<AttackBundle>& out, const std::vector<Eigen::VectorXd>& outcomes,
                    std::span<const Index> rows, Index n_q, std::optional<int> group) {
  const Index n_bundles = static_cast<Index>(rows.size()) / n_q;
  const std::size_t n_shadows = outcomes.size() - 1;
  for (Index b = 0; b < n_bundles; ++b) {
    for (std::size_t m = 0; m < outcomes.size(); ++m) {
      double sum = 0.0;
      for (Index k = 0; k < n_q; ++k) sum += outcomes[m][rows[static_cast<std::size_t>(b * n_q + k)]];
      const AttackBundle bundle{sum / static_cast<double>(n_q), m == 0 ? Origin::Target : Origin::Shadow, group};
      const std::size_t copies = m == 0 ? n_shadows : 1;
      for (std::size_t c = 0; c < copies; ++c) out.push_back(bundle);
    }
  }
}

std::vector<Eigen::VectorXd> evaluate_all(const TrainedModel& target, std::span<const TrainedModel> shadows,
                                          const Dataset& queries) {
  if (shadows.empty()) throw Error(ErrorCode::InvalidArgument, "at least one shadow model is required");
  std::vector<Eigen::VectorXd> outcomes;
  outcomes.push_back(pointwise_performance(target, queries));
  for (const auto& s : shadows) outcomes.push_back(pointwise_performance(s, queries));
  return outcomes;
}

void require_queries(Index available, Index n_q, const char* what) {
  if (n_q < 1) throw Error(ErrorCode::InvalidArgument, "n_q must be >= 1");
  if (available < 2 * n_q) {
    throw Error(ErrorCode::NotEnoughQueries, std::string(what) + ": " + std::to_string(available) +
                                                 " query points cannot fill two bundles of " +
                                                 std::to_string(n_q));
  }
}

}  // namespace

std::vector<AttackBundle> build_attack_dataset(const TrainedModel& target,
                                               std::span<const TrainedModel> shadows,
                                               const Dataset& queries, Index n_q, std::uint64_t seed) {
  require_queries(queries.size(), n_q, "attack set");
  const auto outcomes = evaluate_all(target, shadows, queries);
  std::vector<Index> all(static_cast<std::size_t>(queries.size()));
  std::iota(all.begin(), all.end(), Index{0});
  const auto rows = shuffled_rows(all, seed);
  std::vector<AttackBundle> out;
  append_bundles(out, outcomes, rows, n_q, std::nullopt);
  return out;
}

std::vector<AttackBundle> build_group_bundles(const TrainedModel& target,
                                              std::span<const TrainedModel> shadows,
                                              const Dataset& queries, Index n_q, std::uint64_t seed) {
  if (n_q < 1) throw Error(ErrorCode::InvalidArgument, "n_q must be >= 1");
  std::array<std::vector<Index>, 2> by_group;
  for (Index i = 0; i < queries.size(); ++i) by_group[static_cast<std::size_t>(queries.groups()[i])].push_back(i);
  for (int g = 0; g < 2; ++g) {
    if (static_cast<Index>(by_group[static_cast<std::size_t>(g)].size()) < n_q) {
      throw Error(ErrorCode::MissingGroup, "group " + std::to_string(g) + " cannot fill a bundle of " +
                                               std::to_string(n_q) + " query points");
    }
  }
  const auto outcomes = evaluate_all(target, shadows, queries);
  std::vector<AttackBundle> out;
  for (int g = 0; g < 2; ++g) {
    const auto rows = shuffled_rows(by_group[static_cast<std::size_t>(g)], derive_seed(seed, "group", static_cast<std::uint64_t>(g)));
    append_bundles(out, outcomes, rows, n_q, g);
  }
  return out;
}

namespace {

void require_both_origins(std::span<const AttackBundle> bundles) {
  const bool has_target = std::any_of(bundles.begin(), bundles.end(), [](const auto& b) { return b.origin == Origin::Target; });
  const bool has_shadow = std::any_of(bundles.begin(), bundles.end(), [](const auto& b) { return b.origin == Origin::Shadow; });
  if (!has_target || !has_shadow) throw Error(ErrorCode::SingleClass, "attack bundles lack a target or a shadow example");
}

}  // namespace

AttackModel train_attack(std::span<const AttackBundle> bundles, Index n_t, const AttackTraining& options,
                         TaskKind task) {
  require_both_origins(bundles);
  const auto n = static_cast<Index>(bundles.size());
  Eigen::VectorXd x(n);
  Eigen::VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    x[i] = bundles[static_cast<std::size_t>(i)].feature;
    y[i] = bundles[static_cast<std::size_t>(i)].origin == Origin::Target ? 1.0 : 0.0;
  }
  const double center = x.mean();
  const double spread = std::sqrt((x.array() - center).square().mean());
  const double scale = spread > 0.0 ? spread : 1.0;
  const Eigen::MatrixXd z = ((x.array() - center) / scale).matrix();
  const auto fit = detail::fit_logistic(z, y, options.l2, options.tolerance, options.max_iterations);

  AttackModel model;
  model.weight = fit.weights[0] / scale;
  model.bias = fit.bias - fit.weights[0] * center / scale;
  model.n_t = n_t;
  model.task = task;
  return model;
}

double attack_accuracy(const AttackModel& model, std::span<const AttackBundle> bundles) {
  require_both_origins(bundles);
  std::array<double, 2> correct{};
  std::array<double, 2> count{};
  for (const auto& b : bundles) {
    const std::size_t k = b.origin == Origin::Target ? 0 : 1;
    count[k] += 1.0;
    if (model.predicts_target(b.feature) == (b.origin == Origin::Target)) correct[k] += 1.0;
  }
  return 0.5 * (correct[0] / count[0] + correct[1] / count[1]);
}

double inter_group_attack_gap(const AttackModel& model, std::span<const AttackBundle> bundles) {
  std::array<std::vector<AttackBundle>, 2> split;
  for (const auto& b : bundles) {
    if (!b.group) throw Error(ErrorCode::MissingGroup, "bundle is not group-pure");
    split[static_cast<std::size_t>(*b.group)].push_back(b);
  }
  for (int g = 0; g < 2; ++g) {
    if (split[static_cast<std::size_t>(g)].empty()) {
      throw Error(ErrorCode::MissingGroup, "no bundles for group " + std::to_string(g));
    }
  }
  return attack_accuracy(model, split[0]) - attack_accuracy(model, split[1]);
}

}  // namespace shiftaudit
