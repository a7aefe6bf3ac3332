#include "shiftaudit/audit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <thread>

#include "shiftaudit/error.hpp"
#include "shiftaudit/random.hpp"
#include "shiftaudit/stats.hpp"

namespace shiftaudit {

std::string_view to_string(Statistic statistic) {
  return statistic == Statistic::OverallAccuracy ? "overall_accuracy" : "inter_group_gap";
}

Statistic parse_statistic(std::string_view text) {
  if (text == "overall_accuracy") return Statistic::OverallAccuracy;
  if (text == "inter_group_gap") return Statistic::InterGroupGap;
  throw Error(ErrorCode::ConfigError, "unknown statistic '" + std::string(text) + "'");
}

std::string_view to_string(GapOrientation orientation) {
  switch (orientation) {
    case GapOrientation::Learned: return "learned";
    case GapOrientation::Performance: return "performance";
    case GapOrientation::Absolute: return "absolute";
  }
  return "unknown";
}

GapOrientation parse_gap_orientation(std::string_view text) {
  if (text == "learned") return GapOrientation::Learned;
  if (text == "performance") return GapOrientation::Performance;
  if (text == "absolute") return GapOrientation::Absolute;
  throw Error(ErrorCode::ConfigError, "unknown gap orientation '" + std::string(text) + "'");
}

void AuditConfig::validate() const {
  if (!normative || !alternative) throw Error(ErrorCode::ConfigError, "normative and alternative distributions are required");
  if (normative->dim() != alternative->dim() || normative->task() != alternative->task()) {
    throw Error(ErrorCode::DimensionMismatch, "normative and alternative distributions disagree on dim or task");
  }
  learner.validate();
  partition.validate();
  if (sample_size < 1) throw Error(ErrorCode::InvalidArgument, "sample_size must be >= 1");
  if (n_control_runs < 10) throw Error(ErrorCode::InvalidArgument, "n_control_runs must be >= 10");
  if (n_shifted_runs < 1) throw Error(ErrorCode::InvalidArgument, "n_shifted_runs must be >= 1");
  if (!(percentile > 0.0 && percentile < 1.0)) throw Error(ErrorCode::InvalidArgument, "percentile must lie in (0, 1)");
  if (n_q < 1) throw Error(ErrorCode::InvalidArgument, "n_q must be >= 1");
  if (n_shadows < 1) throw Error(ErrorCode::InvalidArgument, "n_shadows must be >= 1");
  if (!(auditor_data_fraction > 0.0 && auditor_data_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "auditor_data_fraction must lie in (0, 1]");
  }
  if (workers < 0) throw Error(ErrorCode::InvalidArgument, "workers must be >= 0");
}

std::uint64_t run_seed(const AuditConfig& cfg, std::string_view setting, int index) {
  return derive_seed(cfg.seed, setting, static_cast<std::uint64_t>(index));
}

namespace {

LearnerSpec seeded(const LearnerSpec& spec, std::uint64_t seed) {
  LearnerSpec out = spec;
  out.seed = seed;
  return out;
}

Dataset subsample(const Dataset& data, double fraction, std::uint64_t seed) {
  if (fraction >= 1.0) return data;
  const auto keep = std::max<Index>(1, static_cast<Index>(std::ceil(fraction * static_cast<double>(data.size()) - 1e-9)));
  std::vector<Index> rows(static_cast<std::size_t>(data.size()));
  std::iota(rows.begin(), rows.end(), Index{0});
  Rng rng = make_rng(seed);
  std::shuffle(rows.begin(), rows.end(), rng);
  rows.resize(static_cast<std::size_t>(keep));
  std::sort(rows.begin(), rows.end());
  return data.subset(rows);
}

Index audited_train_size(const AuditConfig& cfg) {
  const double share = cfg.partition.fractions[static_cast<std::size_t>(Partition::TargetTrain)];
  return std::max<Index>(1, static_cast<Index>(std::llround(share * static_cast<double>(cfg.sample_size))));
}

double naive_score(Statistic statistic, const RunDiagnostics& d, TaskKind task) {
  const bool classify = task == TaskKind::Classification;
  if (statistic == Statistic::OverallAccuracy) {
    return classify ? 1.0 - d.target_test_performance : d.target_test_performance;
  }
  if (!d.target_group_performance[0] || !d.target_group_performance[1]) {
    throw Error(ErrorCode::MissingGroup, "model-test part lacks a group for the naive baseline");
  }
  return std::abs(*d.target_group_performance[0] - *d.target_group_performance[1]);
}

// Everything after the target model is fixed: auditor data, shadows, attack.
RunDiagnostics evaluate_run(const AuditConfig& cfg, const Partitions& parts, const TrainedModel& target,
                            std::uint64_t seed) {
  const Dataset shadow_train = subsample(part(parts, Partition::ShadowTrain), cfg.auditor_data_fraction,
                                         derive_seed(seed, "shadow-subsample"));
  const Dataset attack_train = subsample(part(parts, Partition::AttackTrain), cfg.auditor_data_fraction,
                                         derive_seed(seed, "attack-subsample"));

  std::vector<TrainedModel> shadows;
  shadows.reserve(static_cast<std::size_t>(cfg.n_shadows));
  for (Index i = 0; i < cfg.n_shadows; ++i) {
    const auto index = static_cast<std::uint64_t>(i);
    if (i == 0) {
      shadows.push_back(train(seeded(cfg.learner, derive_seed(seed, "shadow", index)), shadow_train));
    } else {
      Rng rng = make_rng(derive_seed(seed, "extra-shadow-data", index));
      const Dataset extra = cfg.normative->sample(shadow_train.size(), rng);
      shadows.push_back(train(seeded(cfg.learner, derive_seed(seed, "shadow", index)), extra));
    }
  }

  const auto train_bundles = build_attack_dataset(target, shadows, attack_train, cfg.n_q,
                                                  derive_seed(seed, "attack-train-bundles"));
  const AttackModel attack = train_attack(train_bundles, cfg.n_q, {}, target.task());

  RunDiagnostics d;
  d.seed = seed;
  d.attack_train_accuracy = attack_accuracy(attack, train_bundles);
  const Dataset& attack_test = part(parts, Partition::AttackTest);
  if (cfg.statistic == Statistic::OverallAccuracy) {
    const auto bundles = build_attack_dataset(target, shadows, attack_test, cfg.n_q,
                                              derive_seed(seed, "attack-test-bundles"));
    d.score = attack_accuracy(attack, bundles);
  } else {
    const auto bundles = build_group_bundles(target, shadows, attack_test, cfg.n_q,
                                             derive_seed(seed, "attack-test-bundles"));
    const AttackModel used = cfg.gap_orientation == GapOrientation::Performance ? attack.performance_oriented() : attack;
    d.score = inter_group_attack_gap(used, bundles);
    if (cfg.gap_orientation == GapOrientation::Absolute) d.score = std::abs(d.score);
  }

  const Dataset& model_test = part(parts, Partition::ModelTest);
  d.target_train_performance = target.diagnostics().train_performance;
  d.target_test_performance = performance(target, model_test);
  for (int g = 0; g < 2; ++g) {
    const Dataset slice = model_test.with_group(g);
    if (!slice.is_empty()) d.target_group_performance[static_cast<std::size_t>(g)] = performance(target, slice);
  }
  d.target_converged = target.diagnostics().converged;
  d.shadows_converged = std::all_of(shadows.begin(), shadows.end(),
                                    [](const TrainedModel& m) { return m.diagnostics().converged; });
  if (cfg.statistic == Statistic::OverallAccuracy ||
      (d.target_group_performance[0] && d.target_group_performance[1])) {
    d.naive_score = naive_score(cfg.statistic, d, target.task());
  }
  return d;
}

Partitions auditor_partitions(const AuditConfig& cfg, std::uint64_t seed) {
  Rng rng = make_rng(derive_seed(seed, "normative-data"));
  const Dataset data = cfg.normative->sample(cfg.sample_size, rng);
  PartitionPlan plan = cfg.partition;
  plan.seed = derive_seed(seed, "split");
  if (data.task() != TaskKind::Classification) plan.stratify = false;
  return stratified_split(data, plan);
}

void run_parallel(std::size_t n_jobs, int workers, const std::function<void(std::size_t)>& job) {
  std::size_t n_threads = workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                       : static_cast<std::size_t>(workers);
  n_threads = std::min(n_threads, n_jobs);
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < n_jobs; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n_jobs; i = next++) job(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

TrainedModel train_audited_model(const AuditConfig& cfg, const DistributionPtr& source, std::uint64_t seed) {
  Rng rng = make_rng(derive_seed(seed, "audited-data"));
  const Dataset data = source->sample(audited_train_size(cfg), rng);
  return train(seeded(cfg.learner, derive_seed(seed, "audited-model")), data);
}

RunDiagnostics run_control_setting(const AuditConfig& cfg, std::uint64_t seed) {
  const Partitions parts = auditor_partitions(cfg, seed);
  const TrainedModel target = train(seeded(cfg.learner, derive_seed(seed, "target")), part(parts, Partition::TargetTrain));
  RunDiagnostics d = evaluate_run(cfg, parts, target, seed);
  d.target_train_size = part(parts, Partition::TargetTrain).size();
  return d;
}

RunDiagnostics run_shifted_setting(const AuditConfig& cfg, const TrainedModel* audited, std::uint64_t seed) {
  const Partitions parts = auditor_partitions(cfg, seed);
  if (audited != nullptr) {
    if (audited->dim() != cfg.normative->dim() || audited->task() != cfg.normative->task()) {
      throw Error(ErrorCode::DimensionMismatch, "audited model cannot be queried with normative data");
    }
    return evaluate_run(cfg, parts, *audited, seed);
  }
  const TrainedModel model = train_audited_model(cfg, cfg.alternative, seed);
  RunDiagnostics d = evaluate_run(cfg, parts, model, seed);
  d.target_train_size = audited_train_size(cfg);
  return d;
}

AuditReport make_report(Statistic statistic, double percentile, std::vector<RunDiagnostics> control,
                        std::vector<RunDiagnostics> shifted, bool use_naive_score) {
  AuditReport report;
  report.statistic = statistic;
  report.percentile = percentile;
  const auto pick = [&](const RunDiagnostics& d) { return use_naive_score ? d.naive_score : d.score; };
  for (const auto& d : control) report.control_scores.push_back(pick(d));
  for (const auto& d : shifted) report.shifted_scores.push_back(pick(d));
  report.threshold = percentile_threshold(report.control_scores, percentile);
  for (double s : report.shifted_scores) report.verdicts.push_back(s > report.threshold);
  report.tpr_at_percentile = tpr_at_threshold(report.shifted_scores, report.threshold);
  report.auc_roc = auc_roc(report.control_scores, report.shifted_scores);
  report.control_runs = std::move(control);
  report.shifted_runs = std::move(shifted);
  return report;
}

AuditOutcome run_audit_with_baseline(const AuditConfig& cfg) {
  cfg.validate();
  const auto n_control = static_cast<std::size_t>(cfg.n_control_runs);
  const auto n_shifted = static_cast<std::size_t>(cfg.n_shifted_runs);
  std::vector<RunDiagnostics> control(n_control);
  std::vector<RunDiagnostics> shifted(n_shifted);
  std::vector<std::string> failures(n_control + n_shifted);

  run_parallel(n_control + n_shifted, cfg.workers, [&](std::size_t job) {
    const bool is_control = job < n_control;
    const int index = static_cast<int>(is_control ? job : job - n_control);
    try {
      if (is_control) {
        control[job] = run_control_setting(cfg, run_seed(cfg, "control", index));
      } else {
        shifted[job - n_control] = run_shifted_setting(cfg, nullptr, run_seed(cfg, "shifted", index));
      }
    } catch (const std::exception& e) {
      failures[job] = std::string(is_control ? "control" : "shifted") + " run " + std::to_string(index) + ": " + e.what();
    }
  });

  std::string message;
  std::size_t n_failed = 0;
  for (const auto& f : failures) {
    if (f.empty()) continue;
    ++n_failed;
    if (n_failed <= 5) message += (message.empty() ? "" : "; ") + f;
  }
  if (n_failed > 0) {
    if (n_failed > 5) message += "; and " + std::to_string(n_failed - 5) + " more";
    throw Error(ErrorCode::RunFailed, std::to_string(n_failed) + " run(s) failed: " + message);
  }

  AuditOutcome outcome;
  outcome.attack = make_report(cfg.statistic, cfg.percentile, control, shifted, false);
  outcome.naive = make_report(cfg.statistic, cfg.percentile, std::move(control), std::move(shifted), true);
  return outcome;
}

AuditReport run_audit(const AuditConfig& cfg) { return run_audit_with_baseline(cfg).attack; }

AuditReport naive_baseline(const AuditConfig& cfg) { return run_audit_with_baseline(cfg).naive; }

GameResult play_game(const AuditConfig& cfg, double threshold, std::uint64_t seed) {
  cfg.validate();
  Rng rng = make_rng(derive_seed(seed, "coin"));
  GameResult result;
  result.true_b = std::uniform_int_distribution<int>(0, 1)(rng);
  const DistributionPtr& source = result.true_b == 0 ? cfg.normative : cfg.alternative;
  const TrainedModel audited = train_audited_model(cfg, source, derive_seed(seed, "challenger"));
  result.score = run_shifted_setting(cfg, &audited, derive_seed(seed, "auditor")).score;
  result.auditor_guess = result.score > threshold ? 1 : 0;
  result.win = result.auditor_guess == result.true_b;
  return result;
}

}  // namespace shiftaudit
