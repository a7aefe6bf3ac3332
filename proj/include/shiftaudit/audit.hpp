#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shiftaudit/attack.hpp"
#include "shiftaudit/dataset.hpp"
#include "shiftaudit/distributions.hpp"
#include "shiftaudit/learners.hpp"

namespace shiftaudit {

enum class Statistic { OverallAccuracy, InterGroupGap };

std::string_view to_string(Statistic statistic);
Statistic parse_statistic(std::string_view text);

/// How the per-group attack accuracies are read for the gap statistic.
/// Learned keeps the fitted decision direction; Performance first orients the
/// meta-classifier so that better query performance means "target"; Absolute
/// takes the magnitude of the gap, which does not depend on the direction.
enum class GapOrientation { Learned, Performance, Absolute };

std::string_view to_string(GapOrientation orientation);
GapOrientation parse_gap_orientation(std::string_view text);

struct AuditConfig {
  Statistic statistic = Statistic::InterGroupGap;
  GapOrientation gap_orientation = GapOrientation::Performance;
  LearnerSpec learner;
  PartitionPlan partition;
  Index sample_size = 5000;  ///< draws from the normative distribution per run
  DistributionPtr normative;
  DistributionPtr alternative;
  int n_control_runs = 50;
  int n_shifted_runs = 50;
  double percentile = 0.9;
  Index n_q = 50;
  Index n_shadows = 1;
  /// Share of the auditor's shadow-train and attack-train rows actually used.
  double auditor_data_fraction = 1.0;
  std::uint64_t seed = 0;
  int workers = 1;  ///< 0: one per hardware thread

  void validate() const;
};

struct RunDiagnostics {
  std::uint64_t seed = 0;
  double score = 0.0;        ///< the configured statistic
  double naive_score = 0.0;  ///< the naive baseline's score for the same target
  double attack_train_accuracy = 0.0;
  double target_train_performance = 0.0;
  double target_test_performance = 0.0;
  /// Per-group test performance; empty when the test part lacks the group.
  std::array<std::optional<double>, 2> target_group_performance{};
  bool target_converged = true;
  bool shadows_converged = true;
  Index target_train_size = 0;
};

struct AuditReport {
  Statistic statistic = Statistic::InterGroupGap;
  double percentile = 0.9;
  std::vector<double> control_scores;
  std::vector<double> shifted_scores;
  double threshold = 0.0;
  std::vector<bool> verdicts;  ///< shifted_scores[i] > threshold
  double tpr_at_percentile = 0.0;
  double auc_roc = 0.5;
  std::vector<RunDiagnostics> control_runs;
  std::vector<RunDiagnostics> shifted_runs;
};

/// Seed of run `index` in `setting` ("control", "shifted", "game").
std::uint64_t run_seed(const AuditConfig& cfg, std::string_view setting, int index);

/// Target stand-in and shadows all trained on normative data.
RunDiagnostics run_control_setting(const AuditConfig& cfg, std::uint64_t seed);

/// The audited model sits in the target slot. Without one, a model is trained
/// on alternative data of the target-train partition's size.
RunDiagnostics run_shifted_setting(const AuditConfig& cfg, const TrainedModel* audited, std::uint64_t seed);

/// Trains the audited model the shifted setting uses when none is supplied.
TrainedModel train_audited_model(const AuditConfig& cfg, const DistributionPtr& source, std::uint64_t seed);

/// Builds a report from precomputed scores (threshold, verdicts, TPR, AUC).
AuditReport make_report(Statistic statistic, double percentile, std::vector<RunDiagnostics> control,
                        std::vector<RunDiagnostics> shifted, bool use_naive_score = false);

struct AuditOutcome {
  AuditReport attack;
  AuditReport naive;
};

/// Runs every control and shifted run once and scores them both ways.
AuditOutcome run_audit_with_baseline(const AuditConfig& cfg);
AuditReport run_audit(const AuditConfig& cfg);
/// Thresholds the target model's own test performance: the size of the
/// between-group performance disparity for the gap statistic, the test loss
/// (error rate or MSE) for overall accuracy.
AuditReport naive_baseline(const AuditConfig& cfg);

struct GameResult {
  int true_b = 0;
  int auditor_guess = 0;
  bool win = false;
  double score = 0.0;
};

/// One round of the audit game against a precomputed threshold: the
/// challenger trains on normative (b = 0) or alternative (b = 1) data.
GameResult play_game(const AuditConfig& cfg, double threshold, std::uint64_t seed);

}  // namespace shiftaudit
