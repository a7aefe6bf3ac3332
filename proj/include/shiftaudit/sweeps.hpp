#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "shiftaudit/audit.hpp"
#include "shiftaudit/stats.hpp"

namespace shiftaudit {

enum class SweepAxis { Alpha, Beta, Learner, DataFraction };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view text);

/// One audit per grid value on top of `base`.
///   alpha:         alternative = alpha * first + (1 - alpha) * second
///   beta:          alternative = beta * first + (1 - beta) * second, first and
///                  second being the group-0 and group-1 distributions
///   learner:       base.learner replaced by each entry of `learners`
///   data_fraction: base.auditor_data_fraction replaced by each value
/// For alpha and beta, a missing base.normative defaults to `first`
/// (alpha) or the balanced mix (beta).
struct SweepSpec {
  SweepAxis axis = SweepAxis::Alpha;
  std::vector<double> grid;
  std::vector<LearnerSpec> learners;
  AuditConfig base;
  DistributionPtr first;
  DistributionPtr second;

  std::size_t size() const;
  void validate() const;
};

struct SweepRow {
  std::string label;  ///< grid value as text, or the algorithm name
  double value = 0.0; ///< grid value; the row index on the learner axis
  bool ok = false;
  std::string error;
  double control_mean = 0.0;
  double control_sd = 0.0;
  double shifted_mean = 0.0;
  double shifted_sd = 0.0;
  double auc = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
  double target_train_mean = 0.0;  ///< shifted-setting target, train performance
  double target_test_mean = 0.0;   ///< shifted-setting target, test performance
  std::vector<double> control_scores;
  std::vector<double> shifted_scores;
};

/// The audit configuration of cell `index`, including its derived seed. Seeds
/// depend on the cell's label only, so removing a grid value leaves every
/// other cell unchanged.
AuditConfig sweep_cell_config(const SweepSpec& spec, std::size_t index);
std::string sweep_cell_label(const SweepSpec& spec, std::size_t index);

/// Failed cells are recorded (ok = false) and the sweep continues.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// Least squares of shifted mean on grid value over the successful rows.
/// Raises DegenerateGrid below three rows or when all values coincide.
LineFit linearity_check(const std::vector<SweepRow>& rows);

}  // namespace shiftaudit
