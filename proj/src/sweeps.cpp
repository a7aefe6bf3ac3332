#include "shiftaudit/sweeps.hpp"

#include <charconv>
#include <cmath>

#include "shiftaudit/error.hpp"
#include "shiftaudit/random.hpp"

namespace shiftaudit {

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Alpha: return "alpha";
    case SweepAxis::Beta: return "beta";
    case SweepAxis::Learner: return "learner";
    case SweepAxis::DataFraction: return "data_fraction";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(std::string_view text) {
  if (text == "alpha") return SweepAxis::Alpha;
  if (text == "beta") return SweepAxis::Beta;
  if (text == "learner") return SweepAxis::Learner;
  if (text == "data_fraction") return SweepAxis::DataFraction;
  throw Error(ErrorCode::ConfigError, "unknown sweep axis '" + std::string(text) + "'");
}

std::size_t SweepSpec::size() const { return axis == SweepAxis::Learner ? learners.size() : grid.size(); }

void SweepSpec::validate() const {
  if (size() == 0) throw Error(ErrorCode::DegenerateGrid, "sweep grid is empty");
  for (double v : grid) {
    const bool legal = axis == SweepAxis::Alpha ? (v >= 0.0 && v <= 1.0)
                       : axis == SweepAxis::Beta ? (v >= 0.5 && v <= 1.0)
                       : axis == SweepAxis::DataFraction ? (v > 0.0 && v <= 1.0)
                                                         : true;
    if (!legal) throw Error(ErrorCode::ConfigError, "grid value out of range for the " + std::string(to_string(axis)) + " axis");
  }
  if ((axis == SweepAxis::Alpha || axis == SweepAxis::Beta) && (!first || !second)) {
    throw Error(ErrorCode::ConfigError, "alpha and beta sweeps need both component distributions");
  }
}

std::string sweep_cell_label(const SweepSpec& spec, std::size_t index) {
  if (spec.axis == SweepAxis::Learner) return std::string(to_string(spec.learners.at(index).algorithm()));
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, spec.grid.at(index));
  return std::string(buf, res.ptr);
}

AuditConfig sweep_cell_config(const SweepSpec& spec, std::size_t index) {
  AuditConfig cfg = spec.base;
  const std::string label = sweep_cell_label(spec, index);
  cfg.seed = derive_seed(spec.base.seed, std::string(to_string(spec.axis)) + ":" + label);
  switch (spec.axis) {
    case SweepAxis::Alpha:
      if (!cfg.normative) cfg.normative = spec.first;
      cfg.alternative = make_mixture({spec.grid[index], spec.first, spec.second});
      break;
    case SweepAxis::Beta:
      if (!cfg.normative) cfg.normative = make_underrep({0.5, spec.first, spec.second});
      cfg.alternative = make_underrep({spec.grid[index], spec.first, spec.second});
      break;
    case SweepAxis::Learner:
      cfg.learner = spec.learners[index];
      break;
    case SweepAxis::DataFraction:
      cfg.auditor_data_fraction = spec.grid[index];
      break;
  }
  return cfg;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    SweepRow row;
    row.label = sweep_cell_label(spec, i);
    row.value = spec.axis == SweepAxis::Learner ? static_cast<double>(i) : spec.grid[i];
    try {
      const AuditReport report = run_audit(sweep_cell_config(spec, i));
      row.control_scores = report.control_scores;
      row.shifted_scores = report.shifted_scores;
      row.control_mean = mean(report.control_scores);
      row.control_sd = standard_deviation(report.control_scores);
      row.shifted_mean = mean(report.shifted_scores);
      row.shifted_sd = standard_deviation(report.shifted_scores);
      row.auc = report.auc_roc;
      row.tpr = report.tpr_at_percentile;
      row.threshold = report.threshold;
      double train_sum = 0.0;
      double test_sum = 0.0;
      for (const auto& d : report.shifted_runs) {
        train_sum += d.target_train_performance;
        test_sum += d.target_test_performance;
      }
      row.target_train_mean = train_sum / static_cast<double>(report.shifted_runs.size());
      row.target_test_mean = test_sum / static_cast<double>(report.shifted_runs.size());
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

LineFit linearity_check(const std::vector<SweepRow>& rows) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& r : rows) {
    if (!r.ok) continue;
    x.push_back(r.value);
    y.push_back(r.shifted_mean);
  }
  if (x.size() < 3) throw Error(ErrorCode::DegenerateGrid, "linearity needs at least three successful grid points");
  return fit_line(x, y);
}

}  // namespace shiftaudit
