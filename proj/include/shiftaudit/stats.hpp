#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace shiftaudit {

enum class Setting { Control, Shifted };

/// Non-empty, finite statistic values from one setting.
class ScoreSample {
 public:
  ScoreSample(std::vector<double> values, Setting setting);

  std::span<const double> values() const { return values_; }
  Setting setting() const { return setting_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
  Setting setting_;
};

/// Nearest-rank percentile: the ceil(p * n)-th smallest value (1-based).
double percentile_threshold(std::span<const double> control, double p);
inline double percentile_threshold(const ScoreSample& control, double p) {
  return percentile_threshold(control.values(), p);
}

/// Fraction of values strictly above `threshold`.
double tpr_at_threshold(std::span<const double> shifted, double threshold);
inline double tpr_at_threshold(const ScoreSample& shifted, double threshold) {
  return tpr_at_threshold(shifted.values(), threshold);
}

/// Mann-Whitney estimate of P(shifted > control) + P(tie) / 2, by midranks.
double auc_roc(std::span<const double> control, std::span<const double> shifted);
inline double auc_roc(const ScoreSample& control, const ScoreSample& shifted) {
  return auc_roc(control.values(), shifted.values());
}

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for a single value.
double standard_deviation(std::span<const double> values);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares of y on x. r_squared is 1 when y is constant.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace shiftaudit
