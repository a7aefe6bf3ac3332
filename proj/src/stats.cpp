#include "shiftaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shiftaudit/error.hpp"

namespace shiftaudit {

namespace {

void require_sample(std::span<const double> values, const char* what) {
  if (values.empty()) throw Error(ErrorCode::EmptySample, std::string(what) + " sample is empty");
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " sample has a non-finite value");
  }
}

}  // namespace

ScoreSample::ScoreSample(std::vector<double> values, Setting setting)
    : values_(std::move(values)), setting_(setting) {
  require_sample(values_, "score");
}

double percentile_threshold(std::span<const double> control, double p) {
  require_sample(control, "control");
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "percentile must lie in (0, 1)");
  std::vector<double> sorted(control.begin(), control.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // Guard against p * n landing a hair above an integer, e.g. 0.9 * 10.
  auto rank = static_cast<std::size_t>(std::ceil(p * n - 1e-9 * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

double tpr_at_threshold(std::span<const double> shifted, double threshold) {
  require_sample(shifted, "shifted");
  const auto above = std::count_if(shifted.begin(), shifted.end(), [&](double v) { return v > threshold; });
  return static_cast<double>(above) / static_cast<double>(shifted.size());
}

double auc_roc(std::span<const double> control, std::span<const double> shifted) {
  require_sample(control, "control");
  require_sample(shifted, "shifted");
  struct Entry {
    double value;
    bool is_shifted;
  };
  std::vector<Entry> all;
  all.reserve(control.size() + shifted.size());
  for (double v : control) all.push_back({v, false});
  for (double v : shifted) all.push_back({v, true});
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });

  // Twice the midrank sum keeps everything in integers.
  long long twice_rank_sum = 0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].value == all[i].value) ++j;
    const auto twice_midrank = static_cast<long long>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].is_shifted) twice_rank_sum += twice_midrank;
    }
    i = j;
  }
  const auto ns = static_cast<long long>(shifted.size());
  const auto nc = static_cast<long long>(control.size());
  // 2U = 2R - ns(ns + 1); AUC = U / (ns nc).
  const long long twice_u = twice_rank_sum - ns * (ns + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(ns * nc));
}

double mean(std::span<const double> values) {
  require_sample(values, "mean");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double standard_deviation(std::span<const double> values) {
  const double m = mean(values);
  if (values.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "x and y differ in length");
  if (x.size() < 2) throw Error(ErrorCode::DegenerateGrid, "a line needs at least two points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::DegenerateGrid, "all x values are equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace shiftaudit
