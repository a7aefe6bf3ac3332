#include "shiftaudit/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shiftaudit/error.hpp"
#include "shiftaudit/random.hpp"

namespace shiftaudit {

void TheoryParams::validate() const {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be > 0");
  if (n_train < 1) throw Error(ErrorCode::InvalidArgument, "n_train must be >= 1");
  if (!(pi_tr >= 0.0 && pi_tr <= 1.0 && pi_te >= 0.0 && pi_te <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "pi_tr and pi_te must lie in [0, 1]");
  }
  if (!(pi_tr >= pi_te)) throw Error(ErrorCode::InvalidArgument, "pi_tr must be at least pi_te");
  if (!std::isfinite(tau)) throw Error(ErrorCode::InvalidArgument, "tau must be finite");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

struct Component {
  double weight;
  double mean;
};

std::vector<Component> components(QueryDist query, double tau) {
  std::vector<Component> out;
  const double w = query == QueryDist::D ? 0.25 : 0.5;
  if (query != QueryDist::D1) {
    out.push_back({w, -1.0});
    out.push_back({w, 1.0});
  }
  if (query != QueryDist::D0) {
    out.push_back({w, -1.0 + tau});
    out.push_back({w, 1.0 + tau});
  }
  return out;
}

// P(a <= X <= b) for X ~ N(mean, 1), taking the tail that avoids cancellation.
double interval_mass(double a, double b, double mean) {
  const double lo = a - mean;
  const double hi = b - mean;
  if (lo > 0.0) return 0.5 * (std::erfc(lo / std::numbers::sqrt2) - std::erfc(hi / std::numbers::sqrt2));
  return normal_cdf(hi) - normal_cdf(lo);
}

double draw_query(QueryDist query, double tau, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double u_group = unit(rng);
  const double u_label = unit(rng);
  const double noise = normal(rng);
  int z = 0;
  if (query == QueryDist::D1) z = 1;
  if (query == QueryDist::D) z = u_group < 0.5 ? 1 : 0;
  const double sign = u_label < 0.5 ? -1.0 : 1.0;
  return sign + tau * z + noise;
}

// Sorted copy; is_close uses binary search on it.
bool is_close(std::span<const double> sorted, double x, double epsilon) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), x - epsilon);
  return it != sorted.end() && *it <= x + epsilon;
}

double exact_closeness(std::span<const double> sorted, QueryDist query, double tau, double epsilon) {
  const auto comps = components(query, tau);
  double total = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double a = sorted[i] - epsilon;
    double b = sorted[i] + epsilon;
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] - epsilon <= b) {
      b = std::max(b, sorted[j] + epsilon);
      ++j;
    }
    for (const auto& c : comps) total += c.weight * interval_mass(a, b, c.mean);
    i = j;
  }
  return std::clamp(total, 0.0, 1.0);
}

std::vector<double> sorted_copy(std::span<const double> points) {
  std::vector<double> out(points.begin(), points.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

ClosenessResult closeness_probability(std::span<const double> train_points, QueryDist query, double tau,
                                      double epsilon, ClosenessMethod method, std::int64_t mc_samples,
                                      std::uint64_t seed) {
  if (train_points.empty()) throw Error(ErrorCode::EmptySample, "training set is empty");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be > 0");
  const auto sorted = sorted_copy(train_points);
  ClosenessResult result;
  result.method = method;
  if (method == ClosenessMethod::ExactIntervalUnion) {
    result.f_value = exact_closeness(sorted, query, tau, epsilon);
    return result;
  }
  if (mc_samples < 1) throw Error(ErrorCode::InvalidArgument, "mc_samples must be >= 1");
  Rng rng = make_rng(seed);
  std::int64_t hits = 0;
  for (std::int64_t k = 0; k < mc_samples; ++k) {
    if (is_close(sorted, draw_query(query, tau, rng), epsilon)) ++hits;
  }
  const double n = static_cast<double>(mc_samples);
  const double f = static_cast<double>(hits) / n;
  result.f_value = f;
  result.mc_std_err = std::sqrt(f * (1.0 - f) / n);
  return result;
}

double attack_accuracy_closed_form(const TheoryParams& params, double f_t, double f_s) {
  params.validate();
  if (!(f_t >= 0.0 && f_t <= 1.0 && f_s >= 0.0 && f_s <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "closeness values must lie in [0, 1]");
  }
  return 0.5 + 0.5 * (params.pi_tr - params.pi_te) * (f_t - f_s);
}

std::vector<double> sample_theory_points(std::int64_t n, double tau, double group_mix, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& x : out) {
    const int z = unit(rng) < group_mix ? 1 : 0;
    const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
    x = sign + tau * z + normal(rng);
  }
  return out;
}

TheorySimulation simulate_theory_attack(const TheoryParams& params, QueryDist query, std::int64_t n_trials,
                                        std::uint64_t seed) {
  params.validate();
  if (n_trials < 1) throw Error(ErrorCode::InvalidArgument, "n_trials must be >= 1");
  const auto target = sorted_copy(sample_theory_points(params.n_train, params.tau, 0.0, derive_seed(seed, "target-set")));
  const auto shadow = sorted_copy(sample_theory_points(params.n_train, params.tau, 0.5, derive_seed(seed, "shadow-set")));

  Rng rng = make_rng(derive_seed(seed, "trials"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::int64_t wins = 0;
  for (std::int64_t k = 0; k < n_trials; ++k) {
    const bool given_target = unit(rng) < 0.5;
    const double x = draw_query(query, params.tau, rng);
    const bool close = is_close(given_target ? target : shadow, x, params.epsilon);
    const bool correct = unit(rng) < (close ? params.pi_tr : params.pi_te);
    if (correct == given_target) ++wins;
  }

  TheorySimulation sim;
  sim.n_trials = n_trials;
  sim.win_rate = static_cast<double>(wins) / static_cast<double>(n_trials);
  sim.f_t = exact_closeness(target, query, params.tau, params.epsilon);
  sim.f_s = exact_closeness(shadow, query, params.tau, params.epsilon);
  sim.closed_form = attack_accuracy_closed_form(params, sim.f_t, sim.f_s);
  return sim;
}

std::vector<TheoryCurveRow> theory_curve(double epsilon, std::int64_t n_train, std::span<const double> tau_grid,
                                         std::uint64_t seed, int n_resamples) {
  if (tau_grid.empty()) throw Error(ErrorCode::DegenerateGrid, "tau grid is empty");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be > 0");
  if (n_train < 1 || n_resamples < 2) throw Error(ErrorCode::InvalidArgument, "need n_train >= 1 and >= 2 resamples");

  const auto n = static_cast<std::size_t>(n_train);
  const double r = static_cast<double>(n_resamples);
  std::vector<TheoryCurveRow> rows;
  for (double tau : tau_grid) {
    if (!std::isfinite(tau)) throw Error(ErrorCode::InvalidArgument, "tau must be finite");
    // Columns: ft_d0, ft_d1, ft_d, fs_d0, fs_d1, fs_d, fs_d0 - fs_d1.
    std::array<double, 7> sum{};
    std::array<double, 7> sum_sq{};
    for (int s = 0; s < n_resamples; ++s) {
      const auto index = static_cast<std::uint64_t>(s);
      const auto target = sorted_copy(sample_theory_points(n_train, 0.0, 0.0, derive_seed(seed, "curve-target", index)));
      // Unshifted draws plus group tags, so every tau reuses the same randomness.
      Rng rng = make_rng(derive_seed(seed, "curve-shadow", index));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::normal_distribution<double> normal(0.0, 1.0);
      std::vector<double> shadow(n);
      for (auto& x : shadow) {
        const int z = unit(rng) < 0.5 ? 1 : 0;
        const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
        x = sign + tau * z + normal(rng);
      }
      std::sort(shadow.begin(), shadow.end());

      const std::array<double, 7> v{
          exact_closeness(target, QueryDist::D0, tau, epsilon),
          exact_closeness(target, QueryDist::D1, tau, epsilon),
          exact_closeness(target, QueryDist::D, tau, epsilon),
          exact_closeness(shadow, QueryDist::D0, tau, epsilon),
          exact_closeness(shadow, QueryDist::D1, tau, epsilon),
          exact_closeness(shadow, QueryDist::D, tau, epsilon),
          0.0,
      };
      for (std::size_t c = 0; c < v.size(); ++c) {
        const double value = c == 6 ? v[3] - v[4] : v[c];
        sum[c] += value;
        sum_sq[c] += value * value;
      }
    }
    std::array<double, 7> mean{};
    std::array<double, 7> se{};
    for (std::size_t c = 0; c < sum.size(); ++c) {
      mean[c] = sum[c] / r;
      const double var = std::max(0.0, (sum_sq[c] - r * mean[c] * mean[c]) / (r - 1.0));
      se[c] = std::sqrt(var / r);
    }
    TheoryCurveRow row;
    row.tau = tau;
    row.ft_d0 = mean[0];
    row.ft_d1 = mean[1];
    // D is the equal mixture of D0 and D1, and closeness is linear in the query law.
    row.ft_d = 0.5 * (mean[0] + mean[1]);
    row.fs_d0 = mean[3];
    row.fs_d1 = mean[4];
    row.fs_d = 0.5 * (mean[3] + mean[4]);
    row.se_ft_d0 = se[0];
    row.se_ft_d1 = se[1];
    row.se_fs_d = se[5];
    row.se_fs_gap = se[6];
    row.mc_stderr = std::max({se[0], se[1], se[5]});
    rows.push_back(row);
  }
  return rows;
}

}  // namespace shiftaudit
