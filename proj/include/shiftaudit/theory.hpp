#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace shiftaudit {

/// One-dimensional overfitting model: a model is correct with probability
/// pi_tr on queries within epsilon of one of its training points, pi_te
/// elsewhere. Group 1 class means are shifted by tau.
struct TheoryParams {
  double tau = 0.0;
  double epsilon = 0.001;
  std::int64_t n_train = 1000;
  double pi_tr = 0.9;
  double pi_te = 0.6;

  void validate() const;
};

/// Query distributions of the 1-D family: group 0, group 1 (shifted by tau)
/// and their 50-50 mix.
enum class QueryDist { D, D0, D1 };

enum class ClosenessMethod { ExactIntervalUnion, MonteCarlo };

struct ClosenessResult {
  double f_value = 0.0;
  ClosenessMethod method = ClosenessMethod::ExactIntervalUnion;
  std::optional<double> mc_std_err;
};

/// Probability that x ~ query lies within epsilon of some training point.
/// The exact method merges the epsilon-intervals and sums Gaussian CDF
/// differences; Monte Carlo draws `mc_samples` queries from `seed`.
ClosenessResult closeness_probability(std::span<const double> train_points, QueryDist query, double tau,
                                      double epsilon, ClosenessMethod method,
                                      std::int64_t mc_samples = 1'000'000, std::uint64_t seed = 0);

/// 1/2 + 1/2 (pi_tr - pi_te)(f_t - f_s).
double attack_accuracy_closed_form(const TheoryParams& params, double f_t, double f_s);

/// Draws n_train 1-D points from the family: group 1 with probability
/// group_mix, label uniform, x ~ N(+-1 + tau * z, 1).
std::vector<double> sample_theory_points(std::int64_t n, double tau, double group_mix, std::uint64_t seed);

struct TheorySimulation {
  double win_rate = 0.0;
  double f_t = 0.0;          ///< exact closeness of the realized target set
  double f_s = 0.0;          ///< exact closeness of the realized shadow set
  double closed_form = 0.0;  ///< formula evaluated at the realized f_t, f_s
  std::int64_t n_trials = 0;
};

/// Draws S_t from group 0 and S_s from the 50-50 mix, then plays n_trials
/// rounds of the one-query game: a fair coin picks the model, x ~ query, the
/// model is correct with pi_tr or pi_te, and the attack guesses "target" iff
/// it was correct.
TheorySimulation simulate_theory_attack(const TheoryParams& params, QueryDist query, std::int64_t n_trials,
                                        std::uint64_t seed);

struct TheoryCurveRow {
  double tau = 0.0;
  double ft_d0 = 0.0;
  double ft_d1 = 0.0;
  double ft_d = 0.0;
  double fs_d0 = 0.0;
  double fs_d1 = 0.0;
  double fs_d = 0.0;
  /// Standard error over resampled training sets, per column above.
  double se_ft_d0 = 0.0;
  double se_ft_d1 = 0.0;
  double se_fs_d = 0.0;
  double se_fs_gap = 0.0;  ///< of fs_d0 - fs_d1
  double mc_stderr = 0.0;  ///< largest of the column standard errors
};

/// Exact closeness values averaged over `n_resamples` training-set draws. The
/// same underlying draws are reused for every tau so rows differ only by tau.
std::vector<TheoryCurveRow> theory_curve(double epsilon, std::int64_t n_train, std::span<const double> tau_grid,
                                         std::uint64_t seed, int n_resamples = 100);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace shiftaudit
