#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "shiftaudit/dataset.hpp"
#include "shiftaudit/random.hpp"

namespace shiftaudit {

/// A source of i.i.d. examples. Implementations are immutable; all randomness
/// comes from the caller's generator, so sampling is reentrant.
class Distribution {
 public:
  virtual ~Distribution() = default;

  virtual Index dim() const = 0;
  virtual TaskKind task() const = 0;
  virtual Dataset sample(Index n, Rng& rng) const = 0;
  virtual std::string describe() const = 0;
};

using DistributionPtr = std::shared_ptr<const Distribution>;

// ---------------------------------------------------------------------------
// One-dimensional two-group Gaussian family.
//
// For group z, X | Y=y ~ N(center_z + (2y-1) * separation_z + offset, sd_z^2),
// Y uniform on {0,1}, Z=1 with probability group_mix. With the default
// components (center_0 = 0, center_1 = tau, unit separation and sd) this is the
// family used throughout the underrepresentation analysis.

struct GaussianGroupComponent {
  double center = 0.0;
  double separation = 1.0;
  double sd = 1.0;
};

struct GaussianGroupParams {
  double group_mix = 0.5;
  double offset = 0.0;
  std::array<GaussianGroupComponent, 2> groups{};

  static GaussianGroupParams with_tau(double tau, double group_mix = 0.5);
  void validate() const;
};

class GaussianGroupDistribution final : public Distribution {
 public:
  explicit GaussianGroupDistribution(GaussianGroupParams params);

  Index dim() const override { return 1; }
  TaskKind task() const override { return TaskKind::Classification; }
  Dataset sample(Index n, Rng& rng) const override;
  std::string describe() const override;

  const GaussianGroupParams& params() const { return params_; }

 private:
  GaussianGroupParams params_;
};

struct GaussianGdsSpec {
  double tau = 0.0;
  Index n = 1;
};

/// z=1 with probability group_mix; group_mix = 0.5 realizes the balanced
/// population, group_mix = 0 its group-0 component.
Dataset sample_gaussian_gds(const GaussianGdsSpec& spec, double group_mix, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Latent-linear tabular family: X ~ N(mean, sd^2 I), score = w.x + b + N(0, noise_sd^2).
// Classification labels are 1[score > 0]; regression labels are the score.
// Group tags are Bernoulli(group_mix) and independent of (X, Y).

struct LatentLinearParams {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  double sd = 1.0;
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(2);
  double bias = 0.0;
  double noise_sd = 0.0;
  double group_mix = 0.0;
  TaskKind task = TaskKind::Classification;

  void validate() const;
};

class LatentLinearDistribution final : public Distribution {
 public:
  explicit LatentLinearDistribution(LatentLinearParams params);

  Index dim() const override { return params_.mean.size(); }
  TaskKind task() const override { return params_.task; }
  Dataset sample(Index n, Rng& rng) const override;
  std::string describe() const override;

 private:
  LatentLinearParams params_;
};

// ---------------------------------------------------------------------------
// Two-component mixtures. Each example comes from `first` with probability
// `weight`, independently; the component draws are then made in two batches,
// so finite pools are still sampled without replacement.

struct TaggedSample {
  Dataset data;
  std::vector<int> from_first;  ///< 1 where the row was drawn from the first component
};

class MixtureDistribution final : public Distribution {
 public:
  MixtureDistribution(double weight, DistributionPtr first, DistributionPtr second,
                      std::string label = "mixture");

  Index dim() const override { return first_->dim(); }
  TaskKind task() const override { return first_->task(); }
  Dataset sample(Index n, Rng& rng) const override;
  std::string describe() const override;

  TaggedSample sample_tagged(Index n, Rng& rng) const;
  double weight() const { return weight_; }

 private:
  double weight_;
  DistributionPtr first_;
  DistributionPtr second_;
  std::string label_;
};

/// alpha * base + (1 - alpha) * alt.
struct MixtureSpec {
  double alpha = 1.0;
  DistributionPtr base;
  DistributionPtr alt;
};

/// beta * group0 + (1 - beta) * group1, beta in [0.5, 1].
struct UnderrepSpec {
  double beta = 0.5;
  DistributionPtr group0;
  DistributionPtr group1;
};

DistributionPtr make_mixture(const MixtureSpec& spec);
DistributionPtr make_underrep(const UnderrepSpec& spec);

Dataset sample_mixture(const MixtureSpec& spec, Index n, std::uint64_t seed);
TaggedSample sample_mixture_tagged(const MixtureSpec& spec, Index n, std::uint64_t seed);
Dataset sample_underrep(const UnderrepSpec& spec, Index n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Finite pools (e.g. loaded from CSV). Every call draws distinct rows; asking
// for more rows than the pool holds raises PoolExhausted.

class PoolDistribution final : public Distribution {
 public:
  explicit PoolDistribution(Dataset pool, std::string label = "pool");

  Index dim() const override { return pool_.dim(); }
  TaskKind task() const override { return pool_.task(); }
  Dataset sample(Index n, Rng& rng) const override;
  std::string describe() const override;

  const Dataset& pool() const { return pool_; }

 private:
  Dataset pool_;
  std::string label_;
};

/// Carves `n_reserved` random rows out of a pool: {reserved, remainder}.
std::pair<Dataset, Dataset> reserve_split(const Dataset& pool, Index n_reserved,
                                          std::uint64_t seed);

}  // namespace shiftaudit
