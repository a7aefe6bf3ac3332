#include "shiftaudit/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "shiftaudit/error.hpp"

namespace shiftaudit {

GaussianGroupParams GaussianGroupParams::with_tau(double tau, double group_mix) {
  GaussianGroupParams p;
  p.group_mix = group_mix;
  p.groups[1].center = tau;
  return p;
}

void GaussianGroupParams::validate() const {
  if (!(group_mix >= 0.0 && group_mix <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "group_mix must lie in [0, 1]");
  }
  for (const auto& g : groups) {
    if (!(g.sd > 0.0) || !std::isfinite(g.center) || !std::isfinite(g.separation)) {
      throw Error(ErrorCode::InvalidArgument, "invalid Gaussian group component");
    }
  }
}

GaussianGroupDistribution::GaussianGroupDistribution(GaussianGroupParams params)
    : params_(params) {
  params_.validate();
}

Dataset GaussianGroupDistribution::sample(Index n, Rng& rng) const {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative sample size");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  FeatureMatrix x(n, 1);
  Eigen::VectorXd y(n);
  GroupVector z(n);
  for (Index i = 0; i < n; ++i) {
    // Three draws per example regardless of parameters, so the same seed gives
    // coupled samples across parameter values.
    const int group = unit(rng) < params_.group_mix ? 1 : 0;
    const int label = unit(rng) < 0.5 ? 1 : 0;
    const double noise = normal(rng);
    const auto& c = params_.groups[static_cast<std::size_t>(group)];
    x(i, 0) = c.center + (2 * label - 1) * c.separation + params_.offset + c.sd * noise;
    y[i] = label;
    z[i] = group;
  }
  return Dataset(std::move(x), std::move(y), std::move(z), TaskKind::Classification);
}

std::string GaussianGroupDistribution::describe() const {
  std::ostringstream os;
  os << "gaussian_group(group_mix=" << params_.group_mix << ", tau=" << params_.groups[1].center
     << ")";
  return os.str();
}

Dataset sample_gaussian_gds(const GaussianGdsSpec& spec, double group_mix, std::uint64_t seed) {
  if (spec.n < 1) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
  GaussianGroupDistribution dist(GaussianGroupParams::with_tau(spec.tau, group_mix));
  Rng rng = make_rng(seed);
  return dist.sample(spec.n, rng);
}

// ---------------------------------------------------------------------------

void LatentLinearParams::validate() const {
  if (mean.size() < 1 || weights.size() != mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "latent-linear mean and weights must match");
  }
  if (!(sd > 0.0) || !(noise_sd >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "latent-linear sd must be positive");
  }
  if (!(group_mix >= 0.0 && group_mix <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "group_mix must lie in [0, 1]");
  }
}

LatentLinearDistribution::LatentLinearDistribution(LatentLinearParams params)
    : params_(std::move(params)) {
  params_.validate();
}

Dataset LatentLinearDistribution::sample(Index n, Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index d = dim();
  FeatureMatrix x(n, d);
  Eigen::VectorXd y(n);
  GroupVector z(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) x(i, j) = params_.mean[j] + params_.sd * normal(rng);
    const double score = x.row(i).dot(params_.weights) + params_.bias + params_.noise_sd * normal(rng);
    y[i] = params_.task == TaskKind::Classification ? (score > 0.0 ? 1.0 : 0.0) : score;
    z[i] = unit(rng) < params_.group_mix ? 1 : 0;
  }
  return Dataset(std::move(x), std::move(y), std::move(z), params_.task);
}

std::string LatentLinearDistribution::describe() const {
  std::ostringstream os;
  os << "latent_linear(dim=" << dim() << ")";
  return os.str();
}

// ---------------------------------------------------------------------------

MixtureDistribution::MixtureDistribution(double weight, DistributionPtr first,
                                         DistributionPtr second, std::string label)
    : weight_(weight), first_(std::move(first)), second_(std::move(second)), label_(std::move(label)) {
  if (!first_ || !second_) throw Error(ErrorCode::InvalidArgument, "mixture component missing");
  if (!(weight_ >= 0.0 && weight_ <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "mixture weight must lie in [0, 1]");
  }
  if (first_->dim() != second_->dim()) {
    throw Error(ErrorCode::DimensionMismatch, "mixture components differ in dimensionality");
  }
  if (first_->task() != second_->task()) {
    throw Error(ErrorCode::DimensionMismatch, "mixture components differ in task");
  }
}

TaggedSample MixtureDistribution::sample_tagged(Index n, Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> from_first(static_cast<std::size_t>(n));
  Index k = 0;
  for (auto& tag : from_first) {
    tag = unit(rng) < weight_ ? 1 : 0;
    k += tag;
  }
  const Dataset a = first_->sample(k, rng);
  const Dataset b = second_->sample(n - k, rng);

  FeatureMatrix x(n, dim());
  Eigen::VectorXd y(n);
  GroupVector z(n);
  Index ia = 0;
  Index ib = 0;
  for (Index i = 0; i < n; ++i) {
    const Dataset& src = from_first[static_cast<std::size_t>(i)] ? a : b;
    Index& at = from_first[static_cast<std::size_t>(i)] ? ia : ib;
    x.row(i) = src.features().row(at);
    y[i] = src.labels()[at];
    z[i] = src.groups()[at];
    ++at;
  }
  return {Dataset(std::move(x), std::move(y), std::move(z), task()), std::move(from_first)};
}

Dataset MixtureDistribution::sample(Index n, Rng& rng) const {
  return sample_tagged(n, rng).data;
}

std::string MixtureDistribution::describe() const {
  std::ostringstream os;
  os << label_ << '(' << weight_ << ": " << first_->describe() << ", " << second_->describe()
     << ')';
  return os.str();
}

DistributionPtr make_mixture(const MixtureSpec& spec) {
  return std::make_shared<MixtureDistribution>(spec.alpha, spec.base, spec.alt, "mixture");
}

DistributionPtr make_underrep(const UnderrepSpec& spec) {
  if (!(spec.beta >= 0.5 && spec.beta <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "beta must lie in [0.5, 1]");
  }
  return std::make_shared<MixtureDistribution>(spec.beta, spec.group0, spec.group1, "underrep");
}

Dataset sample_mixture(const MixtureSpec& spec, Index n, std::uint64_t seed) {
  return sample_mixture_tagged(spec, n, seed).data;
}

TaggedSample sample_mixture_tagged(const MixtureSpec& spec, Index n, std::uint64_t seed) {
  MixtureDistribution dist(spec.alpha, spec.base, spec.alt);
  Rng rng = make_rng(seed);
  return dist.sample_tagged(n, rng);
}

Dataset sample_underrep(const UnderrepSpec& spec, Index n, std::uint64_t seed) {
  const auto dist = make_underrep(spec);
  Rng rng = make_rng(seed);
  return dist->sample(n, rng);
}

// ---------------------------------------------------------------------------

PoolDistribution::PoolDistribution(Dataset pool, std::string label)
    : pool_(std::move(pool)), label_(std::move(label)) {}

Dataset PoolDistribution::sample(Index n, Rng& rng) const {
  if (n > pool_.size()) {
    throw Error(ErrorCode::PoolExhausted, label_ + ": requested " + std::to_string(n) +
                                              " rows from a pool of " + std::to_string(pool_.size()));
  }
  std::vector<Index> rows(static_cast<std::size_t>(pool_.size()));
  std::iota(rows.begin(), rows.end(), Index{0});
  // Partial Fisher-Yates: the first n entries become a uniform draw without replacement.
  for (Index i = 0; i < n; ++i) {
    std::uniform_int_distribution<Index> pick(i, pool_.size() - 1);
    std::swap(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(pick(rng))]);
  }
  rows.resize(static_cast<std::size_t>(n));
  return pool_.subset(rows);
}

std::string PoolDistribution::describe() const {
  return label_ + "(rows=" + std::to_string(pool_.size()) + ")";
}

std::pair<Dataset, Dataset> reserve_split(const Dataset& pool, Index n_reserved,
                                          std::uint64_t seed) {
  if (n_reserved < 0 || n_reserved > pool.size()) {
    throw Error(ErrorCode::PoolExhausted, "reserve larger than the pool");
  }
  std::vector<Index> rows(static_cast<std::size_t>(pool.size()));
  std::iota(rows.begin(), rows.end(), Index{0});
  Rng rng = make_rng(seed);
  std::shuffle(rows.begin(), rows.end(), rng);
  const auto cut = rows.begin() + n_reserved;
  std::vector<Index> reserved(rows.begin(), cut);
  std::vector<Index> rest(cut, rows.end());
  std::sort(reserved.begin(), reserved.end());
  std::sort(rest.begin(), rest.end());
  return {pool.subset(reserved), pool.subset(rest)};
}

}  // namespace shiftaudit
