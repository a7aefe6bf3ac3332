#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "shiftaudit/dataset.hpp"
#include "shiftaudit/error.hpp"

namespace shiftaudit::testing {

/// Runs `body` and checks that it throws an Error carrying `code`.
inline void expect_error(ErrorCode code, const std::function<void()>& body) {
  try {
    body();
    ADD_FAILURE() << "expected " << to_string(code) << ", nothing thrown";
  } catch (const Error& e) {
    EXPECT_EQ(to_string(e.code()), to_string(code)) << e.what();
  }
}

/// Small generator for property tests. Values come from a coarse grid when
/// `ties` is set so duplicates are common.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  std::vector<double> values(int n, bool ties) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& v : out) v = ties ? static_cast<double>(integer(0, 6)) / 4.0 : normal();
    return out;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Two 2-D Gaussian classes with means (-3, 0) and (3, 0), unit covariance.
inline Dataset separated_gaussians(Index n, std::uint64_t seed) {
  Gen gen(seed);
  FeatureMatrix x(n, 2);
  Eigen::VectorXd y(n);
  GroupVector z = GroupVector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    y(i) = static_cast<double>(i % 2);
    x(i, 0) = (y(i) > 0.5 ? 3.0 : -3.0) + gen.normal();
    x(i, 1) = gen.normal();
    z(i) = gen.coin() ? 1 : 0;
  }
  return Dataset(std::move(x), std::move(y), std::move(z), TaskKind::Classification);
}

}  // namespace shiftaudit::testing
