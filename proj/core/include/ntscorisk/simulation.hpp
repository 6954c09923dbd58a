#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ntscorisk/nts.hpp"

namespace ntscorisk {

// Independent standard normal pairs plus subordinator draws. Regenerating
// with the same seed and size reproduces every vector bit for bit.
struct SampleBank {
  std::vector<double> eps0;
  std::vector<double> eps1;
  std::vector<double> t_draws;
  std::uint64_t seed = 0;

  std::size_t size() const { return t_draws.size(); }
};

// View over a parent bank with eps_p = rho eps0 + sqrt(1 - rho^2) eps1.
// The parent must outlive it.
struct CorrelatedBank {
  std::span<const double> eps0;
  std::vector<double> eps_p;
  std::span<const double> t_draws;
  double rho = 0.0;

  std::size_t size() const { return t_draws.size(); }
};

SampleBank make_bank(const SubordinatorGrid& grid, std::size_t M, std::uint64_t seed);
SampleBank make_bank(const SubordinatorParams& p, std::size_t M, std::uint64_t seed);

CorrelatedBank correlate(const SampleBank& bank, double rho);

struct BootstrapSummary {
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  std::vector<double> values;

  double iqr() const { return q75 - q25; }
};

// Applies `estimator` to `reps` banks of size M; rep k uses seed hash64(seed, k).
BootstrapSummary bootstrap_estimate(const std::function<double(const SampleBank&)>& estimator,
                                    const SubordinatorParams& p, std::size_t M, std::size_t reps,
                                    std::uint64_t seed);

// Summary statistics with linearly interpolated quartiles.
BootstrapSummary summarize(std::vector<double> values);

// Rows of standard NTS draws: beta (T - 1) + gamma .* (L z) sqrt(T), L L' = corr.
Eigen::MatrixXd simulate_std_nts(const StdNtsParams& p, std::size_t n, std::uint64_t seed);

}  // namespace ntscorisk
