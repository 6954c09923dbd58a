#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <random>
#include <vector>

#include "ntscorisk/market.hpp"

namespace ntscorisk::testing {

struct RandomModelOptions {
  double alpha_lo = 0.8, alpha_hi = 1.8;
  double theta_lo = 0.05, theta_hi = 2.0;
  double beta_fraction = 0.4;  // |beta| below this share of the domain bound
  double max_index_corr = 0.85;
};

// Correlation matrix from a one-factor structure plus noise; positive definite.
Eigen::MatrixXd random_correlation(std::mt19937_64& rng, std::size_t dim, double max_corr = 0.85);

// Index plus n_assets risky assets with daily-scale mu and sigma.
MarketModel random_model(std::mt19937_64& rng, std::size_t n_assets, const RandomModelOptions& opts = {});

// n_assets identical assets with common pairwise correlation.
MarketModel symmetric_model(std::size_t n_assets, double alpha = 1.2, double theta = 0.3, double beta = -0.1,
                            double index_corr = 0.6, double pair_corr = 0.5);

// Simplex weights bounded below by floor.
std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n, double floor = 0.02);

// The 5-asset model bundled under data/.
MarketModel bundled_model();

}  // namespace ntscorisk::testing
