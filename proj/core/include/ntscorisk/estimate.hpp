#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ntscorisk/market.hpp"
#include "ntscorisk/nts.hpp"

namespace ntscorisk {

struct ReturnPanel {
  std::vector<std::string> dates;
  std::vector<std::string> symbols;         // file column order
  std::vector<std::vector<double>> series;  // series[k] belongs to symbols[k]
  std::string index_symbol;

  std::size_t length() const { return dates.size(); }
  std::size_t column(const std::string& symbol) const;
  void validate() const;
};

struct ZScore {
  std::vector<double> residuals;
  double mu = 0.0;
  double sigma = 0.0;
};

ZScore zscore(std::span<const double> series);

double silverman_bandwidth(std::span<const double> residuals);
// Gaussian-kernel cdf with Silverman bandwidth at each grid point.
std::vector<double> kde_cdf(std::span<const double> residuals, std::span<const double> grid);

// The 201-point curve-fit grid on [-6, 6].
std::vector<double> fit_grid();

// Sum over the fit grid of (F_model - target)^2; `target` holds KDE values on fit_grid().
double cdf_fit_objective(std::span<const double> target, const SubordinatorParams& p, double beta);

struct Step1Fit {
  SubordinatorParams sub;
  double beta0 = 0.0;
  double objective = 0.0;
  int evaluations = 0;
};

// Curve fit of (alpha, theta, beta0) on the index residuals; Nelder-Mead from
// five starts inside alpha in (0.1, 1.95), theta in (1e-4, 100),
// |beta| < 0.995 sqrt(2 theta / (2 - alpha)).
Step1Fit fit_step1(std::span<const double> index_residuals);
// Same objective in beta alone at fixed (alpha, theta).
double fit_step2(std::span<const double> residuals, const SubordinatorParams& sub);
// Correlation matrix from the residual sample covariance (columns: index first).
Eigen::MatrixXd fit_step3(const Eigen::MatrixXd& residuals, const SubordinatorParams& sub,
                          std::span<const double> betas);

struct KsResult {
  double statistic = 0.0;
  double pvalue = 1.0;
};

// Asymptotic Kolmogorov tail probability P(K > sqrt(n) D).
double kolmogorov_pvalue(double statistic, std::size_t n);
KsResult ks_test(std::span<const double> residuals, const SubordinatorParams& p, double beta);
KsResult ks_test(std::span<const double> residuals, const MarginalTable& table);

struct FitReport {
  MarketModel model;
  std::vector<double> ks_stats;
  std::vector<double> ks_pvalues;
};

// z-scores, step 1 on the index, step 2 per asset, step 3 and KS per series.
// The fitted model has the index in slot 0 and assets in file order.
FitReport fit_market_model(const ReturnPanel& panel);

}  // namespace ntscorisk
