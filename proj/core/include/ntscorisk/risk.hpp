#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "ntscorisk/market.hpp"
#include "ntscorisk/nts.hpp"
#include "ntscorisk/simulation.hpp"

namespace ntscorisk {

// zeta: index distress level; eta: portfolio level. Losses are reported positive.
struct RiskLevels {
  double zeta = 0.05;
  double eta = 0.05;

  void validate() const;
  double joint() const { return zeta * eta; }
};

enum class Method { Quadrature, Mcs };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

// Model-level state shared by every evaluation at fixed levels: the
// subordinator grid and the index VaR.
class RiskContext {
 public:
  RiskContext(MarketModel model, RiskLevels levels);

  const MarketModel& model() const { return model_; }
  const RiskLevels& levels() const { return levels_; }
  const SubordinatorGrid& grid() const { return *grid_; }
  // VaR of the standardized index, and -VaR as the index threshold.
  double var_std_index() const { return var_std_; }
  double index_threshold() const { return -var_std_; }
  double var_index() const { return model_.sigma[0] * var_std_ - model_.mu[0]; }

 private:
  MarketModel model_;
  RiskLevels levels_;
  std::shared_ptr<const SubordinatorGrid> grid_;
  double var_std_ = 0.0;
};

double var_std_index(const MarketModel& model, double zeta);
double var_index(const MarketModel& model, double zeta);

// P(Xi_0 <= xi0, Xi_p <= xip) as a subordinator mixture of bivariate normal cdfs.
double bivariate_std_cdf(double xi0, double xip, const PortfolioProjection& proj, const SubordinatorGrid& grid);

// Standardized CoVaR (loss-positive): root of F(-VaR, -x) = zeta eta.
double covar_std(const RiskContext& ctx, const PortfolioProjection& proj);
// Standardized CoCVaR given the standardized CoVaR.
double cocvar_std(const RiskContext& ctx, const PortfolioProjection& proj, double covar_std_value);

struct TailRisk {
  PortfolioProjection proj;
  double covar_std = 0.0;
  double cocvar_std = 0.0;
  double covar = 0.0;   // sigma_p covar_std - mu_p
  double cocvar = 0.0;  // sigma_p cocvar_std - mu_p
};

// Quadrature evaluation at raw weights.
TailRisk tail_risk(const RiskContext& ctx, std::span<const double> w);

double covar(const RiskContext& ctx, std::span<const double> w);
double cocvar_quadrature(const RiskContext& ctx, std::span<const double> w);
double covar(const MarketModel& model, const Weights& w, const RiskLevels& levels);
double cocvar_quadrature(const MarketModel& model, const Weights& w, const RiskLevels& levels);

struct McsEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::size_t tail_count = 0;
};

// Monte-Carlo CoCVaR on `bank` with the portfolio threshold from the quadrature CoVaR.
McsEstimate cocvar_mcs(const RiskContext& ctx, std::span<const double> w, const SampleBank& bank);
McsEstimate cocvar_mcs(const RiskContext& ctx, const PortfolioProjection& proj, double covar_std_value,
                       const SampleBank& bank);
// Empirical CoVaR: order statistic of portfolio draws among index-distressed samples.
double covar_mcs(const RiskContext& ctx, std::span<const double> w, const SampleBank& bank);

struct RiskReport {
  RiskLevels levels;
  double var_index = 0.0;
  double covar = 0.0;
  double cocvar = 0.0;
  Method method = Method::Quadrature;
  std::optional<std::size_t> samples;
  std::optional<double> std_error;
};

RiskReport quadrature_report(const RiskContext& ctx, std::span<const double> w);
RiskReport mcs_report(const RiskContext& ctx, std::span<const double> w, const SampleBank& bank);

struct GaussianTail {
  double var_x = 0.0;
  double covar = 0.0;
  double cocvar = 0.0;
};

// Bivariate normal reference: (X, Y) ~ N(mu, cov), X the index. CoCVaR by
// one-dimensional quadrature of the tail expectation of Y.
GaussianTail gaussian_covar_cocvar(const std::array<double, 2>& mu, const Eigen::Matrix2d& cov,
                                   const RiskLevels& levels);

}  // namespace ntscorisk
