#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "ntscorisk/nts.hpp"

namespace ntscorisk {

// (N+1)-asset NTS market, R = mu + sigma .* Xi, with the index in slot 0.
struct MarketModel {
  std::vector<std::string> symbols;  // optional; empty or length N+1
  std::vector<double> mu;
  std::vector<double> sigma;
  StdNtsParams nts;

  std::size_t num_assets() const { return mu.empty() ? 0 : mu.size() - 1; }
  std::string symbol(std::size_t slot) const;
  void validate() const;
};

// Long-only weights on the N risky assets, summing to one.
class Weights {
 public:
  explicit Weights(std::vector<double> w);
  Weights(std::initializer_list<double> w) : Weights(std::vector<double>(w)) {}
  static Weights equal(std::size_t n);

  std::span<const double> values() const { return w_; }
  const std::vector<double>& vector() const { return w_; }
  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }

 private:
  std::vector<double> w_;
};

// Bivariate (index, portfolio) reduction of the market at weights w.
struct PortfolioProjection {
  double mu_p = 0.0, sigma_p = 0.0, beta_p = 0.0, gamma_p = 1.0, rho_p = 0.0;
  double mu0 = 0.0, sigma0 = 0.0, beta0 = 0.0, gamma0 = 1.0;
  double kappa = 0.0;  // var(T)
};

// Partial derivatives of the projection fields in each raw weight w_j.
struct ProjectionGradient {
  std::vector<double> d_mu, d_sigma, d_beta, d_gamma, d_rho;
};

// Raw weights are accepted (no simplex check) so partial derivatives can be
// probed off the simplex; the Weights overloads validate first.
PortfolioProjection project_portfolio(const MarketModel& model, std::span<const double> w);
PortfolioProjection project_portfolio(const MarketModel& model, const Weights& w);
ProjectionGradient projection_gradient(const MarketModel& model, std::span<const double> w);
ProjectionGradient projection_gradient(const MarketModel& model, const Weights& w);

// sqrt(w' S w) with S_nm = gamma_n gamma_m sigma_n sigma_m rho_nm; equals sigma_p gamma_p.
double gaussian_scale(const MarketModel& model, std::span<const double> w);

// Standardized portfolio threshold u(x, w, t) and index threshold v(t).
double u_transform(double x, const PortfolioProjection& proj, double t);
double v_transform(double v0, const PortfolioProjection& proj, double t);
// d u(x, w, t) / d w_j given d beta_p / d w_j.
double du_dw(double x, const PortfolioProjection& proj, double t, double d_beta_j);

}  // namespace ntscorisk
