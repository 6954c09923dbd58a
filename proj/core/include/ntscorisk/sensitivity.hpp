#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ntscorisk/market.hpp"
#include "ntscorisk/risk.hpp"
#include "ntscorisk/simulation.hpp"

namespace ntscorisk {

enum class Measure { CoVaR, CoCVaR };

std::string to_string(Measure m);
Measure measure_from_string(const std::string& s);

// Per-asset marginal contributions; rank 1 is the smallest value.
struct MctVector {
  std::vector<double> values;
  std::vector<int> ranks;
  Measure measure = Measure::CoVaR;
};

std::vector<int> ascending_ranks(const std::vector<double>& values);

// Expectations over the standardized tail event
//   L = {eps0 < v(T), eps_p < u(x, w, T)},  x = -CoVaR_std,
// with xi_p = beta_p (T - 1) + eps_p gamma_p sqrt(T) and the quadratic form
//   Q = rho eps0^2 - (1 + rho^2) eps0 eps_p + rho eps_p^2.
struct TailMoments {
  double prob = 0.0;        // P(L)
  double density_x = 0.0;   // dG/dx = E[phi(u) Phi((v - rho u)/s) / (gamma_p sqrt T)]
  double slope_beta = 0.0;  // E[phi(u) Phi((v - rho u)/s) ((1 - T)/(gamma_p sqrt T) + u beta_p kappa / gamma_p^2)]
  double quad_form = 0.0;   // E[Q ; L]
  double j_beta = 0.0;      // E[(T - 1) - eps_p beta_p kappa sqrt(T) / gamma_p ; L]
  double j_rho = 0.0;       // E[Q (xi_p - x) ; L]
  double tail_mean = 0.0;   // E[xi_p ; L]
  std::size_t samples = 0;  // 0 for quadrature
};

TailMoments tail_moments(const PortfolioProjection& proj, double xi0, double x, const SubordinatorGrid& grid);
TailMoments tail_moments(const PortfolioProjection& proj, double xi0, double x, const CorrelatedBank& bank);

// Standardized sensitivities d Risk_std / d w_j.
std::vector<double> mct_covar_std(const PortfolioProjection& proj, const ProjectionGradient& grad,
                                  const RiskLevels& levels, const TailMoments& tm);
std::vector<double> mct_cocvar_std(const PortfolioProjection& proj, const ProjectionGradient& grad,
                                   const RiskLevels& levels, const TailMoments& tm, double covar_std_value,
                                   double cocvar_std_value);

// Portfolio-level MCT: d_sigma_j Risk_std + sigma_p dRisk_std/dw_j - mu_j.
// Quadrature overload evaluates all tail expectations on the subordinator
// grid; the bank overload uses common random numbers from `bank`.
MctVector mct_portfolio(const RiskContext& ctx, std::span<const double> w, Measure measure);
MctVector mct_portfolio(const RiskContext& ctx, std::span<const double> w, Measure measure, const SampleBank& bank);

// Both measures at once, sharing the tail expectations.
struct MctPair {
  MctVector covar;
  MctVector cocvar;
  TailRisk risk;
};
MctPair mct_both(const RiskContext& ctx, std::span<const double> w);
MctPair mct_both(const RiskContext& ctx, std::span<const double> w, const SampleBank& bank);

// Central differences of the quadrature risk in each raw weight.
std::vector<double> mct_finite_difference(const RiskContext& ctx, std::span<const double> w, Measure measure,
                                          double h);

}  // namespace ntscorisk
