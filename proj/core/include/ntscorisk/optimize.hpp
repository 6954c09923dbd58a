#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ntscorisk/risk.hpp"
#include "ntscorisk/sensitivity.hpp"

namespace ntscorisk {

// Euclidean projection onto the probability simplex.
std::vector<double> project_simplex(std::span<const double> y);

// Euclidean projection onto {w >= 0, sum w = 1, mu'w >= mu_star}.
// Throws Infeasible when mu_star exceeds max(mu).
std::vector<double> project_feasible(std::span<const double> y, std::span<const double> mu, double mu_star);

struct FrontierOptions {
  int max_iterations = 300;
  double stationarity_tol = 1e-7;  // on |P(w - g/|g|inf) - w|inf
  double step_tol = 1e-8;
};

struct FrontierPoint {
  double mu_star = 0.0;
  std::vector<double> w;
  double cocvar = 0.0;
  double expected_return = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Minimizes quadrature CoCVaR over the long-only simplex with w'mu >= mu_star
// by projected gradient with Armijo backtracking along the projection arc.
FrontierPoint min_cocvar_weights(const RiskContext& ctx, double mu_star, std::span<const double> w0,
                                 const FrontierOptions& opts = {});

// mu_star_k = min mu + k (max mu - min mu) / (n_points - 1), warm-started in order.
std::vector<FrontierPoint> efficient_frontier(const RiskContext& ctx, int n_points, std::span<const double> w0,
                                              const FrontierOptions& opts = {});

// argmin mct'dw s.t. mu'dw >= 0, sum dw = 0, max(-delta, -w_j) <= dw_j <= delta.
// Returns zero when no strict descent exists; ties resolve to the
// lexicographically smallest optimal step.
std::vector<double> budget_step(std::span<const double> mct, std::span<const double> mu, std::span<const double> w,
                                double delta);

struct BudgetOptions {
  Measure measure = Measure::CoCVaR;
  double delta = 4e-4;
  int iterations = 200;
  std::size_t bank_size = 100000;
  std::uint64_t seed = 20221115;
};

struct BudgetIterate {
  int iter = 0;
  std::vector<double> w;
  double covar = 0.0;
  double cocvar = 0.0;
  double expected_return = 0.0;
  double risk(Measure m) const { return m == Measure::CoVaR ? covar : cocvar; }
};

struct BudgetTrace {
  std::vector<BudgetIterate> iterations;  // iterations[0] is the starting point
  double box_halfwidth = 0.0;
  Measure measure = Measure::CoCVaR;
};

// One master bank; each pass recorrelates it at rho_p(w), computes Monte-Carlo
// MCTs, takes the LP step and records quadrature CoVaR/CoCVaR.
BudgetTrace budget_iterate(const RiskContext& ctx, std::span<const double> w0, const BudgetOptions& opts = {});

}  // namespace ntscorisk
