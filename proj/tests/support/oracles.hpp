#pragma once

#include <array>
#include <vector>

#include "ntscorisk/risk.hpp"

namespace ntscorisk::testing {

// A budget-step instance on four assets.
struct StepProblem {
  std::array<double, 4> mct{}, mu{}, w{};
  double delta = 4e-4;
};

// Minimum of mct'dw over the vertices of {sum dw = 0, mu'dw >= 0,
// max(-delta, -w_j) <= dw_j <= delta}: the equality row plus every choice of
// three active inequality rows, each solved as a 4x4 system.
double vertex_minimum(const StepProblem& p);

// First weight of the two-asset long-only portfolio that minimizes quadrature
// CoCVaR over the grid a = k/1000 subject to the return target.
double grid_search_first_weight(const RiskContext& ctx, double mu_star);

}  // namespace ntscorisk::testing
