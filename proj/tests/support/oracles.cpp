#include "oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <limits>

namespace ntscorisk::testing {

double vertex_minimum(const StepProblem& p) {
  std::vector<Eigen::RowVector4d> rows;
  std::vector<double> rhs;
  rows.push_back(-Eigen::Map<const Eigen::RowVector4d>(p.mu.data()));
  rhs.push_back(0.0);
  for (int j = 0; j < 4; ++j) {
    Eigen::RowVector4d e = Eigen::RowVector4d::Zero();
    e(j) = 1.0;
    rows.push_back(e);
    rhs.push_back(p.delta);
    rows.push_back(-e);
    rhs.push_back(std::min(p.delta, p.w[j]));
  }
  const Eigen::Map<const Eigen::Vector4d> cost(p.mct.data());
  const std::size_t m = rows.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      for (std::size_t c = b + 1; c < m; ++c) {
        Eigen::Matrix4d A;
        A.row(0).setOnes();
        A.row(1) = rows[a];
        A.row(2) = rows[b];
        A.row(3) = rows[c];
        const Eigen::Vector4d r{0.0, rhs[a], rhs[b], rhs[c]};
        Eigen::FullPivLU<Eigen::Matrix4d> lu(A);
        if (!lu.isInvertible()) continue;
        const Eigen::Vector4d x = lu.solve(r);
        bool feasible = true;
        for (std::size_t k = 0; k < m && feasible; ++k) feasible = rows[k].dot(x) <= rhs[k] + 1e-15;
        if (feasible) best = std::min(best, cost.dot(x));
      }
    }
  }
  return best;
}

double grid_search_first_weight(const RiskContext& ctx, double mu_star) {
  const auto& mu = ctx.model().mu;
  double best = std::numeric_limits<double>::infinity();
  double arg = -1.0;
  for (int k = 0; k <= 1000; ++k) {
    const double a = k / 1000.0;
    if (a * mu[1] + (1.0 - a) * mu[2] < mu_star - 1e-15) continue;
    const double c = tail_risk(ctx, std::vector<double>{a, 1.0 - a}).cocvar;
    if (c < best) {
      best = c;
      arg = a;
    }
  }
  return arg;
}

}  // namespace ntscorisk::testing
