#pragma once

#include <Eigen/Dense>

namespace ntscorisk {

// minimize c'x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,  lower <= x <= upper.
// Bounds must be finite. Dense two-phase simplex with Bland's rule; meant for
// the small programs of the budgeting step.
struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd A_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

enum class LpStatus { Optimal, Infeasible };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  // True when every nonbasic reduced cost is strictly positive at the optimum.
  bool unique = false;
};

LpSolution solve_lp(const LinearProgram& lp, double tol = 1e-11);

}  // namespace ntscorisk
