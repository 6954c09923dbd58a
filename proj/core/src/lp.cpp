#include "ntscorisk/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ntscorisk {

namespace {

class Tableau {
 public:
  Tableau(Eigen::Index rows, Eigen::Index cols) : t_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index cols() const { return t_.cols() - 1; }
  double& a(Eigen::Index i, Eigen::Index j) { return t_(i, j); }
  double& rhs(Eigen::Index i) { return t_(i, cols()); }
  double& cost(Eigen::Index j) { return t_(rows(), j); }
  double& objective() { return t_(rows(), cols()); }
  std::vector<Eigen::Index>& basis() { return basis_; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    }
    basis_[r] = c;
  }

  // Price out basic columns so the cost row holds reduced costs.
  void canonicalize() {
    for (Eigen::Index r = 0; r < rows(); ++r) {
      const Eigen::Index b = basis_[r];
      if (b >= 0 && cost(b) != 0.0) t_.row(rows()) -= cost(b) * t_.row(r);
    }
  }

  // Bland's rule; columns >= `allowed` never enter.
  bool run(Eigen::Index allowed, double tol) {
    for (int iter = 0; iter < 100000; ++iter) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (cost(j) < -tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows(); ++i) {
        if (a(i, enter) > tol) best = std::min(best, rhs(i) / a(i, enter));
      }
      Eigen::Index leave = -1;
      for (Eigen::Index i = 0; i < rows(); ++i) {
        if (a(i, enter) > tol && rhs(i) / a(i, enter) <= best + tol && (leave < 0 || basis_[i] < basis_[leave])) {
          leave = i;
        }
      }
      if (leave < 0) return false;  // unbounded
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex iteration limit reached");
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, double tol) {
  const Eigen::Index n = lp.c.size();
  const Eigen::Index m_ub = lp.A_ub.rows();
  const Eigen::Index m_eq = lp.A_eq.rows();
  if (lp.lower.size() != n || lp.upper.size() != n) throw std::invalid_argument("solve_lp: bound size mismatch");
  // Shift y = x - lower >= 0; finite upper bounds become extra <= rows.
  const Eigen::Index m_le = m_ub + n;
  const Eigen::Index m = m_le + m_eq;
  Eigen::MatrixXd A(m, n);
  Eigen::VectorXd b(m);
  if (m_ub > 0) {
    A.topRows(m_ub) = lp.A_ub;
    b.head(m_ub) = lp.b_ub - lp.A_ub * lp.lower;
  }
  A.middleRows(m_ub, n).setIdentity();
  b.segment(m_ub, n) = lp.upper - lp.lower;
  if (m_eq > 0) {
    A.bottomRows(m_eq) = lp.A_eq;
    b.tail(m_eq) = lp.b_eq - lp.A_eq * lp.lower;
  }

  // Columns: y (n) | slacks (m_le) | artificials (m).
  const Eigen::Index n_slack = m_le;
  const Eigen::Index art0 = n + n_slack;
  Tableau tab(m, art0 + m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    for (Eigen::Index j = 0; j < n; ++j) tab.a(i, j) = sign * A(i, j);
    if (i < m_le) tab.a(i, n + i) = sign;
    tab.rhs(i) = sign * b(i);
    if (i < m_le && sign > 0.0) {
      tab.basis()[i] = n + i;
    } else {
      tab.a(i, art0 + i) = 1.0;
      tab.basis()[i] = art0 + i;
      tab.cost(art0 + i) = 1.0;
    }
  }
  tab.canonicalize();
  tab.run(art0 + m, tol);
  LpSolution sol;
  if (-tab.objective() > 1e3 * tol * (1.0 + b.cwiseAbs().maxCoeff())) return sol;

  // Drive remaining artificials out of the basis where possible.
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basis()[i] < art0) continue;
    for (Eigen::Index j = 0; j < art0; ++j) {
      if (std::abs(tab.a(i, j)) > tol) {
        tab.pivot(i, j);
        break;
      }
    }
  }
  for (Eigen::Index j = 0; j <= art0 + m; ++j) tab.cost(j) = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) tab.cost(j) = lp.c(j);
  tab.canonicalize();
  tab.run(art0, tol);

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  std::vector<bool> basic(static_cast<std::size_t>(art0 + m), false);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index bidx = tab.basis()[i];
    basic[static_cast<std::size_t>(bidx)] = true;
    if (bidx < n) y(bidx) = tab.rhs(i);
  }
  sol.status = LpStatus::Optimal;
  sol.x = lp.lower + y.cwiseMax(0.0);
  sol.x = sol.x.cwiseMin(lp.upper);
  sol.objective = lp.c.dot(sol.x);
  sol.unique = true;
  for (Eigen::Index j = 0; j < art0; ++j) {
    if (!basic[static_cast<std::size_t>(j)] && tab.cost(j) <= tol) sol.unique = false;
  }
  return sol;
}

}  // namespace ntscorisk
