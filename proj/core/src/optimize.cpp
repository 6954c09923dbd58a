#include "ntscorisk/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "ntscorisk/errors.hpp"
#include "ntscorisk/lp.hpp"

namespace ntscorisk {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

std::span<const double> asset_mu(const RiskContext& ctx) {
  return std::span<const double>(ctx.model().mu).subspan(1);
}

}  // namespace

std::vector<double> project_simplex(std::span<const double> y) {
  std::vector<double> u(y.begin(), y.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cum += u[k];
    const double t = (cum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) tau = t;
  }
  std::vector<double> w(y.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    w[i] = std::max(0.0, y[i] - tau);
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

std::vector<double> project_feasible(std::span<const double> y, std::span<const double> mu, double mu_star) {
  if (y.size() != mu.size() || y.empty()) throw InputError("project_feasible: size mismatch");
  const double mu_max = *std::max_element(mu.begin(), mu.end());
  if (mu_star > mu_max + 1e-15 * std::max(1.0, std::abs(mu_max))) {
    std::ostringstream msg;
    msg << "target return " << mu_star << " exceeds the largest asset return " << mu_max;
    throw Infeasible(msg.str());
  }
  auto w = project_simplex(y);
  if (dot(w, mu) >= mu_star) return w;
  if (mu_star >= mu_max) {
    // Only the top-return assets remain feasible.
    std::vector<double> sub;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (mu[i] == mu_max) {
        sub.push_back(y[i]);
        idx.push_back(i);
      }
    }
    const auto ps = project_simplex(sub);
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t k = 0; k < idx.size(); ++k) w[idx[k]] = ps[k];
    return w;
  }
  // KKT: w = P_simplex(y + nu mu) with nu > 0 chosen so the return constraint binds.
  std::vector<double> shifted(y.size());
  auto eval = [&](double nu) {
    for (std::size_t i = 0; i < y.size(); ++i) shifted[i] = y[i] + nu * mu[i];
    return project_simplex(shifted);
  };
  const double scale = std::max(max_abs(mu), 1e-300);
  double lo = 0.0;
  double hi = 1.0 / scale;
  while (dot(eval(hi), mu) < mu_star) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e30 / scale) break;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (dot(eval(mid), mu) < mu_star ? lo : hi) = mid;
  }
  return eval(hi);
}

FrontierPoint min_cocvar_weights(const RiskContext& ctx, double mu_star, std::span<const double> w0,
                                 const FrontierOptions& opts) {
  const auto mu = asset_mu(ctx);
  if (w0.size() != mu.size()) throw InfeasibleWeights("starting weights have the wrong length");
  auto objective = [&](const std::vector<double>& w, std::vector<double>* grad) {
    if (grad == nullptr) return tail_risk(ctx, w).cocvar;
    auto both = mct_both(ctx, w);
    *grad = both.cocvar.values;
    return both.risk.cocvar;
  };

  FrontierPoint out;
  out.mu_star = mu_star;
  std::vector<double> w = project_feasible(w0, mu, mu_star);
  std::vector<double> g;
  double f = objective(w, &g);
  double step = 1.0 / std::max(max_abs(g), 1e-12);
  std::vector<double> trial(w.size());
  std::vector<double> d(w.size());
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    out.iterations = iter;
    const double gmax = std::max(max_abs(g), 1e-300);
    for (std::size_t i = 0; i < w.size(); ++i) trial[i] = w[i] - g[i] / gmax;
    const auto pg = project_feasible(trial, mu, mu_star);
    double stationarity = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) stationarity = std::max(stationarity, std::abs(pg[i] - w[i]));
    if (stationarity < opts.stationarity_tol) {
      out.converged = true;
      break;
    }
    bool accepted = false;
    std::vector<double> w_new;
    double f_new = f;
    for (int back = 0; back < 60; ++back) {
      for (std::size_t i = 0; i < w.size(); ++i) trial[i] = w[i] - step * g[i];
      w_new = project_feasible(trial, mu, mu_star);
      for (std::size_t i = 0; i < w.size(); ++i) d[i] = w_new[i] - w[i];
      if (max_abs(d) < opts.step_tol) break;
      f_new = objective(w_new, nullptr);
      if (f_new <= f + 1e-4 * dot(g, d)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.converged = max_abs(d) < opts.step_tol;
      break;
    }
    std::vector<double> g_new;
    f_new = objective(w_new, &g_new);
    // Barzilai-Borwein step for the next trial.
    double ss = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      ss += d[i] * d[i];
      sy += d[i] * (g_new[i] - g[i]);
    }
    const double gscale = std::max(max_abs(g_new), 1e-12);
    step = sy > 0.0 ? std::clamp(ss / sy, 1e-6 / gscale, 1e3 / gscale) : std::min(2.0 * step, 1e3 / gscale);
    w = std::move(w_new);
    g = std::move(g_new);
    f = f_new;
  }
  out.w = w;
  out.cocvar = f;
  out.expected_return = dot(w, mu);
  return out;
}

std::vector<FrontierPoint> efficient_frontier(const RiskContext& ctx, int n_points, std::span<const double> w0,
                                              const FrontierOptions& opts) {
  if (n_points < 2) throw InputError("efficient_frontier: need at least two points");
  const auto mu = asset_mu(ctx);
  const double lo = *std::min_element(mu.begin(), mu.end());
  const double hi = *std::max_element(mu.begin(), mu.end());
  std::vector<FrontierPoint> points;
  std::vector<double> start(w0.begin(), w0.end());
  for (int k = 0; k < n_points; ++k) {
    const double target = k + 1 == n_points ? hi : lo + k * (hi - lo) / (n_points - 1);
    points.push_back(min_cocvar_weights(ctx, target, start, opts));
    start = points.back().w;
  }
  return points;
}

std::vector<double> budget_step(std::span<const double> mct, std::span<const double> mu, std::span<const double> w,
                                double delta) {
  const auto n = static_cast<Eigen::Index>(mct.size());
  if (mu.size() != mct.size() || w.size() != mct.size()) throw InputError("budget_step: size mismatch");
  if (!(delta > 0.0)) throw InputError("budget_step: delta must be positive");
  // Work in units of delta with unit-scale costs and return coefficients.
  const double cscale = std::max(max_abs(mct), 1e-300);
  const double mscale = std::max(max_abs(mu), 1e-300);
  LinearProgram lp;
  lp.c.resize(n);
  lp.A_ub.resize(1, n);
  lp.b_ub = Eigen::VectorXd::Zero(1);
  lp.A_eq = Eigen::MatrixXd::Ones(1, n);
  lp.b_eq = Eigen::VectorXd::Zero(1);
  lp.lower.resize(n);
  lp.upper = Eigen::VectorXd::Ones(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    lp.c(j) = mct[j] / cscale;
    lp.A_ub(0, j) = -mu[j] / mscale;
    lp.lower(j) = std::max(-1.0, -w[j] / delta);
  }
  const auto sol = solve_lp(lp);
  std::vector<double> out(mct.size(), 0.0);
  constexpr double kDescentTol = 1e-12;
  if (sol.status != LpStatus::Optimal || sol.objective >= -kDescentTol) return out;
  Eigen::VectorXd x = sol.x;
  if (!sol.unique) {
    // Lexicographic refinement over the optimal face.
    LinearProgram face = lp;
    face.A_ub.conservativeResize(2, n);
    face.A_ub.row(1) = lp.c.transpose();
    face.b_ub.conservativeResize(2);
    face.b_ub(1) = sol.objective + kDescentTol;
    for (Eigen::Index j = 0; j < n; ++j) {
      face.c.setZero();
      face.c(j) = 1.0;
      const auto r = solve_lp(face);
      if (r.status != LpStatus::Optimal) break;
      x = r.x;
      face.lower(j) = face.upper(j) = x(j);
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) out[j] = std::max(delta * x(j), -w[j]);
  return out;
}

BudgetTrace budget_iterate(const RiskContext& ctx, std::span<const double> w0, const BudgetOptions& opts) {
  if (opts.iterations < 1) throw InputError("budget_iterate: need at least one iteration");
  const auto mu = asset_mu(ctx);
  Weights start{std::vector<double>(w0.begin(), w0.end())};
  std::vector<double> w = start.vector();
  const auto bank = make_bank(ctx.grid(), opts.bank_size, opts.seed);
  BudgetTrace trace;
  trace.box_halfwidth = opts.delta;
  trace.measure = opts.measure;
  auto record = [&](int iter, const TailRisk& r) {
    BudgetIterate it;
    it.iter = iter;
    it.w = w;
    it.covar = r.covar;
    it.cocvar = r.cocvar;
    it.expected_return = dot(w, mu);
    trace.iterations.push_back(std::move(it));
  };
  for (int iter = 0; iter < opts.iterations; ++iter) {
    const auto both = mct_both(ctx, w, bank);
    record(iter, both.risk);
    const auto& mct = opts.measure == Measure::CoVaR ? both.covar.values : both.cocvar.values;
    const auto dw = budget_step(mct, mu, w, opts.delta);
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::max(0.0, w[j] + dw[j]);
  }
  record(opts.iterations, tail_risk(ctx, w));
  return trace;
}

}  // namespace ntscorisk
