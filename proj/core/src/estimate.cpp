#include "ntscorisk/estimate.hpp"

#include <algorithm>
#include <array>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "ntscorisk/errors.hpp"
#include "ntscorisk/normal.hpp"
#include "ntscorisk/parallel.hpp"

namespace ntscorisk {

namespace {

constexpr double kAlphaLo = 0.1;
constexpr double kAlphaHi = 1.95;
constexpr double kThetaLo = 1e-4;
constexpr double kThetaHi = 100.0;
constexpr double kBetaShrink = 0.995;
constexpr double kPenalty = 1e6;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

struct BoxParams {
  SubordinatorParams sub;
  double beta;
};

BoxParams from_free(const std::array<double, 3>& x) {
  BoxParams p;
  p.sub.alpha = kAlphaLo + (kAlphaHi - kAlphaLo) * logistic(x[0]);
  p.sub.theta = std::exp(std::log(kThetaLo) + std::log(kThetaHi / kThetaLo) * logistic(x[1]));
  p.beta = kBetaShrink * p.sub.beta_bound() * std::tanh(x[2]);
  return p;
}

std::array<double, 3> to_free(double alpha, double theta, double beta) {
  const double pa = std::clamp((alpha - kAlphaLo) / (kAlphaHi - kAlphaLo), 1e-6, 1 - 1e-6);
  const double pt = std::clamp(std::log(theta / kThetaLo) / std::log(kThetaHi / kThetaLo), 1e-6, 1 - 1e-6);
  const SubordinatorParams sub{alpha, theta};
  const double r = std::clamp(beta / (kBetaShrink * sub.beta_bound()), -0.999, 0.999);
  return {logit(pa), logit(pt), std::atanh(r)};
}

struct SimplexResult {
  std::array<double, 3> x{};
  double f = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Nelder-Mead with standard coefficients (1, 2, 1/2, 1/2).
template <class F>
SimplexResult nelder_mead(F&& f, const std::array<double, 3>& x0, double scale, int max_evals, double ftol) {
  constexpr int n = 3;
  std::array<std::array<double, 3>, n + 1> pts;
  std::array<double, n + 1> vals;
  SimplexResult out;
  pts[0] = x0;
  for (int i = 0; i < n; ++i) {
    pts[i + 1] = x0;
    pts[i + 1][i] += scale;
  }
  for (int i = 0; i <= n; ++i) vals[i] = f(pts[i]);
  out.evaluations = n + 1;
  auto order = [&] {
    std::array<int, n + 1> idx{0, 1, 2, 3};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    auto p2 = pts;
    auto v2 = vals;
    for (int i = 0; i <= n; ++i) {
      pts[i] = p2[idx[i]];
      vals[i] = v2[idx[i]];
    }
  };
  while (out.evaluations < max_evals) {
    order();
    if (std::abs(vals[n] - vals[0]) <= ftol * (std::abs(vals[0]) + 1e-300)) {
      out.converged = true;
      break;
    }
    std::array<double, 3> centroid{};
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) centroid[k] += pts[i][k] / n;
    auto along = [&](double t) {
      std::array<double, 3> p;
      for (int k = 0; k < n; ++k) p[k] = centroid[k] + t * (pts[n][k] - centroid[k]);
      return p;
    };
    const auto xr = along(-1.0);
    const double fr = f(xr);
    ++out.evaluations;
    if (fr < vals[0]) {
      const auto xe = along(-2.0);
      const double fe = f(xe);
      ++out.evaluations;
      if (fe < fr) {
        pts[n] = xe;
        vals[n] = fe;
      } else {
        pts[n] = xr;
        vals[n] = fr;
      }
    } else if (fr < vals[n - 1]) {
      pts[n] = xr;
      vals[n] = fr;
    } else {
      const bool outside = fr < vals[n];
      const auto xc = along(outside ? -0.5 : 0.5);
      const double fc = f(xc);
      ++out.evaluations;
      if (fc < (outside ? fr : vals[n])) {
        pts[n] = xc;
        vals[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          for (int k = 0; k < n; ++k) pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
          vals[i] = f(pts[i]);
        }
        out.evaluations += n;
      }
    }
  }
  order();
  out.x = pts[0];
  out.f = vals[0];
  return out;
}

}  // namespace

std::size_t ReturnPanel::column(const std::string& symbol) const {
  const auto it = std::find(symbols.begin(), symbols.end(), symbol);
  if (it == symbols.end()) throw InputError("symbol '" + symbol + "' not present in return panel");
  return static_cast<std::size_t>(it - symbols.begin());
}

void ReturnPanel::validate() const {
  if (series.size() != symbols.size() || symbols.empty()) throw InputError("return panel has no series");
  if (dates.size() < 250) {
    std::ostringstream msg;
    msg << "return panel has " << dates.size() << " rows; at least 250 are required";
    throw InputError(msg.str());
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (series[k].size() != dates.size()) throw InputError("series '" + symbols[k] + "' length differs from dates");
    for (double v : series[k]) {
      if (!std::isfinite(v)) throw InputError("series '" + symbols[k] + "' has a non-finite value");
    }
  }
  column(index_symbol);
  if (symbols.size() < 2) throw InputError("return panel needs the index and at least one asset");
}

ZScore zscore(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 2) throw DegenerateSeries("zscore needs at least two observations");
  ZScore z;
  z.mu = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : series) ss += (v - z.mu) * (v - z.mu);
  z.sigma = std::sqrt(ss / static_cast<double>(n - 1));
  // A constant series leaves only rounding in ss.
  double scale = 0.0;
  for (double v : series) scale = std::max(scale, std::abs(v));
  if (!(z.sigma > 1e-12 * scale)) throw DegenerateSeries("series has zero sample variance");
  z.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) z.residuals[i] = (series[i] - z.mu) / z.sigma;
  // Second pass removes the rounding left in the mean.
  const double shift = std::accumulate(z.residuals.begin(), z.residuals.end(), 0.0) / static_cast<double>(n);
  for (double& r : z.residuals) r -= shift;
  return z;
}

double silverman_bandwidth(std::span<const double> residuals) {
  const double n = static_cast<double>(residuals.size());
  const double mean = std::accumulate(residuals.begin(), residuals.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : residuals) ss += (r - mean) * (r - mean);
  return 1.06 * std::sqrt(ss / (n - 1.0)) * std::pow(n, -0.2);
}

std::vector<double> kde_cdf(std::span<const double> residuals, std::span<const double> grid) {
  if (residuals.size() < 30) throw InputError("kde_cdf needs at least 30 observations");
  std::vector<double> sorted(residuals.begin(), residuals.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = silverman_bandwidth(residuals);
  const double reach = 9.0 * h;  // kernel cdf is 0 or 1 to 1e-19 beyond this
  const double n = static_cast<double>(sorted.size());
  std::vector<double> out(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double x = grid[g];
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), x - reach);
    const auto last = std::upper_bound(sorted.begin(), sorted.end(), x + reach);
    double s = static_cast<double>(first - sorted.begin());
    for (auto it = first; it != last; ++it) s += norm_cdf((x - *it) / h);
    out[g] = s / n;
  }
  return out;
}

std::vector<double> fit_grid() {
  std::vector<double> g(201);
  for (int i = 0; i <= 200; ++i) g[i] = -6.0 + 0.06 * i;
  return g;
}

double cdf_fit_objective(std::span<const double> target, const SubordinatorParams& p, double beta) {
  const auto model = stdnts_marginal_uniform(-6.0, 0.06, 201, p, beta);
  double s = 0.0;
  for (std::size_t i = 0; i < 201; ++i) s += (model.cdf[i] - target[i]) * (model.cdf[i] - target[i]);
  return s;
}

Step1Fit fit_step1(std::span<const double> index_residuals) {
  const auto grid = fit_grid();
  const auto target = kde_cdf(index_residuals, grid);
  auto objective = [&](const std::array<double, 3>& x) {
    const auto p = from_free(x);
    try {
      return cdf_fit_objective(target, p.sub, p.beta);
    } catch (const NumericalError&) {
      return kPenalty;
    }
  };
  // Starting theta from the sample kurtosis: E[Xi^4] = 3 (1 + var T) when beta = 0.
  double m4 = 0.0;
  for (double r : index_residuals) m4 += r * r * r * r;
  m4 /= static_cast<double>(index_residuals.size());
  const double var_t = std::max(m4 / 3.0 - 1.0, 0.02);
  Step1Fit best;
  best.objective = std::numeric_limits<double>::infinity();
  bool any_converged = false;
  for (double alpha : {0.5, 0.9, 1.2, 1.5, 1.8}) {
    const double theta = std::clamp((2.0 - alpha) / (2.0 * var_t), 2e-3, 50.0);
    auto r = nelder_mead(objective, to_free(alpha, theta, 0.0), 0.5, 600, 1e-9);
    // Restart once from the end point to escape simplex collapse.
    const int used = r.evaluations;
    r = nelder_mead(objective, r.x, 0.1, 400, 1e-10);
    r.evaluations += used;
    any_converged = any_converged || r.converged;
    best.evaluations += r.evaluations;
    if (r.f < best.objective) {
      const auto p = from_free(r.x);
      best.sub = p.sub;
      best.beta0 = p.beta;
      best.objective = r.f;
    }
  }
  if (!any_converged || !(best.objective < kPenalty)) throw FitNotConverged("index curve fit did not converge");
  return best;
}

double fit_step2(std::span<const double> residuals, const SubordinatorParams& sub) {
  const auto target = kde_cdf(residuals, fit_grid());
  const double bound = kBetaShrink * sub.beta_bound();
  auto objective = [&](double beta) {
    try {
      return cdf_fit_objective(target, sub, beta);
    } catch (const NumericalError&) {
      return kPenalty;
    }
  };
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::brent_find_minima(objective, -bound, bound, 40, iters);
  if (!(r.second < kPenalty)) throw FitNotConverged("beta curve fit did not converge");
  return r.first;
}

Eigen::MatrixXd fit_step3(const Eigen::MatrixXd& residuals, const SubordinatorParams& sub,
                          std::span<const double> betas) {
  const Eigen::Index d = residuals.cols();
  if (static_cast<std::size_t>(d) != betas.size()) throw InputError("fit_step3: beta count mismatch");
  const Eigen::MatrixXd centered = residuals.rowwise() - residuals.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(residuals.rows() - 1);
  const double kappa = sub.variance();
  std::vector<double> gamma(betas.size());
  for (std::size_t i = 0; i < betas.size(); ++i) gamma[i] = gamma_from_beta(sub, betas[i]);
  Eigen::MatrixXd rho = Eigen::MatrixXd::Identity(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r = (cov(i, j) - betas[i] * betas[j] * kappa) / (gamma[i] * gamma[j]);
      rho(i, j) = rho(j, i) = std::clamp(r, -0.999, 0.999);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rho);
  if (eig.eigenvalues().minCoeff() < 1e-8) {
    const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(1e-8);
    Eigen::MatrixXd fixed = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
    const Eigen::VectorXd inv_sd = fixed.diagonal().cwiseSqrt().cwiseInverse();
    fixed = inv_sd.asDiagonal() * fixed * inv_sd.asDiagonal();
    rho = 0.5 * (fixed + fixed.transpose());
    rho.diagonal().setOnes();
  }
  return rho;
}

double kolmogorov_pvalue(double statistic, std::size_t n) {
  const double lambda = std::sqrt(static_cast<double>(n)) * statistic;
  if (lambda <= 0.0) return 1.0;
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  double p;
  if (lambda < 1.18) {
    // Theta-function form converges fast for small lambda.
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) s += std::exp(-(2 * k - 1) * (2 * k - 1) * pi2 / (8.0 * lambda * lambda));
    p = 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s;
  } else {
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      s += (k % 2 == 1 ? term : -term);
      if (term < 1e-300) break;
    }
    p = 2.0 * s;
  }
  return std::clamp(p, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> residuals, const MarginalTable& table) {
  std::vector<double> sorted(residuals.begin(), residuals.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = table.cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  KsResult out;
  out.statistic = d;
  out.pvalue = kolmogorov_pvalue(d, sorted.size());
  return out;
}

KsResult ks_test(std::span<const double> residuals, const SubordinatorParams& p, double beta) {
  if (residuals.empty()) throw InputError("ks_test: empty sample");
  const auto [mn, mx] = std::minmax_element(residuals.begin(), residuals.end());
  const double lo = *mn - 0.05;
  const double hi = *mx + 0.05;
  const double step = std::max(0.01, (hi - lo) / 20000.0);
  return ks_test(residuals, MarginalTable(p, beta, lo, hi, step));
}

FitReport fit_market_model(const ReturnPanel& panel) {
  panel.validate();
  const std::size_t idx = panel.column(panel.index_symbol);
  std::vector<std::size_t> order{idx};
  for (std::size_t k = 0; k < panel.symbols.size(); ++k) {
    if (k != idx) order.push_back(k);
  }
  const std::size_t d = order.size();
  std::vector<ZScore> z(d);
  for (std::size_t i = 0; i < d; ++i) z[i] = zscore(panel.series[order[i]]);

  FitReport report;
  auto& model = report.model;
  for (std::size_t i = 0; i < d; ++i) {
    model.symbols.push_back(panel.symbols[order[i]]);
    model.mu.push_back(z[i].mu);
    model.sigma.push_back(z[i].sigma);
  }
  const auto step1 = fit_step1(z[0].residuals);
  model.nts.sub = step1.sub;
  model.nts.beta.assign(d, 0.0);
  model.nts.beta[0] = step1.beta0;
  std::vector<std::string> failed(d);
  parallel_for(d - 1, [&](std::size_t k) {
    try {
      model.nts.beta[k + 1] = fit_step2(z[k + 1].residuals, step1.sub);
    } catch (const FitNotConverged&) {
      failed[k + 1] = model.symbols[k + 1];
    }
  });
  std::string failures;
  for (const auto& f : failed) {
    if (!f.empty()) failures += (failures.empty() ? "" : ", ") + f;
  }
  if (!failures.empty()) throw FitNotConverged("beta fit did not converge for: " + failures);

  Eigen::MatrixXd panel_res(static_cast<Eigen::Index>(panel.length()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    panel_res.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::VectorXd>(z[i].residuals.data(), static_cast<Eigen::Index>(z[i].residuals.size()));
  }
  model.nts.corr = fit_step3(panel_res, step1.sub, model.nts.beta);
  report.ks_stats.resize(d);
  report.ks_pvalues.resize(d);
  parallel_for(d, [&](std::size_t i) {
    const auto ks = ks_test(z[i].residuals, step1.sub, model.nts.beta[i]);
    report.ks_stats[i] = ks.statistic;
    report.ks_pvalues[i] = ks.pvalue;
  });
  model.validate();
  return report;
}

}  // namespace ntscorisk
