#include "ntscorisk/market.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ntscorisk/errors.hpp"

namespace ntscorisk {

namespace {

constexpr double kDegenerateSigma = 1e-14;

struct Precomputed {
  std::vector<double> gamma;
  // cov(Xi_n, Xi_m) over all N+1 slots.
  Eigen::MatrixXd cov;
};

Precomputed precompute(const MarketModel& m) {
  Precomputed pc;
  pc.gamma = gamma_vector(m.nts);
  const auto d = static_cast<Eigen::Index>(m.mu.size());
  const double kappa = m.nts.sub.variance();
  pc.cov.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      pc.cov(i, j) = pc.gamma[i] * pc.gamma[j] * m.nts.corr(i, j) + m.nts.beta[i] * m.nts.beta[j] * kappa;
    }
  }
  return pc;
}

void check_size(const MarketModel& model, std::span<const double> w) {
  if (w.size() != model.num_assets()) {
    std::ostringstream msg;
    msg << "weight vector has " << w.size() << " entries, model has " << model.num_assets() << " assets";
    throw InfeasibleWeights(msg.str());
  }
}

}  // namespace

std::string MarketModel::symbol(std::size_t slot) const {
  if (slot < symbols.size()) return symbols[slot];
  return slot == 0 ? std::string("INDEX") : "A" + std::to_string(slot);
}

void MarketModel::validate() const {
  if (mu.size() < 2) throw InputError("market model needs an index and at least one asset");
  if (sigma.size() != mu.size() || nts.dim() != mu.size()) throw InputError("market model field lengths disagree");
  if (!symbols.empty() && symbols.size() != mu.size()) throw InputError("symbol list length disagrees with mu");
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!std::isfinite(mu[i])) throw InputError("mu must be finite");
    if (!(sigma[i] > 0.0) || !std::isfinite(sigma[i])) throw InputError("sigma must be positive and finite");
  }
  nts.validate();
}

Weights::Weights(std::vector<double> w) : w_(std::move(w)) {
  if (w_.empty()) throw InfeasibleWeights("weights are empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < w_.size(); ++i) {
    if (!std::isfinite(w_[i])) throw InfeasibleWeights("weights must be finite");
    if (w_[i] < 0.0) {
      std::ostringstream msg;
      msg << "short position rejected: w[" << i << "] = " << w_[i];
      throw InfeasibleWeights(msg.str());
    }
    sum += w_[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "weights sum to " << sum << ", expected 1";
    throw InfeasibleWeights(msg.str());
  }
}

Weights Weights::equal(std::size_t n) {
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  // Put the rounding residue on the last entry so the sum is exactly representable.
  w.back() = 1.0 - std::accumulate(w.begin(), w.end() - 1, 0.0);
  return Weights(std::move(w));
}

double gaussian_scale(const MarketModel& model, std::span<const double> w) {
  check_size(model, w);
  const auto gamma = gamma_vector(model.nts);
  double s = 0.0;
  for (std::size_t n = 1; n <= w.size(); ++n) {
    for (std::size_t m = 1; m <= w.size(); ++m) {
      s += w[n - 1] * w[m - 1] * gamma[n] * gamma[m] * model.sigma[n] * model.sigma[m] *
           model.nts.corr(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    }
  }
  return std::sqrt(std::max(s, 0.0));
}

PortfolioProjection project_portfolio(const MarketModel& model, std::span<const double> w) {
  check_size(model, w);
  const auto pc = precompute(model);
  const std::size_t N = w.size();
  PortfolioProjection p;
  p.kappa = model.nts.sub.variance();
  p.mu0 = model.mu[0];
  p.sigma0 = model.sigma[0];
  p.beta0 = model.nts.beta[0];
  p.gamma0 = pc.gamma[0];
  double var = 0.0;
  double beta_num = 0.0;
  double rho_num = 0.0;
  double scale2 = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    const double wn = w[n - 1];
    p.mu_p += wn * model.mu[n];
    beta_num += wn * model.sigma[n] * model.nts.beta[n];
    rho_num += wn * pc.gamma[n] * model.sigma[n] * model.nts.corr(0, static_cast<Eigen::Index>(n));
    for (std::size_t m = 1; m <= N; ++m) {
      const double wsn = wn * w[m - 1] * model.sigma[n] * model.sigma[m];
      var += wsn * pc.cov(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
      scale2 += wsn * pc.gamma[n] * pc.gamma[m] * model.nts.corr(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    }
  }
  if (!(var > kDegenerateSigma * kDegenerateSigma)) throw DegeneratePortfolio("portfolio volatility vanishes");
  p.sigma_p = std::sqrt(var);
  p.beta_p = beta_num / p.sigma_p;
  const double g2 = 1.0 - p.beta_p * p.beta_p * p.kappa;
  if (!(g2 > 0.0) || !(scale2 > 0.0)) throw DegeneratePortfolio("portfolio has no Gaussian component");
  p.gamma_p = std::sqrt(g2);
  p.rho_p = std::clamp(rho_num / std::sqrt(scale2), -1.0, 1.0);
  return p;
}

PortfolioProjection project_portfolio(const MarketModel& model, const Weights& w) {
  return project_portfolio(model, w.values());
}

ProjectionGradient projection_gradient(const MarketModel& model, std::span<const double> w) {
  const auto p = project_portfolio(model, w);
  const auto pc = precompute(model);
  const std::size_t N = w.size();
  ProjectionGradient g;
  g.d_mu.resize(N);
  g.d_sigma.resize(N);
  g.d_beta.resize(N);
  g.d_gamma.resize(N);
  g.d_rho.resize(N);
  const double scale = p.sigma_p * p.gamma_p;
  double rho_num = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    rho_num += w[n - 1] * pc.gamma[n] * model.sigma[n] * model.nts.corr(0, static_cast<Eigen::Index>(n));
  }
  for (std::size_t j = 1; j <= N; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    double cov_sum = 0.0;   // sum_n w_n sigma_n cov_nj
    double corr_sum = 0.0;  // sum_n w_n gamma_n sigma_n rho_nj
    for (std::size_t n = 1; n <= N; ++n) {
      const auto nn = static_cast<Eigen::Index>(n);
      cov_sum += w[n - 1] * model.sigma[n] * pc.cov(nn, jj);
      corr_sum += w[n - 1] * pc.gamma[n] * model.sigma[n] * model.nts.corr(nn, jj);
    }
    const double sj = model.sigma[j];
    g.d_mu[j - 1] = model.mu[j];
    g.d_sigma[j - 1] = sj * cov_sum / p.sigma_p;
    g.d_beta[j - 1] = sj / p.sigma_p * (model.nts.beta[j] - p.beta_p / p.sigma_p * cov_sum);
    g.d_gamma[j - 1] = -p.beta_p * p.kappa / p.gamma_p * g.d_beta[j - 1];
    g.d_rho[j - 1] = pc.gamma[j] * sj * (model.nts.corr(0, jj) / scale - rho_num * corr_sum / (scale * scale * scale));
  }
  return g;
}

ProjectionGradient projection_gradient(const MarketModel& model, const Weights& w) {
  return projection_gradient(model, w.values());
}

double u_transform(double x, const PortfolioProjection& proj, double t) {
  return (x - proj.beta_p * (t - 1.0)) / (proj.gamma_p * std::sqrt(t));
}

double v_transform(double v0, const PortfolioProjection& proj, double t) {
  return (v0 - proj.beta0 * (t - 1.0)) / (proj.gamma0 * std::sqrt(t));
}

double du_dw(double x, const PortfolioProjection& proj, double t, double d_beta_j) {
  const double u = u_transform(x, proj, t);
  return d_beta_j * ((1.0 - t) / (proj.gamma_p * std::sqrt(t)) + u * proj.beta_p * proj.kappa / (proj.gamma_p * proj.gamma_p));
}

}  // namespace ntscorisk
