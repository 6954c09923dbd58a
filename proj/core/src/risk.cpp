#include "ntscorisk/risk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "ntscorisk/errors.hpp"
#include "ntscorisk/normal.hpp"
#include "ntscorisk/parallel.hpp"
#include "ntscorisk/quadrature.hpp"
#include "roots.hpp"

namespace ntscorisk {

namespace {

// Per-node constants of the subordinator mixture for one projection.
struct MixtureNodes {
  std::vector<double> weight, t, sqrt_t, v;
};

MixtureNodes mixture_nodes(const SubordinatorGrid& grid, const PortfolioProjection& proj, double xi0) {
  MixtureNodes nodes;
  const auto t = grid.t_nodes();
  const auto w = grid.weights();
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (w[k] <= 0.0) continue;
    nodes.weight.push_back(w[k]);
    nodes.t.push_back(t[k]);
    nodes.sqrt_t.push_back(std::sqrt(t[k]));
    nodes.v.push_back(v_transform(xi0, proj, t[k]));
  }
  return nodes;
}

double mixture_cdf(const MixtureNodes& nodes, const PortfolioProjection& proj, double x) {
  double s = 0.0;
  for (std::size_t k = 0; k < nodes.t.size(); ++k) {
    const double c = (x - proj.beta_p * (nodes.t[k] - 1.0)) / (proj.gamma_p * nodes.sqrt_t[k]);
    s += nodes.weight[k] * bvn_cdf(nodes.v[k], c, proj.rho_p);
  }
  return s;
}

}  // namespace

void RiskLevels::validate() const {
  if (!(zeta > 0.0 && zeta < 1.0) || !(eta > 0.0 && eta < 1.0)) {
    std::ostringstream msg;
    msg << "risk levels must lie in (0,1): zeta=" << zeta << " eta=" << eta;
    throw InputError(msg.str());
  }
}

std::string to_string(Method m) { return m == Method::Mcs ? "mcs" : "quadrature"; }

Method method_from_string(const std::string& s) {
  if (s == "mcs") return Method::Mcs;
  if (s == "quadrature") return Method::Quadrature;
  throw InputError("unknown method '" + s + "' (expected mcs or quadrature)");
}

double var_std_index(const MarketModel& model, double zeta) {
  if (!(zeta > 0.0 && zeta < 1.0)) throw InputError("zeta must lie in (0,1)");
  const auto& sub = model.nts.sub;
  const double beta0 = model.nts.beta.at(0);
  auto g = [&](double x) { return stdnts_marginal_cdf(x, sub, beta0) - zeta; };
  const double x = detail::increasing_root(g, norm_quantile(zeta), 0.25, 60.0, "index VaR", 1e-13);
  return -x;
}

double var_index(const MarketModel& model, double zeta) {
  return model.sigma.at(0) * var_std_index(model, zeta) - model.mu.at(0);
}

RiskContext::RiskContext(MarketModel model, RiskLevels levels) : model_(std::move(model)), levels_(levels) {
  model_.validate();
  levels_.validate();
  grid_ = shared_subordinator_grid(model_.nts.sub);
  var_std_ = ntscorisk::var_std_index(model_, levels_.zeta);
}

double bivariate_std_cdf(double xi0, double xip, const PortfolioProjection& proj, const SubordinatorGrid& grid) {
  return std::clamp(mixture_cdf(mixture_nodes(grid, proj, xi0), proj, xip), 0.0, 1.0);
}

double covar_std(const RiskContext& ctx, const PortfolioProjection& proj) {
  const double target = ctx.levels().joint();
  const double xi0 = ctx.index_threshold();
  const auto nodes = mixture_nodes(ctx.grid(), proj, xi0);
  // Moment-matched Gaussian root seeds the bracket.
  const double r = std::clamp(proj.gamma0 * proj.gamma_p * proj.rho_p + proj.beta0 * proj.beta_p * proj.kappa, -1.0, 1.0);
  const double a = std::clamp(xi0, -40.0, 40.0);
  auto gauss = [&](double x) { return bvn_cdf(a, x, r) - target; };
  double seed = 0.0;
  if (gauss(-40.0) < 0.0 && gauss(40.0) > 0.0) {
    seed = detail::bracketed_root(gauss, -40.0, 40.0, gauss(-40.0), gauss(40.0), 1e-10);
  }
  auto g = [&](double x) { return mixture_cdf(nodes, proj, x) - target; };
  return -detail::increasing_root(g, seed, 0.25, 60.0, "CoVaR");
}

double cocvar_std(const RiskContext& ctx, const PortfolioProjection& proj, double covar_std_value) {
  const double x = -covar_std_value;
  const auto nodes = mixture_nodes(ctx.grid(), proj, ctx.index_threshold());
  double h = 0.0;
  for (std::size_t k = 0; k < nodes.t.size(); ++k) {
    const double c = (x - proj.beta_p * (nodes.t[k] - 1.0)) / (proj.gamma_p * nodes.sqrt_t[k]);
    const auto m = orthant_moments(nodes.v[k], c, proj.rho_p);
    h += nodes.weight[k] * (proj.beta_p * (nodes.t[k] - 1.0) * m(0, 0) + proj.gamma_p * nodes.sqrt_t[k] * m(0, 1));
  }
  return -h / ctx.levels().joint();
}

TailRisk tail_risk(const RiskContext& ctx, std::span<const double> w) {
  TailRisk out;
  out.proj = project_portfolio(ctx.model(), w);
  out.covar_std = covar_std(ctx, out.proj);
  out.cocvar_std = cocvar_std(ctx, out.proj, out.covar_std);
  out.covar = out.proj.sigma_p * out.covar_std - out.proj.mu_p;
  out.cocvar = out.proj.sigma_p * out.cocvar_std - out.proj.mu_p;
  return out;
}

double covar(const RiskContext& ctx, std::span<const double> w) {
  const auto proj = project_portfolio(ctx.model(), w);
  return proj.sigma_p * covar_std(ctx, proj) - proj.mu_p;
}

double cocvar_quadrature(const RiskContext& ctx, std::span<const double> w) { return tail_risk(ctx, w).cocvar; }

double covar(const MarketModel& model, const Weights& w, const RiskLevels& levels) {
  return covar(RiskContext(model, levels), w.values());
}

double cocvar_quadrature(const MarketModel& model, const Weights& w, const RiskLevels& levels) {
  return cocvar_quadrature(RiskContext(model, levels), w.values());
}

McsEstimate cocvar_mcs(const RiskContext& ctx, const PortfolioProjection& proj, double covar_std_value,
                       const SampleBank& bank) {
  const std::size_t M = bank.size();
  if (M < 2) throw InputError("cocvar_mcs: bank too small");
  const double x = -covar_std_value;
  const double xi0 = ctx.index_threshold();
  const double rho = proj.rho_p;
  const double s = std::sqrt(std::max(0.0, (1.0 - rho) * (1.0 + rho)));
  const std::size_t chunks = (M + kChunkSize - 1) / kChunkSize;
  std::vector<double> sum(chunks, 0.0);
  std::vector<double> sumsq(chunks, 0.0);
  std::vector<std::size_t> count(chunks, 0);
  for_each_chunk(M, [&](std::size_t c, std::size_t begin, std::size_t end) {
    for (std::size_t m = begin; m < end; ++m) {
      const double t = bank.t_draws[m];
      const double e0 = bank.eps0[m];
      if (!(e0 < v_transform(xi0, proj, t))) continue;
      const double ep = rho * e0 + s * bank.eps1[m];
      if (!(ep < u_transform(x, proj, t))) continue;
      const double xi = proj.beta_p * (t - 1.0) + ep * proj.gamma_p * std::sqrt(t);
      sum[c] += xi;
      sumsq[c] += xi * xi;
      ++count[c];
    }
  });
  double total = 0.0;
  double total_sq = 0.0;
  std::size_t tail = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    total += sum[c];
    total_sq += sumsq[c];
    tail += count[c];
  }
  if (tail == 0) throw EmptyTail("no sample satisfies both tail indicators");
  const double n = static_cast<double>(M);
  const double mean = total / n;
  const double var = std::max(0.0, (total_sq - n * mean * mean) / (n - 1.0));
  const double zh = ctx.levels().joint();
  McsEstimate out;
  out.samples = M;
  out.tail_count = tail;
  out.value = -proj.mu_p - proj.sigma_p * mean / zh;
  out.std_error = proj.sigma_p * std::sqrt(var) / (zh * std::sqrt(n));
  return out;
}

McsEstimate cocvar_mcs(const RiskContext& ctx, std::span<const double> w, const SampleBank& bank) {
  const auto proj = project_portfolio(ctx.model(), w);
  return cocvar_mcs(ctx, proj, covar_std(ctx, proj), bank);
}

double covar_mcs(const RiskContext& ctx, std::span<const double> w, const SampleBank& bank) {
  const auto proj = project_portfolio(ctx.model(), w);
  const double xi0 = ctx.index_threshold();
  const double rho = proj.rho_p;
  const double s = std::sqrt(std::max(0.0, (1.0 - rho) * (1.0 + rho)));
  std::vector<double> distressed;
  for (std::size_t m = 0; m < bank.size(); ++m) {
    const double t = bank.t_draws[m];
    const double e0 = bank.eps0[m];
    if (!(e0 < v_transform(xi0, proj, t))) continue;
    const double ep = rho * e0 + s * bank.eps1[m];
    distressed.push_back(proj.beta_p * (t - 1.0) + ep * proj.gamma_p * std::sqrt(t));
  }
  const auto k = static_cast<std::size_t>(std::ceil(ctx.levels().joint() * static_cast<double>(bank.size())));
  if (k == 0 || distressed.size() < k) throw EmptyTail("too few index-distressed samples for the empirical CoVaR");
  std::nth_element(distressed.begin(), distressed.begin() + static_cast<std::ptrdiff_t>(k - 1), distressed.end());
  return proj.sigma_p * (-distressed[k - 1]) - proj.mu_p;
}

RiskReport quadrature_report(const RiskContext& ctx, std::span<const double> w) {
  const auto tr = tail_risk(ctx, w);
  RiskReport r;
  r.levels = ctx.levels();
  r.var_index = ctx.var_index();
  r.covar = tr.covar;
  r.cocvar = tr.cocvar;
  r.method = Method::Quadrature;
  return r;
}

RiskReport mcs_report(const RiskContext& ctx, std::span<const double> w, const SampleBank& bank) {
  const auto proj = project_portfolio(ctx.model(), w);
  const double cs = covar_std(ctx, proj);
  const auto est = cocvar_mcs(ctx, proj, cs, bank);
  RiskReport r;
  r.levels = ctx.levels();
  r.var_index = ctx.var_index();
  r.covar = covar_mcs(ctx, w, bank);
  r.cocvar = est.value;
  r.method = Method::Mcs;
  r.samples = bank.size();
  r.std_error = est.std_error;
  return r;
}

GaussianTail gaussian_covar_cocvar(const std::array<double, 2>& mu, const Eigen::Matrix2d& cov,
                                   const RiskLevels& levels) {
  levels.validate();
  const double sx2 = cov(0, 0);
  const double sy2 = cov(1, 1);
  const double det = sx2 * sy2 - cov(0, 1) * cov(1, 0);
  if (!(sx2 > 0.0) || !(sy2 > 0.0) || !(det > 0.0) || std::abs(cov(0, 1) - cov(1, 0)) > 1e-12 * (sx2 + sy2)) {
    throw SingularCovariance("bivariate normal covariance must be symmetric positive definite");
  }
  const double sx = std::sqrt(sx2);
  const double sy = std::sqrt(sy2);
  const double r = cov(0, 1) / (sx * sy);
  const double s = std::sqrt((1.0 - r) * (1.0 + r));
  const double target = levels.joint();
  const double a = norm_quantile(levels.zeta);  // standardized index threshold
  auto g = [&](double b) { return bvn_cdf(a, b, r) - target; };
  const double b = detail::bracketed_root(g, -40.0, 40.0, g(-40.0), g(40.0), 1e-15);
  GaussianTail out;
  out.var_x = -(mu[0] + sx * a);
  out.covar = -(mu[1] + sy * b);
  auto integrand = [&](double z) { return (mu[1] + sy * z) * norm_pdf(z) * norm_cdf((a - r * z) / s); };
  const auto q = integrate_adaptive(integrand, std::min(-40.0, b - 1.0), b, 1e-15, 1e-13, 16);
  out.cocvar = -q.value / target;
  return out;
}

}  // namespace ntscorisk
