#include "ntscorisk/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ntscorisk/errors.hpp"
#include "ntscorisk/normal.hpp"
#include "ntscorisk/parallel.hpp"

namespace ntscorisk {

namespace {

constexpr double kRhoGuard = 1.0 - 1e-8;

void check_rho(const PortfolioProjection& proj) {
  if (std::abs(proj.rho_p) > kRhoGuard) {
    std::ostringstream msg;
    msg << "portfolio-index correlation " << proj.rho_p << " too close to +-1";
    throw RhoNearUnity(msg.str());
  }
}

// The T-only integrands shared by both backends.
struct EdgeTerms {
  double density_x, slope_beta;
};

EdgeTerms edge_terms(const PortfolioProjection& proj, double v, double c, double t, double s) {
  const double st = std::sqrt(t);
  const double e = norm_pdf(c) * norm_cdf((v - proj.rho_p * c) / s);
  EdgeTerms out;
  out.density_x = e / (proj.gamma_p * st);
  out.slope_beta = e * ((1.0 - t) / (proj.gamma_p * st) + c * proj.beta_p * proj.kappa / (proj.gamma_p * proj.gamma_p));
  return out;
}

TailMoments& operator+=(TailMoments& a, const TailMoments& b) {
  a.prob += b.prob;
  a.density_x += b.density_x;
  a.slope_beta += b.slope_beta;
  a.quad_form += b.quad_form;
  a.j_beta += b.j_beta;
  a.j_rho += b.j_rho;
  a.tail_mean += b.tail_mean;
  return a;
}

MctVector finish(std::vector<double> values, Measure measure) {
  MctVector out;
  out.ranks = ascending_ranks(values);
  out.values = std::move(values);
  out.measure = measure;
  return out;
}

std::vector<double> to_portfolio(const PortfolioProjection& proj, const ProjectionGradient& grad, double risk_std,
                                 const std::vector<double>& d_std) {
  std::vector<double> out(d_std.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = grad.d_sigma[j] * risk_std + proj.sigma_p * d_std[j] - grad.d_mu[j];
  }
  return out;
}

MctPair assemble(const RiskContext& ctx, const TailRisk& risk, const ProjectionGradient& grad,
                 const TailMoments& tm) {
  const auto& lv = ctx.levels();
  MctPair out;
  out.risk = risk;
  out.covar = finish(to_portfolio(risk.proj, grad, risk.covar_std, mct_covar_std(risk.proj, grad, lv, tm)),
                     Measure::CoVaR);
  out.cocvar = finish(
      to_portfolio(risk.proj, grad, risk.cocvar_std,
                   mct_cocvar_std(risk.proj, grad, lv, tm, risk.covar_std, risk.cocvar_std)),
      Measure::CoCVaR);
  return out;
}

}  // namespace

std::string to_string(Measure m) { return m == Measure::CoVaR ? "covar" : "cocvar"; }

Measure measure_from_string(const std::string& s) {
  if (s == "covar") return Measure::CoVaR;
  if (s == "cocvar") return Measure::CoCVaR;
  throw InputError("unknown measure '" + s + "' (expected covar or cocvar)");
}

std::vector<int> ascending_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<int> ranks(values.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = static_cast<int>(r + 1);
  return ranks;
}

TailMoments tail_moments(const PortfolioProjection& proj, double xi0, double x, const SubordinatorGrid& grid) {
  check_rho(proj);
  const double rho = proj.rho_p;
  const double s = std::sqrt((1.0 - rho) * (1.0 + rho));
  const double q1 = 1.0 + rho * rho;
  const auto t = grid.t_nodes();
  const auto w = grid.weights();
  TailMoments out;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (w[k] <= 0.0) continue;
    const double st = std::sqrt(t[k]);
    const double v = v_transform(xi0, proj, t[k]);
    const double c = u_transform(x, proj, t[k]);
    const auto m = orthant_moments(v, c, rho);
    const auto e = edge_terms(proj, v, c, t[k], s);
    const double quad = rho * m(2, 0) - q1 * m(1, 1) + rho * m(0, 2);
    const double quad_ep = rho * m(2, 1) - q1 * m(1, 2) + rho * m(0, 3);
    const double shift = proj.beta_p * (t[k] - 1.0);
    TailMoments node;
    node.prob = m(0, 0);
    node.density_x = e.density_x;
    node.slope_beta = e.slope_beta;
    node.quad_form = quad;
    node.j_beta = (t[k] - 1.0) * m(0, 0) - proj.beta_p * proj.kappa * st / proj.gamma_p * m(0, 1);
    node.j_rho = (shift - x) * quad + proj.gamma_p * st * quad_ep;
    node.tail_mean = shift * m(0, 0) + proj.gamma_p * st * m(0, 1);
    node.prob *= w[k];
    node.density_x *= w[k];
    node.slope_beta *= w[k];
    node.quad_form *= w[k];
    node.j_beta *= w[k];
    node.j_rho *= w[k];
    node.tail_mean *= w[k];
    out += node;
  }
  return out;
}

TailMoments tail_moments(const PortfolioProjection& proj, double xi0, double x, const CorrelatedBank& bank) {
  check_rho(proj);
  const double rho = proj.rho_p;
  const double s = std::sqrt((1.0 - rho) * (1.0 + rho));
  const double q1 = 1.0 + rho * rho;
  const std::size_t M = bank.size();
  if (M == 0) throw InputError("tail_moments: empty bank");
  const std::size_t chunks = (M + kChunkSize - 1) / kChunkSize;
  std::vector<TailMoments> partial(chunks);
  for_each_chunk(M, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    TailMoments acc;
    for (std::size_t m = begin; m < end; ++m) {
      const double t = bank.t_draws[m];
      const double st = std::sqrt(t);
      const double v = v_transform(xi0, proj, t);
      const double c = u_transform(x, proj, t);
      const auto e = edge_terms(proj, v, c, t, s);
      acc.density_x += e.density_x;
      acc.slope_beta += e.slope_beta;
      const double e0 = bank.eps0[m];
      const double ep = bank.eps_p[m];
      if (e0 < v && ep < c) {
        const double quad = rho * e0 * e0 - q1 * e0 * ep + rho * ep * ep;
        const double xi = proj.beta_p * (t - 1.0) + ep * proj.gamma_p * st;
        acc.prob += 1.0;
        acc.quad_form += quad;
        acc.j_beta += (t - 1.0) - ep * proj.beta_p * proj.kappa * st / proj.gamma_p;
        acc.j_rho += quad * (xi - x);
        acc.tail_mean += xi;
      }
    }
    partial[chunk] = acc;
  });
  TailMoments out;
  for (const auto& p : partial) out += p;
  const double inv = 1.0 / static_cast<double>(M);
  out.prob *= inv;
  out.density_x *= inv;
  out.slope_beta *= inv;
  out.quad_form *= inv;
  out.j_beta *= inv;
  out.j_rho *= inv;
  out.tail_mean *= inv;
  out.samples = M;
  return out;
}

std::vector<double> mct_covar_std(const PortfolioProjection& proj, const ProjectionGradient& grad,
                                  const RiskLevels& levels, const TailMoments& tm) {
  check_rho(proj);
  if (!(tm.density_x >= 1e-12)) throw ZeroDenominator("dG/dx estimate below 1e-12");
  const double rho = proj.rho_p;
  const double one_m = 1.0 - rho * rho;
  // d/d rho of the joint cdf, with F at the root replaced by zeta eta.
  const double d_rho_term = rho / one_m * levels.joint() - tm.quad_form / (one_m * one_m);
  std::vector<double> out(grad.d_beta.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double dg_dw = grad.d_rho[j] * d_rho_term + grad.d_beta[j] * tm.slope_beta;
    out[j] = dg_dw / tm.density_x;
  }
  return out;
}

std::vector<double> mct_cocvar_std(const PortfolioProjection& proj, const ProjectionGradient& grad,
                                   const RiskLevels& levels, const TailMoments& tm, double covar_std_value,
                                   double cocvar_std_value) {
  check_rho(proj);
  if (tm.samples > 0 && tm.prob <= 0.0) throw EmptyTail("no bank sample falls in the joint tail");
  const double rho = proj.rho_p;
  const double one_m = 1.0 - rho * rho;
  const double zh = levels.joint();
  // With F(w) held at zeta eta, CoCVaR_std = -E[xi_p ; L(w)] / (zeta eta); the
  // moving boundary of L contributes nothing because xi_p - x vanishes there.
  const double excess = zh * (covar_std_value - cocvar_std_value);  // E[xi_p - x ; L]
  const double d_rho_term = rho / one_m * excess - tm.j_rho / (one_m * one_m);
  std::vector<double> out(grad.d_beta.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = -(grad.d_beta[j] * tm.j_beta + grad.d_rho[j] * d_rho_term) / zh;
  }
  return out;
}

MctPair mct_both(const RiskContext& ctx, std::span<const double> w) {
  const auto risk = tail_risk(ctx, w);
  const auto grad = projection_gradient(ctx.model(), w);
  const auto tm = tail_moments(risk.proj, ctx.index_threshold(), -risk.covar_std, ctx.grid());
  return assemble(ctx, risk, grad, tm);
}

MctPair mct_both(const RiskContext& ctx, std::span<const double> w, const SampleBank& bank) {
  const auto risk = tail_risk(ctx, w);
  const auto grad = projection_gradient(ctx.model(), w);
  check_rho(risk.proj);
  const auto cb = correlate(bank, risk.proj.rho_p);
  const auto tm = tail_moments(risk.proj, ctx.index_threshold(), -risk.covar_std, cb);
  return assemble(ctx, risk, grad, tm);
}

MctVector mct_portfolio(const RiskContext& ctx, std::span<const double> w, Measure measure) {
  auto both = mct_both(ctx, w);
  return measure == Measure::CoVaR ? std::move(both.covar) : std::move(both.cocvar);
}

MctVector mct_portfolio(const RiskContext& ctx, std::span<const double> w, Measure measure,
                        const SampleBank& bank) {
  auto both = mct_both(ctx, w, bank);
  return measure == Measure::CoVaR ? std::move(both.covar) : std::move(both.cocvar);
}

std::vector<double> mct_finite_difference(const RiskContext& ctx, std::span<const double> w, Measure measure,
                                          double h) {
  if (!(h >= 1e-6 && h <= 1e-3)) throw InputError("finite-difference step must lie in [1e-6, 1e-3]");
  auto risk = [&](const std::vector<double>& x) {
    const auto r = tail_risk(ctx, x);
    return measure == Measure::CoVaR ? r.covar : r.cocvar;
  };
  std::vector<double> out(w.size());
  std::vector<double> x(w.begin(), w.end());
  for (std::size_t j = 0; j < w.size(); ++j) {
    x[j] = w[j] + h;
    const double up = risk(x);
    x[j] = w[j] - h;
    const double dn = risk(x);
    x[j] = w[j];
    out[j] = (up - dn) / (2.0 * h);
  }
  return out;
}

}  // namespace ntscorisk
