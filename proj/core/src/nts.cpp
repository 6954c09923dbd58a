#include "ntscorisk/nts.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <utility>

#include "ntscorisk/errors.hpp"
#include "ntscorisk/parallel.hpp"
#include "ntscorisk/quadrature.hpp"

namespace ntscorisk {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

// (theta (1 + w))^a - theta^a without cancellation for small |w|.
cplx power_increment(double theta, cplx w, double a) {
  const double re = w.real();
  const double im = w.imag();
  const cplx log1p_w(0.5 * std::log1p(2.0 * re + re * re + im * im), std::atan2(im, 1.0 + re));
  const cplx e = a * log1p_w;
  const double c = std::cos(e.imag());
  const double em1 = std::expm1(e.real()) * c - 2.0 * std::pow(std::sin(0.5 * e.imag()), 2);
  const double ei = std::exp(e.real()) * std::sin(e.imag());
  return std::pow(theta, a) * cplx(em1, ei);
}

double tempering_scale(const SubordinatorParams& p) {
  // 2 theta^(1 - alpha/2) / alpha
  return 2.0 * std::pow(p.theta, 1.0 - 0.5 * p.alpha) / p.alpha;
}

// Log of the marginal characteristic function.
cplx marginal_log_charfn(double u, const SubordinatorParams& p, double beta, double gamma) {
  const cplx w(0.5 * u * u * gamma * gamma / p.theta, -beta * u / p.theta);
  return cplx(0.0, -beta * u) - tempering_scale(p) * power_increment(p.theta, w, 0.5 * p.alpha);
}

cplx subordinator_log_charfn(double u, const SubordinatorParams& p) {
  return -tempering_scale(p) * power_increment(p.theta, cplx(0.0, -u / p.theta), 0.5 * p.alpha);
}

// Smallest u beyond which log|phi(u)| stays below `log_level`; phi decays monotonically.
template <class LogAbs>
double truncation_point(LogAbs&& log_abs, double log_level, double u_cap) {
  double hi = 1.0;
  while (log_abs(hi) > log_level) {
    hi *= 2.0;
    if (hi > u_cap) {
      std::ostringstream msg;
      msg << "characteristic function does not decay below " << std::exp(log_level) << " before u = " << u_cap;
      throw InversionNotConverged(msg.str());
    }
  }
  double lo = hi < 2.0 ? 0.0 : 0.5 * hi;
  for (int i = 0; i < 60 && hi - lo > 1e-6 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (log_abs(mid) > log_level ? lo : hi) = mid;
  }
  return hi;
}

double marginal_truncation(const SubordinatorParams& p, double beta, double gamma) {
  return truncation_point([&](double u) { return marginal_log_charfn(u, p, beta, gamma).real(); },
                          std::log(1e-13), 1e6);
}

// Chernoff exponent for T: log P(T >= t) (t > 1) and log P(T <= t) (t < 1)
// are both bounded by theta (1/a - t - (1 - a)/a t^(-a/(1-a))) with a = alpha/2.
double chernoff_log_bound(const SubordinatorParams& p, double t) {
  const double a = 0.5 * p.alpha;
  const double q = std::exp(-a / (1.0 - a) * std::log(t));
  return p.theta * (1.0 / a - t - (1.0 - a) / a * q);
}

double chernoff_upper(const SubordinatorParams& p, double log_mass) {
  double lo = 1.0;
  double hi = 2.0;
  while (chernoff_log_bound(p, hi) > log_mass) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chernoff_log_bound(p, mid) > log_mass ? lo : hi) = mid;
  }
  return hi;
}

double chernoff_lower(const SubordinatorParams& p, double log_mass) {
  double lo = 0.5;
  double hi = 1.0;
  while (chernoff_log_bound(p, lo) > log_mass) {
    hi = lo;
    lo *= 0.5;
    if (lo < 1e-300) return lo;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = std::sqrt(lo * hi);
    (chernoff_log_bound(p, mid) > log_mass ? hi : lo) = mid;
  }
  return lo;
}

// The uniform Fourier sum costs (frequency nodes) x (t nodes). Above the cheap
// limit the Laplace inversion is tried first; above the hard limit it is the only route.
constexpr double kCheapFourierNodes = 2e5;
constexpr double kMaxFourierNodes = 2e7;

// Trapezoid sum of (1/pi) Re(e^{-iut} phi_T(u)) over [0, upper] with step h.
std::vector<double> fourier_pdf(const SubordinatorParams& p, const std::vector<double>& t_nodes, double h,
                                std::size_t n_u, double upper) {
  // Self-consistency: the mass of |phi| on [U, 2U] bounds the pdf change from doubling U.
  {
    const int m = 2000;
    double tail = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double u = upper * (1.0 + static_cast<double>(i) / m);
      tail += (i == 0 || i == m ? 0.5 : 1.0) * std::exp(subordinator_log_charfn(u, p).real());
    }
    tail *= upper / m / kPi;
    if (tail > 1e-8) throw InversionNotConverged("subordinator Fourier truncation failed its doubling check");
  }
  std::vector<cplx> phi(n_u + 1);
  for (std::size_t m = 0; m <= n_u; ++m) phi[m] = std::exp(subordinator_log_charfn(h * static_cast<double>(m), p));

  const std::size_t n_t = t_nodes.size();
  std::vector<double> pdf(n_t);
  constexpr std::size_t kResync = 128;
  parallel_for((n_t + 15) / 16, [&](std::size_t block) {
    for (std::size_t k = block * 16; k < std::min(n_t, block * 16 + 16); ++k) {
      const double t = t_nodes[k];
      const cplx rot = std::polar(1.0, -h * t);
      double sum = 0.5 * phi[0].real();
      for (std::size_t m0 = 1; m0 <= n_u; m0 += kResync) {
        cplx z = std::polar(1.0, -h * t * static_cast<double>(m0));
        const std::size_t m1 = std::min(n_u + 1, m0 + kResync);
        for (std::size_t m = m0; m < m1; ++m) {
          sum += z.real() * phi[m].real() - z.imag() * phi[m].imag();
          z *= rot;
        }
      }
      pdf[k] = h / kPi * sum;
    }
  });
  return pdf;
}

// Fixed-Talbot inversion of E[e^{-sT}] = exp(-c ((theta + s)^a - theta^a)),
// whose only singularity is the branch cut (-inf, -theta].
double talbot_point(const SubordinatorParams& p, double t, int terms) {
  const double a = 0.5 * p.alpha;
  const double c = tempering_scale(p);
  auto log_laplace = [&](cplx s) { return -c * power_increment(p.theta, s / p.theta, a); };
  const double r = 2.0 * terms / (5.0 * t);
  double sum = 0.5 * std::exp(r * t + log_laplace(cplx(r, 0.0)).real());
  for (int k = 1; k < terms; ++k) {
    const double q = k * kPi / terms;
    const double cot = std::cos(q) / std::sin(q);
    const cplx s(r * q * cot, r * q);
    const double sigma = q + (q * cot - 1.0) * cot;
    sum += (std::exp(t * s + log_laplace(s)) * cplx(1.0, sigma)).real();
  }
  return r / terms * sum;
}

std::vector<double> talbot_pdf(const SubordinatorParams& p, const std::vector<double>& t_nodes) {
  std::vector<double> pdf(t_nodes.size());
  std::vector<double> check(t_nodes.size());
  parallel_for(t_nodes.size(), [&](std::size_t k) {
    pdf[k] = talbot_point(p, t_nodes[k], 24);
    check[k] = talbot_point(p, t_nodes[k], 28);
  });
  for (std::size_t k = 0; k < t_nodes.size(); ++k) {
    if (!(std::abs(pdf[k] - check[k]) * t_nodes[k] < 1e-8)) {
      throw InversionNotConverged("subordinator Laplace inversion failed its self-consistency check");
    }
  }
  return pdf;
}

}  // namespace

void SubordinatorParams::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0) || !(theta > 0.0) || !std::isfinite(theta)) {
    std::ostringstream msg;
    msg << "subordinator parameters out of domain: alpha=" << alpha << " theta=" << theta;
    throw InputError(msg.str());
  }
}

double SubordinatorParams::beta_bound() const { return std::sqrt(2.0 * theta / (2.0 - alpha)); }

void StdNtsParams::validate() const {
  sub.validate();
  const auto n = static_cast<Eigen::Index>(beta.size());
  if (n == 0) throw InputError("standard NTS vector has zero dimension");
  for (double b : beta) gamma_from_beta(sub, b);
  if (corr.rows() != n || corr.cols() != n) throw InputError("correlation matrix dimension mismatch");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(corr(i, i) - 1.0) > 1e-10) throw InputError("correlation matrix must have unit diagonal");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(corr(i, j) - corr(j, i)) > 1e-10) throw InputError("correlation matrix must be symmetric");
      if (std::abs(corr(i, j)) > 1.0 + 1e-12) throw InputError("correlation entries must lie in [-1, 1]");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10) throw InputError("correlation matrix is not positive semidefinite");
}

double gamma_from_beta(const SubordinatorParams& p, double beta) {
  const double g2 = 1.0 - beta * beta * p.variance();
  if (!(std::abs(beta) < p.beta_bound()) || !(g2 > 0.0)) {
    std::ostringstream msg;
    msg << "beta=" << beta << " outside (-" << p.beta_bound() << ", " << p.beta_bound() << ")";
    throw BetaOutOfDomain(msg.str());
  }
  return std::sqrt(g2);
}

std::vector<double> gamma_vector(const StdNtsParams& p) {
  std::vector<double> g(p.beta.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = gamma_from_beta(p.sub, p.beta[i]);
  return g;
}

std::complex<double> subordinator_charfn(double u, const SubordinatorParams& p) {
  return std::exp(subordinator_log_charfn(u, p));
}

std::complex<double> stdnts_marginal_charfn(double u, const SubordinatorParams& p, double beta) {
  return std::exp(marginal_log_charfn(u, p, beta, gamma_from_beta(p, beta)));
}

double stdnts_marginal_cdf(double x, const SubordinatorParams& p, double beta) {
  p.validate();
  const double gamma = gamma_from_beta(p, beta);
  const double upper = marginal_truncation(p, beta, gamma);
  auto integrand = [&](double u) {
    if (u <= 0.0) return -x;  // limit at the origin, since E[Xi] = 0
    const cplx z = std::exp(marginal_log_charfn(u, p, beta, gamma) - cplx(0.0, u * x));
    return z.imag() / u;
  };
  const int panels = static_cast<int>(std::clamp(std::ceil(upper * std::max(std::abs(x), 1.0) / kPi), 4.0, 4000.0));
  const auto r = integrate_adaptive(integrand, 0.0, upper, 1e-11 * kPi, 0.0, panels, 200000);
  if (!r.converged) throw InversionNotConverged("Gil-Pelaez cdf integral did not converge");
  return std::clamp(0.5 - r.value / kPi, 0.0, 1.0);
}

double stdnts_marginal_pdf(double x, const SubordinatorParams& p, double beta) {
  p.validate();
  const double gamma = gamma_from_beta(p, beta);
  const double upper = marginal_truncation(p, beta, gamma);
  auto integrand = [&](double u) {
    return std::exp(marginal_log_charfn(u, p, beta, gamma) - cplx(0.0, u * x)).real();
  };
  const int panels = static_cast<int>(std::clamp(std::ceil(upper * std::max(std::abs(x), 1.0) / kPi), 4.0, 4000.0));
  const auto r = integrate_adaptive(integrand, 0.0, upper, 1e-11 * kPi, 0.0, panels, 200000);
  if (!r.converged) throw InversionNotConverged("Fourier pdf integral did not converge");
  const double f = r.value / kPi;
  if (f < -1e-10) throw InversionNotConverged("Fourier pdf inversion produced a negative density");
  return std::max(f, 0.0);
}

MarginalValues stdnts_marginal_uniform(double x0, double dx, std::size_t n, const SubordinatorParams& p,
                                       double beta) {
  p.validate();
  const double gamma = gamma_from_beta(p, beta);
  const double upper = marginal_truncation(p, beta, gamma);
  const double xmax = std::max({std::abs(x0), std::abs(x0 + dx * (n == 0 ? 0.0 : n - 1.0)), 1.0});
  // Panels resolve one oscillation of e^{-iux} each; near the origin they are
  // graded to resolve the branch points of phi at |u| ~ sqrt(2 theta) / gamma.
  const double base = std::min(2.0, 2.0 * kPi / xmax);
  double width = std::min(base, 0.25 * std::min(1.0, std::sqrt(2.0 * p.theta) / gamma));
  static const GaussRule rule = gauss_legendre(16);
  std::vector<double> nodes;
  std::vector<double> wts;
  for (double a = 0.0; a < upper;) {
    const double b = std::min(upper, a + width);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      nodes.push_back(0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[i]);
      wts.push_back(0.5 * (b - a) * rule.weights[i]);
    }
    a = b;
    width = std::min(base, width * 1.5);
  }
  MarginalValues out;
  out.cdf.assign(n, 0.0);
  out.pdf.assign(n, 0.0);
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double u = nodes[j];
    const cplx phi = std::exp(marginal_log_charfn(u, p, beta, gamma));
    const cplx step = std::polar(1.0, -u * dx);
    cplx z;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) {
        z = std::polar(1.0, -u * (x0 + dx * static_cast<double>(i)));
      } else {
        z *= step;
      }
      const cplx v = z * phi;
      out.cdf[i] += wts[j] * v.imag() / u;
      out.pdf[i] += wts[j] * v.real();
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.cdf[i] = std::clamp(0.5 - out.cdf[i] / kPi, 0.0, 1.0);
    out.pdf[i] = std::max(0.0, out.pdf[i] / kPi);
  }
  return out;
}

MarginalTable::MarginalTable(const SubordinatorParams& p, double beta, double lo, double hi, double step)
    : lo_(lo), hi_(hi) {
  if (!(hi > lo) || !(step > 0.0)) throw InputError("MarginalTable: empty range");
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
  step_ = (hi - lo) / static_cast<double>(n - 1);
  values_ = stdnts_marginal_uniform(lo, step_, n, p, beta);
}

double MarginalTable::cdf(double x) const {
  if (x <= lo_) return values_.cdf.front();
  if (x >= hi_) return values_.cdf.back();
  const double s = (x - lo_) / step_;
  const auto k = std::min(static_cast<std::size_t>(s), values_.cdf.size() - 2);
  const double tau = s - static_cast<double>(k);
  const double t2 = tau * tau;
  const double t3 = t2 * tau;
  const double v = (2 * t3 - 3 * t2 + 1) * values_.cdf[k] + (t3 - 2 * t2 + tau) * step_ * values_.pdf[k] +
                   (-2 * t3 + 3 * t2) * values_.cdf[k + 1] + (t3 - t2) * step_ * values_.pdf[k + 1];
  return std::clamp(v, 0.0, 1.0);
}

double cov_xi(const SubordinatorParams& p, double beta_n, double beta_m, double rho_nm) {
  if (std::abs(rho_nm) > 1.0) throw RhoOutOfDomain("cov_xi: |rho| > 1");
  return gamma_from_beta(p, beta_n) * gamma_from_beta(p, beta_m) * rho_nm + beta_n * beta_m * p.variance();
}

double SubordinatorGrid::mean() const {
  double s = 0.0;
  for (std::size_t k = 0; k < t_.size(); ++k) s += weights_[k] * t_[k];
  return s;
}

double SubordinatorGrid::variance() const {
  const double m = mean();
  double s = 0.0;
  for (std::size_t k = 0; k < t_.size(); ++k) s += weights_[k] * (t_[k] - m) * (t_[k] - m);
  return s;
}

void SubordinatorGrid::build_interpolant() {
  const std::size_t n = t_.size();
  slope_lo_.assign(n - 1, 0.0);
  slope_hi_.assign(n - 1, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double d = (cdf_[k + 1] - cdf_[k]) / (t_[k + 1] - t_[k]);
    if (!(d > 0.0)) continue;
    double m0 = pdf_[k];
    double m1 = pdf_[k + 1];
    const double a = m0 / d;
    const double b = m1 / d;
    if (a * a + b * b > 9.0) {
      const double tau = 3.0 / std::sqrt(a * a + b * b);
      m0 = tau * a * d;
      m1 = tau * b * d;
    }
    slope_lo_[k] = m0;
    slope_hi_[k] = m1;
  }
}

double SubordinatorGrid::cdf(double t) const {
  if (t <= t_.front()) return 0.0;
  if (t >= t_.back()) return 1.0;
  const auto k = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), t) - t_.begin()) - 1;
  const double h = t_[k + 1] - t_[k];
  const double tau = (t - t_[k]) / h;
  const double t2 = tau * tau;
  const double t3 = t2 * tau;
  return (2 * t3 - 3 * t2 + 1) * cdf_[k] + (t3 - 2 * t2 + tau) * h * slope_lo_[k] + (-2 * t3 + 3 * t2) * cdf_[k + 1] +
         (t3 - t2) * h * slope_hi_[k];
}

double SubordinatorGrid::quantile(double u) const {
  if (u <= 0.0) return t_.front();
  if (u >= 1.0) return t_.back();
  auto k = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  k = std::clamp<std::size_t>(k, 1, t_.size() - 1) - 1;
  const double h = t_[k + 1] - t_[k];
  const double f0 = cdf_[k];
  const double f1 = cdf_[k + 1];
  const double m0 = h * slope_lo_[k];
  const double m1 = h * slope_hi_[k];
  auto value = [&](double tau) {
    const double t2 = tau * tau;
    const double t3 = t2 * tau;
    return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + tau) * m0 + (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * m1;
  };
  auto slope = [&](double tau) {
    const double t2 = tau * tau;
    return (6 * t2 - 6 * tau) * f0 + (3 * t2 - 4 * tau + 1) * m0 + (-6 * t2 + 6 * tau) * f1 + (3 * t2 - 2 * tau) * m1;
  };
  double lo = 0.0;
  double hi = 1.0;
  double tau = f1 > f0 ? std::clamp((u - f0) / (f1 - f0), 0.0, 1.0) : 0.5;
  for (int iter = 0; iter < 60; ++iter) {
    const double r = value(tau) - u;
    if (r > 0.0) {
      hi = tau;
    } else {
      lo = tau;
    }
    if (std::abs(r) < 1e-15 || hi - lo < 1e-15) break;
    const double d = slope(tau);
    double next = d > 0.0 ? tau - r / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    tau = next;
  }
  return t_[k] + tau * h;
}

SubordinatorGrid subordinator_pdf_grid(const SubordinatorParams& p, double tail_mass) {
  p.validate();
  if (!(tail_mass > 0.0 && tail_mass < 1e-6)) throw InputError("subordinator_pdf_grid: tail mass must be in (0, 1e-6)");
  const double log_side = std::log(0.5 * tail_mass);
  const double t_lo = chernoff_lower(p, log_side);
  const double t_hi = chernoff_upper(p, log_side);
  // Period of the trapezoid sum: aliased copies f(t + kP) must be negligible.
  const double period = std::max(chernoff_upper(p, std::log(1e-16)), 1.05 * t_hi);
  const double s_lo = std::log(t_lo);
  const double s_hi = std::log(t_hi);
  auto n_t = static_cast<std::size_t>(std::ceil((s_hi - s_lo) / 0.01)) + 1;
  n_t = std::max<std::size_t>(n_t, 401);
  if (n_t % 2 == 0) ++n_t;
  const double ds = (s_hi - s_lo) / static_cast<double>(n_t - 1);

  SubordinatorGrid g;
  g.params_ = p;
  g.mass_tolerance_ = tail_mass;
  g.t_.resize(n_t);
  for (std::size_t k = 0; k < n_t; ++k) g.t_[k] = std::exp(s_lo + ds * static_cast<double>(k));

  const double h = 2.0 * kPi / period;
  // Slowly decaying phi_T (small alpha or theta) makes the Fourier sum long;
  // the Laplace route is tried first there and Fourier stays the fallback.
  double upper = 0.0;
  try {
    upper = truncation_point([&](double u) { return subordinator_log_charfn(u, p).real(); }, std::log(1e-12),
                             h * kMaxFourierNodes);
  } catch (const InversionNotConverged&) {
    upper = std::numeric_limits<double>::infinity();
  }
  const double n_u = std::ceil(upper / h);
  g.laplace_ = n_u > kCheapFourierNodes;
  if (g.laplace_) {
    try {
      g.pdf_ = talbot_pdf(p, g.t_);
    } catch (const InversionNotConverged&) {
      if (n_u > kMaxFourierNodes) throw;
      g.laplace_ = false;
    }
  }
  if (!g.laplace_) g.pdf_ = fourier_pdf(p, g.t_, h, static_cast<std::size_t>(n_u), upper);

  for (double& f : g.pdf_) {
    if (f < -1e-8) throw InversionNotConverged("subordinator pdf inversion produced negative density beyond 1e-8");
    f = std::max(f, 0.0);
  }

  // Integrate in s = log t where the integrand is g(s) = t f(t).
  std::vector<double> gs(n_t);
  for (std::size_t k = 0; k < n_t; ++k) gs[k] = g.t_[k] * g.pdf_[k];
  double mass = 0.0;
  for (std::size_t k = 0; k < n_t; ++k) {
    const double c = (k == 0 || k + 1 == n_t) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    mass += c * gs[k];
  }
  mass *= ds / 3.0;
  g.raw_mass_ = mass;
  if (std::abs(mass - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "subordinator pdf integrates to " << mass << " (tolerance 1e-6)";
    throw InversionNotConverged(msg.str());
  }

  g.cdf_.assign(n_t, 0.0);
  for (std::size_t k = 0; k + 1 < n_t; ++k) {
    double inc;
    if (k == 0) {
      inc = 9 * gs[0] + 19 * gs[1] - 5 * gs[2] + gs[3];
    } else if (k + 2 == n_t) {
      inc = gs[k - 2] - 5 * gs[k - 1] + 19 * gs[k] + 9 * gs[k + 1];
    } else {
      inc = -gs[k - 1] + 13 * gs[k] + 13 * gs[k + 1] - gs[k + 2];
    }
    g.cdf_[k + 1] = g.cdf_[k] + std::max(0.0, inc * ds / 24.0);
  }
  const double cdf_end = g.cdf_.back();
  for (double& c : g.cdf_) c /= cdf_end;
  for (double& f : g.pdf_) f /= mass;

  g.weights_.resize(n_t);
  for (std::size_t k = 0; k < n_t; ++k) {
    const double c = (k == 0 || k + 1 == n_t) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    g.weights_[k] = c * ds / 3.0 * g.t_[k] * g.pdf_[k];
  }
  g.build_interpolant();
  return g;
}

std::shared_ptr<const SubordinatorGrid> shared_subordinator_grid(const SubordinatorParams& p) {
  static std::mutex mutex;
  static std::map<std::pair<std::uint64_t, std::uint64_t>, std::shared_ptr<const SubordinatorGrid>> cache;
  const auto key = std::make_pair(std::bit_cast<std::uint64_t>(p.alpha), std::bit_cast<std::uint64_t>(p.theta));
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto grid = std::make_shared<const SubordinatorGrid>(subordinator_pdf_grid(p));
  cache.emplace(key, grid);
  return grid;
}

}  // namespace ntscorisk
