#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace ntscorisk {

// Tempered stable subordinator T with E[T] = 1 and var(T) = (2 - alpha) / (2 theta).
struct SubordinatorParams {
  double alpha = 1.0;
  double theta = 1.0;

  void validate() const;
  double variance() const { return (2.0 - alpha) / (2.0 * theta); }
  // Open bound on |beta| that keeps gamma real.
  double beta_bound() const;
};

// Standard NTS vector: zero mean, unit variances, correlation of the Gaussian layer.
struct StdNtsParams {
  SubordinatorParams sub;
  std::vector<double> beta;
  Eigen::MatrixXd corr;

  std::size_t dim() const { return beta.size(); }
  void validate() const;
};

double gamma_from_beta(const SubordinatorParams& p, double beta);
std::vector<double> gamma_vector(const StdNtsParams& p);

std::complex<double> subordinator_charfn(double u, const SubordinatorParams& p);
std::complex<double> stdnts_marginal_charfn(double u, const SubordinatorParams& p, double beta);

// Gil-Pelaez inversion with adaptive Gauss-Kronrod, absolute tolerance 1e-10.
double stdnts_marginal_cdf(double x, const SubordinatorParams& p, double beta);
double stdnts_marginal_pdf(double x, const SubordinatorParams& p, double beta);

// Cdf (and optionally pdf) on the uniform grid x0 + i dx, i < n, sharing
// characteristic-function evaluations across points.
struct MarginalValues {
  std::vector<double> cdf;
  std::vector<double> pdf;
};
MarginalValues stdnts_marginal_uniform(double x0, double dx, std::size_t n, const SubordinatorParams& p,
                                       double beta);

// Tabulated marginal with cubic Hermite interpolation; cheap repeated lookups.
class MarginalTable {
 public:
  MarginalTable(const SubordinatorParams& p, double beta, double lo, double hi, double step = 0.01);
  double cdf(double x) const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_, hi_, step_;
  MarginalValues values_;
};

double cov_xi(const SubordinatorParams& p, double beta_n, double beta_m, double rho_nm);

// Tabulated density of T on log-spaced nodes, with quadrature weights and a
// monotone interpolated cdf for inverse-transform sampling.
class SubordinatorGrid {
 public:
  SubordinatorGrid() = default;

  const SubordinatorParams& params() const { return params_; }
  std::span<const double> t_nodes() const { return t_; }
  std::span<const double> pdf_values() const { return pdf_; }
  std::span<const double> cdf_values() const { return cdf_; }
  // Expectation weights: E[g(T)] ~ sum_k weights[k] g(t_k).
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return t_.size(); }
  double mass_tolerance() const { return mass_tolerance_; }
  double raw_mass() const { return raw_mass_; }
  // True when the density came from Laplace (Talbot) rather than Fourier inversion.
  bool laplace_inversion() const { return laplace_; }

  double mean() const;
  double variance() const;
  double cdf(double t) const;
  double quantile(double u) const;

 private:
  friend SubordinatorGrid subordinator_pdf_grid(const SubordinatorParams&, double);
  void build_interpolant();

  SubordinatorParams params_;
  std::vector<double> t_, pdf_, cdf_, weights_;
  std::vector<double> slope_lo_, slope_hi_;  // limited Hermite slopes per interval
  double mass_tolerance_ = 0.0;
  double raw_mass_ = 0.0;
  bool laplace_ = false;
};

// Fourier inversion of the subordinator characteristic function. `tail_mass`
// bounds (via Chernoff) the probability left outside [t_lo, t_hi].
SubordinatorGrid subordinator_pdf_grid(const SubordinatorParams& p, double tail_mass = 2e-10);

// Memoized grid per (alpha, theta); thread-safe.
std::shared_ptr<const SubordinatorGrid> shared_subordinator_grid(const SubordinatorParams& p);

}  // namespace ntscorisk
