#include "ntscorisk/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ntscorisk/errors.hpp"
#include "ntscorisk/parallel.hpp"

namespace ntscorisk {

namespace {

// Uniform on the open interval (0, 1) from the top 53 bits.
double open_uniform(std::mt19937_64& eng) {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(i);
  return v[i] + frac * (v[i + 1] - v[i]);
}

}  // namespace

SampleBank make_bank(const SubordinatorGrid& grid, std::size_t M, std::uint64_t seed) {
  if (M == 0) throw InputError("make_bank: M must be positive");
  SampleBank bank;
  bank.seed = seed;
  bank.eps0.resize(M);
  bank.eps1.resize(M);
  bank.t_draws.resize(M);
  for_each_chunk(M, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    std::mt19937_64 eng(hash64(seed, chunk));
    std::normal_distribution<double> normal;
    for (std::size_t i = begin; i < end; ++i) {
      bank.eps0[i] = normal(eng);
      bank.eps1[i] = normal(eng);
      bank.t_draws[i] = grid.quantile(open_uniform(eng));
    }
  });
  return bank;
}

SampleBank make_bank(const SubordinatorParams& p, std::size_t M, std::uint64_t seed) {
  return make_bank(*shared_subordinator_grid(p), M, seed);
}

CorrelatedBank correlate(const SampleBank& bank, double rho) {
  if (!(std::abs(rho) < 1.0)) throw RhoOutOfDomain("correlate: |rho| must be below 1");
  CorrelatedBank out;
  out.eps0 = bank.eps0;
  out.t_draws = bank.t_draws;
  out.rho = rho;
  out.eps_p.resize(bank.size());
  const double s = std::sqrt((1.0 - rho) * (1.0 + rho));
  for (std::size_t i = 0; i < bank.size(); ++i) out.eps_p[i] = rho * bank.eps0[i] + s * bank.eps1[i];
  return out;
}

BootstrapSummary summarize(std::vector<double> values) {
  if (values.size() < 2) throw InputError("summarize: need at least two values");
  BootstrapSummary s;
  s.values = values;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / (n - 1.0));
  std::sort(values.begin(), values.end());
  s.q25 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q75 = quantile_sorted(values, 0.75);
  return s;
}

BootstrapSummary bootstrap_estimate(const std::function<double(const SampleBank&)>& estimator,
                                    const SubordinatorParams& p, std::size_t M, std::size_t reps,
                                    std::uint64_t seed) {
  if (reps < 2) throw InputError("bootstrap_estimate: reps must be at least 2");
  const auto grid = shared_subordinator_grid(p);
  std::vector<double> values(reps);
  for (std::size_t k = 0; k < reps; ++k) values[k] = estimator(make_bank(*grid, M, hash64(seed, k)));
  return summarize(std::move(values));
}

Eigen::MatrixXd simulate_std_nts(const StdNtsParams& p, std::size_t n, std::uint64_t seed) {
  p.validate();
  const auto d = static_cast<Eigen::Index>(p.dim());
  // Symmetric square root tolerates semidefinite correlation matrices.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p.corr);
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd factor = eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
  const auto gamma = gamma_vector(p);
  const auto grid = shared_subordinator_grid(p.sub);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), d);
  for_each_chunk(n, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    std::mt19937_64 eng(hash64(seed, chunk));
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(d);
    for (std::size_t i = begin; i < end; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) z(j) = normal(eng);
      const double t = grid->quantile(open_uniform(eng));
      const Eigen::VectorXd e = factor * z;
      const double st = std::sqrt(t);
      for (Eigen::Index j = 0; j < d; ++j) {
        out(static_cast<Eigen::Index>(i), j) = p.beta[j] * (t - 1.0) + gamma[j] * e(j) * st;
      }
    }
  });
  return out;
}

}  // namespace ntscorisk
