#pragma once

#include <array>
#include <cmath>

namespace ntscorisk {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.707106781186547524400844362105); }

double norm_quantile(double p);

// P(X < a, Y < b) for standard normals with correlation rho (Genz's BVNU port).
double bvn_cdf(double a, double b, double rho);

// Standard bivariate normal density.
double bvn_pdf(double x, double y, double rho);

// m[k][l] = E[X^k Y^l ; X < a, Y < b] for k + l <= 3, (X, Y) standard bivariate
// normal with correlation rho. Entries with k + l > 3 are left at zero.
struct OrthantMoments {
  std::array<std::array<double, 4>, 4> m{};
  double operator()(int k, int l) const { return m[k][l]; }
};

OrthantMoments orthant_moments(double a, double b, double rho);

}  // namespace ntscorisk
