#include "ntscorisk/normal.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ntscorisk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Gauss-Legendre half rules (6, 12 and 20 points) used by the Drezner-Wesolowsky
// style integration in Genz's BVNU.
constexpr double kW[3][10] = {
    {0.1713244923791705, 0.3607615730481384, 0.4679139345726904},
    {0.04717533638651177, 0.1069393259953183, 0.1600783285433464, 0.2031674267230659,
     0.2334925365383547, 0.2491470458134029},
    {0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475,
     0.1019301198172404, 0.1181945319615184, 0.1316886384491766, 0.1420961093183821,
     0.1491729864726037, 0.1527533871307259}};
constexpr double kX[3][10] = {
    {-0.9324695142031522, -0.6612093864662647, -0.2386191860831970},
    {-0.9815606342467191, -0.9041172563704750, -0.7699026741943050, -0.5873179542866171,
     -0.3678314989981802, -0.1252334085114692},
    {-0.9931285991850949, -0.9639719272779138, -0.9122344282513259, -0.8391169718222188,
     -0.7463319064601508, -0.6360536807265150, -0.5108670019508271, -0.3737060887154196,
     -0.2277858511416451, -0.07652652113349733}};

// P(X > dh, Y > dk).
double bvnu(double dh, double dk, double r) {
  int ng = 0;
  int lg = 3;
  if (std::abs(r) >= 0.3) {
    if (std::abs(r) < 0.75) {
      ng = 1;
      lg = 6;
    } else {
      ng = 2;
      lg = 10;
    }
  }
  double h = dh;
  double k = dk;
  double hk = h * k;
  double bvn = 0.0;
  if (std::abs(r) < 0.925) {
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(r);
    for (int i = 0; i < lg; ++i) {
      double sn = std::sin(asr * (kX[ng][i] + 1.0) / 2.0);
      bvn += kW[ng][i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      sn = std::sin(asr * (-kX[ng][i] + 1.0) / 2.0);
      bvn += kW[ng][i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    return bvn * asr / (2.0 * kTwoPi) + norm_cdf(-h) * norm_cdf(-k);
  }
  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::abs(r) < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    bvn = a * std::exp(-(bs / as + hk) / 2.0) *
          (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (-hk < 100.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(kTwoPi) * norm_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (int i = 0; i < lg; ++i) {
      for (int is = -1; is <= 1; is += 2) {
        const double xs = std::pow(a * (is * kX[ng][i] + 1.0), 2);
        const double rs = std::sqrt(1.0 - xs);
        const double asr = -(bs / xs + hk) / 2.0;
        if (asr > -100.0) {
          bvn += a * kW[ng][i] * std::exp(asr) *
                 (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs - (1.0 + c * xs * (1.0 + d * xs)));
        }
      }
    }
    bvn = -bvn / kTwoPi;
  }
  if (r > 0.0) return bvn + norm_cdf(-std::max(h, k));
  bvn = -bvn;
  if (k > h) {
    if (h < 0.0) {
      bvn += norm_cdf(k) - norm_cdf(h);
    } else {
      bvn += norm_cdf(-h) - norm_cdf(-k);
    }
  }
  return bvn;
}

// E[Y^l ; Y < c] for Y ~ N(m, s^2), l = 0..3.
std::array<double, 4> truncated_moments(double c, double m, double s) {
  std::array<double, 4> t{};
  if (s <= 0.0) {
    const double ind = m < c ? 1.0 : 0.0;
    t = {ind, ind * m, ind * m * m, ind * m * m * m};
    return t;
  }
  const double z = (c - m) / s;
  const double pz = norm_pdf(z);
  const double sp = s * pz;  // zero once z is far in either tail
  t[0] = norm_cdf(z);
  t[1] = m * t[0] - sp;
  t[2] = m * t[1] + s * s * t[0] - (sp == 0.0 ? 0.0 : sp * c);
  t[3] = m * t[2] + 2.0 * s * s * t[1] - (sp == 0.0 ? 0.0 : sp * c * c);
  return t;
}

}  // namespace

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_quantile: p must lie in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double bvn_cdf(double a, double b, double rho) {
  if (std::isnan(a) || std::isnan(b) || std::isnan(rho)) return std::numeric_limits<double>::quiet_NaN();
  rho = std::clamp(rho, -1.0, 1.0);
  // Clamp infinite limits; the integrand is zero to double precision past 40.
  a = std::clamp(a, -40.0, 40.0);
  b = std::clamp(b, -40.0, 40.0);
  return std::clamp(bvnu(-a, -b, rho), 0.0, 1.0);
}

double bvn_pdf(double x, double y, double rho) {
  const double s2 = 1.0 - rho * rho;
  return std::exp(-(x * x - 2.0 * rho * x * y + y * y) / (2.0 * s2)) / (kTwoPi * std::sqrt(s2));
}

// Stein recursion: E[X h] = E[dh/dx] + rho E[dh/dy], applied to the
// indicator-truncated monomials; boundary terms are univariate truncated
// moments of the conditional normal on each edge of the orthant.
OrthantMoments orthant_moments(double a, double b, double rho) {
  a = std::clamp(a, -40.0, 40.0);
  b = std::clamp(b, -40.0, 40.0);
  const double s = std::sqrt(std::max(0.0, (1.0 - rho) * (1.0 + rho)));
  const double pa = norm_pdf(a);
  const double pb = norm_pdf(b);
  // Edge X = a: Y | X = a ~ N(rho a, s^2) truncated at b; likewise for Y = b.
  const auto ty = truncated_moments(b, rho * a, s);
  const auto tx = truncated_moments(a, rho * b, s);
  auto apow = [](double x, int n) { return n == 0 ? 1.0 : (n == 1 ? x : (n == 2 ? x * x : x * x * x)); };

  OrthantMoments out;
  auto& m = out.m;
  m[0][0] = bvn_cdf(a, b, rho);
  // Order by total degree so every referenced entry is already filled.
  for (int deg = 1; deg <= 3; ++deg) {
    for (int k = deg; k >= 0; --k) {
      const int l = deg - k;
      double v = 0.0;
      if (k >= 1) {
        if (k >= 2) v += (k - 1) * m[k - 2][l];
        if (l >= 1) v += rho * l * m[k - 1][l - 1];
        if (pa != 0.0) v -= apow(a, k - 1) * pa * ty[l];
        if (pb != 0.0) v -= rho * apow(b, l) * pb * tx[k - 1];
      } else {
        if (l >= 2) v += (l - 1) * m[0][l - 2];
        if (pb != 0.0) v -= apow(b, l - 1) * pb * tx[0];
        if (pa != 0.0) v -= rho * pa * ty[l - 1];
      }
      m[k][l] = v;
    }
  }
  return out;
}

}  // namespace ntscorisk
