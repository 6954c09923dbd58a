#pragma once

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <utility>

#include "ntscorisk/errors.hpp"

namespace ntscorisk::detail {

// Root of an increasing function g on [lo, hi] with g(lo) < 0 < g(hi).
template <class G>
double bracketed_root(G&& g, double lo, double hi, double glo, double ghi, double xtol = 1e-14) {
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  std::uintmax_t iters = 200;
  auto tol = [xtol](double a, double b) { return std::abs(a - b) <= xtol * std::max(1.0, std::abs(a)); };
  const auto r = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, tol, iters);
  return 0.5 * (r.first + r.second);
}

// Root of an increasing g near `seed`: the bracket [seed - h, seed + h] is
// widened geometrically until it straddles zero or reaches |x| = limit.
template <class G>
double increasing_root(G&& g, double seed, double half_width, double limit, const char* what,
                       double xtol = 1e-14) {
  double lo = seed - half_width;
  double hi = seed + half_width;
  double glo = g(lo);
  double ghi = g(hi);
  double step = half_width;
  while (glo > 0.0) {
    if (lo < -limit) {
      std::ostringstream msg;
      msg << what << ": root not bracketed below " << lo;
      throw RootNotBracketed(msg.str());
    }
    hi = lo;
    ghi = glo;
    step *= 2.0;
    lo -= step;
    glo = g(lo);
  }
  step = half_width;
  while (ghi < 0.0) {
    if (hi > limit) {
      std::ostringstream msg;
      msg << what << ": root not bracketed above " << hi;
      throw RootNotBracketed(msg.str());
    }
    lo = hi;
    glo = ghi;
    step *= 2.0;
    hi += step;
    ghi = g(hi);
  }
  return bracketed_root(g, lo, hi, glo, ghi, xtol);
}

}  // namespace ntscorisk::detail
