#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ntscorisk/errors.hpp"
#include "ntscorisk/sensitivity.hpp"
#include "random_models.hpp"

using namespace ntscorisk;
using ntscorisk::testing::random_model;
using ntscorisk::testing::random_weights;
using ntscorisk::testing::symmetric_model;

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

TEST_CASE("identical assets get identical contributions") {
  const auto m = symmetric_model(4);
  const RiskContext ctx(m, {0.05, 0.05});
  const auto w = Weights::equal(4);
  const auto pair = mct_both(ctx, w.values());
  for (std::size_t j = 1; j < 4; ++j) {
    CHECK(pair.covar.values[j] == doctest::Approx(pair.covar.values[0]).epsilon(1e-10));
    CHECK(pair.cocvar.values[j] == doctest::Approx(pair.cocvar.values[0]).epsilon(1e-10));
  }
}

TEST_CASE("analytic contributions match central differences") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = random_model(rng, 3);
    const auto w = random_weights(rng, 3);
    const RiskContext ctx(m, {0.05, 0.05});
    const auto pair = mct_both(ctx, w);
    for (const Measure meas : {Measure::CoVaR, Measure::CoCVaR}) {
      const auto& a = meas == Measure::CoVaR ? pair.covar.values : pair.cocvar.values;
      const auto coarse = mct_finite_difference(ctx, w, meas, 1e-4);
      const auto fine = mct_finite_difference(ctx, w, meas, 5e-5);
      for (std::size_t j = 0; j < 3; ++j) {
        const double tol = meas == Measure::CoVaR ? 0.01 : 0.02;
        CHECK(std::abs(coarse[j] - a[j]) < tol * std::abs(a[j]));
        CHECK(std::abs(fine[j] - a[j]) < tol * std::abs(a[j]));
        // Halving h cuts a second-order error by four.
        const double ratio = std::abs(coarse[j] - a[j]) / std::abs(fine[j] - a[j]);
        CHECK(ratio > 3.0);
        CHECK(ratio < 5.5);
      }
    }
  }
}

TEST_CASE("Euler allocation reproduces the portfolio risk") {
  std::mt19937_64 rng(21);
  for (std::size_t n : {3u, 5u, 10u}) {
    const auto m = random_model(rng, n);
    const auto w = random_weights(rng, n);
    const RiskContext ctx(m, {0.05, 0.05});
    const auto pair = mct_both(ctx, w);
    CHECK(dot(w, pair.covar.values) == doctest::Approx(pair.risk.covar).epsilon(1e-8));
    CHECK(dot(w, pair.cocvar.values) == doctest::Approx(pair.risk.cocvar).epsilon(1e-8));

    const auto bank = make_bank(ctx.grid(), 100000, 40 + n);
    const auto mc = mct_both(ctx, w, bank);
    CHECK(dot(w, mc.covar.values) == doctest::Approx(pair.risk.covar).epsilon(0.01));
    CHECK(dot(w, mc.cocvar.values) == doctest::Approx(pair.risk.cocvar).epsilon(0.01));
  }
}

TEST_CASE("Monte-Carlo contributions use common random numbers") {
  std::mt19937_64 rng(9);
  const auto m = random_model(rng, 4);
  const auto w = random_weights(rng, 4);
  const RiskContext ctx(m, {0.05, 0.05});
  const auto bank = make_bank(ctx.grid(), 50000, 5);
  const auto a = mct_portfolio(ctx, w, Measure::CoCVaR, bank);
  const auto b = mct_portfolio(ctx, w, Measure::CoCVaR, bank);
  CHECK(a.values == b.values);
  CHECK(a.measure == Measure::CoCVaR);
}

TEST_CASE("common drift shifts every contribution equally") {
  std::mt19937_64 rng(12);
  auto m = random_model(rng, 4);
  const auto w = random_weights(rng, 4);
  const auto before = mct_both(RiskContext(m, {0.05, 0.05}), w);
  for (std::size_t j = 1; j < m.mu.size(); ++j) m.mu[j] += 2e-3;
  const auto after = mct_both(RiskContext(m, {0.05, 0.05}), w);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(after.covar.values[j] == doctest::Approx(before.covar.values[j] - 2e-3).epsilon(1e-9));
    CHECK(after.cocvar.values[j] == doctest::Approx(before.cocvar.values[j] - 2e-3).epsilon(1e-9));
  }
}

TEST_CASE("ranks") {
  CHECK(ascending_ranks({0.3, -1.0, 2.0, 0.1}) == std::vector<int>{3, 1, 4, 2});
  CHECK(ascending_ranks({1.0, 1.0, 0.0}) == std::vector<int>{2, 3, 1});

  std::mt19937_64 rng(17);
  const auto m = random_model(rng, 6);
  const auto w = random_weights(rng, 6);
  const auto v = mct_portfolio(RiskContext(m, {0.05, 0.05}), w, Measure::CoVaR);
  auto sorted = v.ranks;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expect(6);
  std::iota(expect.begin(), expect.end(), 1);
  CHECK(sorted == expect);
}

TEST_CASE("stronger index coupling raises the contribution") {
  auto m = symmetric_model(4, 1.2, 0.3, -0.1, 0.5, 0.3);
  m.nts.corr(0, 3) = m.nts.corr(3, 0) = 0.8;
  const auto v = mct_portfolio(RiskContext(m, {0.05, 0.05}), Weights::equal(4).values(), Measure::CoCVaR);
  CHECK(v.ranks[2] == 4);
}

TEST_CASE("portfolio locked to the index is rejected") {
  auto m = symmetric_model(2, 1.2, 0.3, -0.1, 0.5, 0.3);
  m.nts.beta[1] = m.nts.beta[0];
  m.nts.corr(0, 1) = m.nts.corr(1, 0) = 1.0;
  m.nts.corr(1, 2) = m.nts.corr(2, 1) = 0.5;
  const RiskContext ctx(m, {0.05, 0.05});
  CHECK_THROWS_AS(mct_both(ctx, std::vector<double>{1.0, 0.0}), RhoNearUnity);
}

TEST_CASE("finite-difference step is range checked") {
  const RiskContext ctx(symmetric_model(2), {0.05, 0.05});
  CHECK_THROWS_AS(mct_finite_difference(ctx, std::vector<double>{0.5, 0.5}, Measure::CoVaR, 0.1), InputError);
  CHECK(measure_from_string("covar") == Measure::CoVaR);
  CHECK_THROWS_AS(measure_from_string("var"), InputError);
}
