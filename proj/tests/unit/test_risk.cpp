#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ntscorisk/errors.hpp"
#include "ntscorisk/normal.hpp"
#include "ntscorisk/risk.hpp"
#include "ntscorisk/simulation.hpp"
#include "random_models.hpp"

using namespace ntscorisk;
using ntscorisk::testing::random_model;
using ntscorisk::testing::random_weights;

namespace {

// Index plus one asset; with w = {1} the portfolio is the asset itself.
MarketModel pair_model(double alpha, double theta, double beta0, double beta1, double corr) {
  MarketModel m;
  m.mu = {0.0, 0.0};
  m.sigma = {1.0, 1.0};
  m.nts.sub = {alpha, theta};
  m.nts.beta = {beta0, beta1};
  m.nts.corr = Eigen::Matrix2d{{1.0, corr}, {corr, 1.0}};
  return m;
}

// E[Y ; X < a, Y < b] for standard bivariate normal with correlation r.
double truncated_mean(double a, double b, double r) {
  const double s = std::sqrt(1.0 - r * r);
  return -r * norm_pdf(a) * norm_cdf((b - r * a) / s) - norm_pdf(b) * norm_cdf((a - r * b) / s);
}

// Standardized Gaussian CoVaR/CoCVaR by bisection on the bivariate cdf.
std::pair<double, double> gaussian_oracle(double r, double zeta, double eta) {
  const double a = norm_quantile(zeta);
  double lo = -20.0, hi = 20.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (bvn_cdf(a, mid, r) < zeta * eta ? lo : hi) = mid;
  }
  const double b = 0.5 * (lo + hi);
  return {-b, -truncated_mean(a, b, r) / (zeta * eta)};
}

}  // namespace

TEST_CASE("index VaR") {
  SUBCASE("Gaussian limit is the normal quantile") {
    const auto m = pair_model(1.99, 50.0, 0.0, 0.0, 0.5);
    CHECK(var_std_index(m, 0.05) == doctest::Approx(1.6448536269514722).epsilon(5e-3));
  }
  SUBCASE("median of a symmetric marginal is zero") {
    const auto m = pair_model(1.2, 0.3, 0.0, 0.0, 0.5);
    CHECK(std::abs(var_std_index(m, 0.5)) < 1e-9);
  }
  SUBCASE("decreasing in zeta") {
    const auto m = pair_model(1.1835, 0.082, -0.038, 0.0, 0.5);
    double prev = 1e9;
    for (double z : {0.005, 0.01, 0.025, 0.05, 0.1, 0.25}) {
      const double v = var_std_index(m, z);
      CHECK(v < prev);
      prev = v;
    }
  }
  SUBCASE("scales with sigma and shifts with mu") {
    auto m = pair_model(1.3, 0.5, -0.1, 0.0, 0.5);
    const double base = var_std_index(m, 0.05);
    m.mu[0] = 0.001;
    m.sigma[0] = 0.02;
    CHECK(var_index(m, 0.05) == doctest::Approx(0.02 * base - 0.001).epsilon(1e-12));
  }
  CHECK_THROWS_AS(var_std_index(pair_model(1.3, 0.5, 0.0, 0.0, 0.5), 1.0), InputError);
}

TEST_CASE("joint cdf") {
  const auto m = pair_model(1.1835, 0.082, -0.05, -0.15, 0.6);
  const auto grid = subordinator_pdf_grid(m.nts.sub);
  const auto proj = project_portfolio(m, std::vector<double>{1.0});

  CHECK(bivariate_std_cdf(50.0, 50.0, proj, grid) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(bivariate_std_cdf(-50.0, 0.0, proj, grid) < 1e-10);

  SUBCASE("marginalizes to the stdNTS cdf") {
    for (double x : {-3.0, -1.0, 0.0, 0.7, 2.5}) {
      CHECK(bivariate_std_cdf(x, 60.0, proj, grid) ==
            doctest::Approx(stdnts_marginal_cdf(x, m.nts.sub, m.nts.beta[0])).epsilon(1e-6));
      CHECK(bivariate_std_cdf(60.0, x, proj, grid) ==
            doctest::Approx(stdnts_marginal_cdf(x, m.nts.sub, m.nts.beta[1])).epsilon(1e-6));
    }
  }

  SUBCASE("agrees with simulated frequencies") {
    const auto draws = simulate_std_nts(m.nts, 1000000, 11);
    for (double a : {-2.0, -1.0, 0.5}) {
      for (double b : {-1.5, 0.0, 1.0}) {
        const auto hits = (draws.col(0).array() <= a && draws.col(1).array() <= b).count();
        const double freq = static_cast<double>(hits) / 1e6;
        CHECK(std::abs(freq - bivariate_std_cdf(a, b, proj, grid)) < 0.005);
      }
    }
  }
}

TEST_CASE("CoVaR solves the joint tail equation and CoCVaR exceeds it") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_model(rng, 2 + trial % 4);
    const RiskLevels lv{0.05 + 0.05 * (trial % 2), 0.05};
    const RiskContext ctx(m, lv);
    const auto w = random_weights(rng, m.num_assets());
    const auto tr = tail_risk(ctx, w);
    const double f = bivariate_std_cdf(ctx.index_threshold(), -tr.covar_std, tr.proj, ctx.grid());
    CHECK(std::abs(f - lv.joint()) < 1e-8);
    CHECK(tr.cocvar_std >= tr.covar_std);
    CHECK(tr.cocvar >= tr.covar);
    CHECK(tr.covar == doctest::Approx(tr.proj.sigma_p * tr.covar_std - tr.proj.mu_p).epsilon(1e-14));
  }
}

TEST_CASE("Gaussian limit matches the bivariate normal oracle") {
  for (double r : {0.0, 0.3, 0.6, 0.9}) {
    const auto m = pair_model(1.99, 50.0, 0.0, 0.0, r);
    for (double zeta : {0.05, 0.1}) {
      for (double eta : {0.05, 0.1}) {
        const RiskContext ctx(m, {zeta, eta});
        const auto tr = tail_risk(ctx, std::vector<double>{1.0});
        const auto [cv, ccv] = gaussian_oracle(r, zeta, eta);
        CHECK(tr.covar_std == doctest::Approx(cv).epsilon(0.01));
        CHECK(tr.cocvar_std == doctest::Approx(ccv).epsilon(0.01));
      }
    }
  }
}

TEST_CASE("uncorrelated portfolio in the Gaussian limit ignores index distress") {
  const auto m = pair_model(1.99, 50.0, 0.0, 0.0, 0.0);
  const RiskContext ctx(m, {0.05, 0.05});
  const auto tr = tail_risk(ctx, std::vector<double>{1.0});
  const double q = norm_quantile(0.95);
  CHECK(tr.covar_std == doctest::Approx(q).epsilon(5e-3));
  CHECK(tr.cocvar_std == doctest::Approx(norm_pdf(q) / 0.05).epsilon(5e-3));
}

TEST_CASE("shared random time keeps uncorrelated tails dependent") {
  const auto m = pair_model(1.4, 0.8, 0.0, 0.0, 0.0);
  const RiskContext ctx(m, {0.05, 0.05});
  const auto tr = tail_risk(ctx, std::vector<double>{1.0});
  CHECK(tr.covar_std > var_std_index(m, 0.05));
}

TEST_CASE("risk scales with sigma and shifts with mu") {
  std::mt19937_64 rng(5);
  auto m = random_model(rng, 3);
  const auto w = random_weights(rng, 3);
  const RiskLevels lv{};
  const auto base = tail_risk(RiskContext(m, lv), w);
  for (std::size_t j = 1; j < m.mu.size(); ++j) {
    m.sigma[j] *= 2.0;
    m.mu[j] += 0.001;
  }
  const auto scaled = tail_risk(RiskContext(m, lv), w);
  CHECK(scaled.covar == doctest::Approx(2.0 * (base.covar + base.proj.mu_p) - base.proj.mu_p - 0.001).epsilon(1e-9));
  CHECK(scaled.cocvar ==
        doctest::Approx(2.0 * (base.cocvar + base.proj.mu_p) - base.proj.mu_p - 0.001).epsilon(1e-9));
}

TEST_CASE("quadrature and Monte-Carlo CoCVaR agree") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = random_model(rng, 3 + trial % 3);
    const RiskContext ctx(m, {0.05, 0.05});
    const auto w = random_weights(rng, m.num_assets());
    const auto bank = make_bank(ctx.grid(), 100000, 1000 + trial);
    const auto est = cocvar_mcs(ctx, w, bank);
    const double q = cocvar_quadrature(ctx, w);
    CHECK(std::abs(est.value - q) < 3.0 * est.std_error);
    // Tail indicator frequency is binomial around zeta eta.
    const double p = 0.0025;
    CHECK(std::abs(static_cast<double>(est.tail_count) / 1e5 - p) < 4.0 * std::sqrt(p * (1 - p) / 1e5));
  }
}

TEST_CASE("CoCVaR increases as eta shrinks") {
  std::mt19937_64 rng(8);
  const auto m = random_model(rng, 4);
  const auto w = random_weights(rng, 4);
  double prev = -1e9;
  for (double eta : {0.2, 0.1, 0.05, 0.02, 0.01}) {
    const double c = cocvar_quadrature(RiskContext(m, {0.05, eta}), w);
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("bivariate normal reference") {
  SUBCASE("independent case reduces to VaR and expected shortfall") {
    const auto g = gaussian_covar_cocvar({0.0, 0.0}, Eigen::Matrix2d::Identity(), {0.05, 0.05});
    const double q = norm_quantile(0.95);
    CHECK(g.covar == doctest::Approx(q).epsilon(1e-10));
    CHECK(g.cocvar == doctest::Approx(norm_pdf(q) / 0.05).epsilon(1e-9));
    CHECK(g.cocvar == doctest::Approx(2.0627128075).epsilon(1e-9));
  }
  SUBCASE("matches the truncated-normal closed form") {
    for (double r : {-0.5, 0.2, 0.7, 0.95}) {
      const auto g = gaussian_covar_cocvar({0.0, 0.0}, Eigen::Matrix2d{{1.0, r}, {r, 1.0}}, {0.1, 0.05});
      const auto [cv, ccv] = gaussian_oracle(r, 0.1, 0.05);
      CHECK(g.covar == doctest::Approx(cv).epsilon(1e-9));
      CHECK(g.cocvar == doctest::Approx(ccv).epsilon(1e-9));
    }
  }
  SUBCASE("location and scale") {
    const Eigen::Matrix2d cov{{4e-4, 1.2e-4}, {1.2e-4, 9e-4}};
    const auto g = gaussian_covar_cocvar({1e-3, 2e-3}, cov, {0.05, 0.05});
    const auto [cv, ccv] = gaussian_oracle(0.2, 0.05, 0.05);
    CHECK(g.var_x == doctest::Approx(0.02 * norm_quantile(0.95) - 1e-3).epsilon(1e-10));
    CHECK(g.covar == doctest::Approx(0.03 * cv - 2e-3).epsilon(1e-9));
    CHECK(g.cocvar == doctest::Approx(0.03 * ccv - 2e-3).epsilon(1e-9));
  }
  CHECK_THROWS_AS(gaussian_covar_cocvar({0.0, 0.0}, Eigen::Matrix2d{{1.0, 1.0}, {1.0, 1.0}}, {0.05, 0.05}),
                  SingularCovariance);
  CHECK_THROWS_AS(gaussian_covar_cocvar({0.0, 0.0}, Eigen::Matrix2d{{1.0, 0.2}, {0.3, 1.0}}, {0.05, 0.05}),
                  SingularCovariance);
}

TEST_CASE("Monte-Carlo estimators") {
  std::mt19937_64 rng(4);
  const auto m = random_model(rng, 3);
  const RiskContext ctx(m, {0.05, 0.05});
  const auto w = random_weights(rng, 3);

  SUBCASE("common random numbers are deterministic") {
    const auto b1 = make_bank(ctx.grid(), 20000, 99);
    const auto b2 = make_bank(ctx.grid(), 20000, 99);
    CHECK(cocvar_mcs(ctx, w, b1).value == cocvar_mcs(ctx, w, b2).value);
    CHECK(covar_mcs(ctx, w, b1) == covar_mcs(ctx, w, b2));
  }
  SUBCASE("empirical CoVaR tracks quadrature") {
    const auto bank = make_bank(ctx.grid(), 400000, 3);
    const double q = covar(ctx, w);
    CHECK(covar_mcs(ctx, w, bank) == doctest::Approx(q).epsilon(0.05));
  }
  SUBCASE("tiny banks report an empty tail") {
    const auto bank = make_bank(ctx.grid(), 20, 1);
    CHECK_THROWS_AS(covar_mcs(ctx, w, bank), EmptyTail);
  }
  SUBCASE("reports") {
    const auto q = quadrature_report(ctx, w);
    CHECK(q.method == Method::Quadrature);
    CHECK_FALSE(q.samples.has_value());
    CHECK_FALSE(q.std_error.has_value());
    CHECK(q.var_index == doctest::Approx(ctx.var_index()));
    const auto bank = make_bank(ctx.grid(), 50000, 12);
    const auto r = mcs_report(ctx, w, bank);
    CHECK(r.method == Method::Mcs);
    REQUIRE(r.samples.has_value());
    CHECK(*r.samples == 50000);
    REQUIRE(r.std_error.has_value());
    CHECK(*r.std_error > 0.0);
  }
}

TEST_CASE("level and method parsing") {
  CHECK_THROWS_AS((RiskLevels{0.0, 0.05}.validate()), InputError);
  CHECK_THROWS_AS((RiskLevels{0.05, 1.0}.validate()), InputError);
  CHECK(method_from_string("mcs") == Method::Mcs);
  CHECK(method_from_string(to_string(Method::Quadrature)) == Method::Quadrature);
  CHECK_THROWS_AS(method_from_string("exact"), InputError);
}
