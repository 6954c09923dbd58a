#include <benchmark/benchmark.h>

#include <vector>

#include "ntscorisk/nts.hpp"
#include "ntscorisk/optimize.hpp"
#include "ntscorisk/risk.hpp"
#include "ntscorisk/sensitivity.hpp"
#include "ntscorisk/simulation.hpp"

using namespace ntscorisk;

namespace {

const SubordinatorParams kIndexFit{1.1835, 0.082};

MarketModel five_asset_model() {
  MarketModel m;
  m.mu = {3e-4, 6e-4, 2e-4, 8e-4, 1e-4, 9e-4};
  m.sigma = {0.011, 0.018, 0.014, 0.021, 0.012, 0.025};
  m.nts.sub = kIndexFit;
  m.nts.beta = {-0.038, -0.12, -0.05, 0.0, 0.03, -0.2};
  m.nts.corr = Eigen::MatrixXd::Constant(6, 6, 0.35);
  for (int i = 1; i < 6; ++i) m.nts.corr(0, i) = m.nts.corr(i, 0) = 0.6;
  m.nts.corr.diagonal().setOnes();
  return m;
}

void BM_SubordinatorGrid(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(subordinator_pdf_grid(kIndexFit));
}
BENCHMARK(BM_SubordinatorGrid)->Unit(benchmark::kMillisecond);

void BM_MarginalCdfBatch(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(stdnts_marginal_uniform(-6.0, 0.06, 201, kIndexFit, -0.038));
}
BENCHMARK(BM_MarginalCdfBatch)->Unit(benchmark::kMillisecond);

void BM_TailRiskQuadrature(benchmark::State& state) {
  const RiskContext ctx(five_asset_model(), {0.05, 0.05});
  const auto w = Weights::equal(5).vector();
  for (auto _ : state) benchmark::DoNotOptimize(tail_risk(ctx, w));
}
BENCHMARK(BM_TailRiskQuadrature)->Unit(benchmark::kMicrosecond);

void BM_SampleBank(benchmark::State& state) {
  const auto grid = shared_subordinator_grid(kIndexFit);
  const auto M = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(make_bank(*grid, M, 7));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_SampleBank)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_MctBothQuadrature(benchmark::State& state) {
  const RiskContext ctx(five_asset_model(), {0.05, 0.05});
  const auto w = Weights::equal(5).vector();
  for (auto _ : state) benchmark::DoNotOptimize(mct_both(ctx, w));
}
BENCHMARK(BM_MctBothQuadrature)->Unit(benchmark::kMicrosecond);

void BM_MctBothBank(benchmark::State& state) {
  const RiskContext ctx(five_asset_model(), {0.05, 0.05});
  const auto w = Weights::equal(5).vector();
  const auto bank = make_bank(ctx.grid(), 100000, 11);
  for (auto _ : state) benchmark::DoNotOptimize(mct_both(ctx, w, bank));
}
BENCHMARK(BM_MctBothBank)->Unit(benchmark::kMillisecond);

void BM_BudgetStep(benchmark::State& state) {
  const std::vector<double> mct{0.05, 0.02, 0.08, 0.01, 0.04};
  const std::vector<double> mu{6e-4, 2e-4, 8e-4, 1e-4, 9e-4};
  const std::vector<double> w{0.2, 0.2, 0.2, 0.2, 0.2};
  for (auto _ : state) benchmark::DoNotOptimize(budget_step(mct, mu, w, 4e-4));
}
BENCHMARK(BM_BudgetStep)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
