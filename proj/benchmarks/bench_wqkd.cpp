#include <benchmark/benchmark.h>

#include <numbers>

#include "wqkd/adversary.hpp"
#include "wqkd/optimizer.hpp"
#include "wqkd/protocol_sim.hpp"
#include "wqkd/security_metrics.hpp"

namespace {

using namespace wqkd;

void BM_GridScan(benchmark::State& state) {
  const auto f = make_objective(AttackObjective::WTilde);
  const auto resolution = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_scan(f, resolution).min_value);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_GridScan)->Arg(180)->Arg(720)->Unit(benchmark::kMillisecond);

void BM_FindMinWTilde(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_min_wtilde_eve().min_value);
  }
}
BENCHMARK(BM_FindMinWTilde)->Unit(benchmark::kMillisecond);

void BM_SecurityReportMixture(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<AttackAtom> atoms;
  for (std::size_t i = 0; i < n; ++i) {
    atoms.push_back({Angle(0.01 * i), Angle(0.02 * i), 1.0 / static_cast<double>(n)});
  }
  const auto source = SourceModel::product_attack(AttackDistribution(std::move(atoms)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(security_report(source, Protocol::Extended9));
  }
}
BENCHMARK(BM_SecurityReportMixture)->Arg(1)->Arg(64)->Arg(4096);

void BM_SessionAndSift(benchmark::State& state) {
  ProtocolConfig cfg;
  cfg.variant = Protocol::Extended9;
  cfg.n_pairs = static_cast<std::uint64_t>(state.range(0));
  cfg.seed = 1;
  cfg.sacrifice_fraction = 0.5;
  const auto workers = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    const auto records = run_session(cfg, SourceModel::singlet(), workers);
    benchmark::DoNotOptimize(sift(records, cfg, SiftOptions{false}).result.key_rounds);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SessionAndSift)->Args({100000, 1})->Args({100000, 4})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
