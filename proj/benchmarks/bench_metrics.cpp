#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "citefield/metrics.hpp"
#include "synthetic.hpp"

using namespace citefield;

static void BM_Cfdi(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(state.range(0)));
  for (auto& c : counts) c = rng() % 100000 + 1;
  for (auto _ : state) benchmark::DoNotOptimize(cfdi(counts));
}
BENCHMARK(BM_Cfdi)->Arg(23)->Arg(64);

static void BM_FlowTensorBuild(benchmark::State& state) {
  const auto index = bench::random_index(100'000, static_cast<std::uint64_t>(state.range(0)));
  FlowSpec spec;
  spec.focal = PaperScope::nlp();
  for (auto _ : state) {
    auto t = build_flow_tensor(index, SchemeKind::TopLevel, spec);
    benchmark::DoNotOptimize(t.total());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FlowTensorBuild)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

static void BM_Orcp(benchmark::State& state) {
  const auto index = bench::random_index(50'000, 500'000);
  FlowSpec spec;
  spec.focal = PaperScope::nlp();
  const auto t = build_flow_tensor(index, SchemeKind::TopLevel, spec);
  for (auto _ : state) benchmark::DoNotOptimize(orcp(t, FlowNode::focal()));
}
BENCHMARK(BM_Orcp)->Unit(benchmark::kMicrosecond);

static void BM_CfdiByBinAndPeriod(benchmark::State& state) {
  const auto index = bench::random_index(100'000, 1'000'000);
  const auto labels = PaperLabels::top_level(index);
  for (auto _ : state) {
    auto table = cfdi_by_bin_and_period(index, labels, PaperScope::all(), default_periods());
    benchmark::DoNotOptimize(table.cells.size());
  }
}
BENCHMARK(BM_CfdiByBinAndPeriod)->Unit(benchmark::kMillisecond);
