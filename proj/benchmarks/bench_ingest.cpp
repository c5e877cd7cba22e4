#include <benchmark/benchmark.h>

#include <sstream>

#include "citefield/corpus.hpp"
#include "synthetic.hpp"

using namespace citefield;

static void BM_ParseEdgeLine(benchmark::State& state) {
  const std::string line = "{\"src\":\"W123456\",\"tgt\":\"W654321\"}";
  for (auto _ : state) benchmark::DoNotOptimize(parse_citation_edge(line));
}
BENCHMARK(BM_ParseEdgeLine);

static void BM_IngestJsonl(benchmark::State& state) {
  const std::uint64_t edges = static_cast<std::uint64_t>(state.range(0));
  const std::uint64_t papers = edges / 10;
  const auto p = bench::papers_jsonl(papers);
  const auto e = bench::edges_jsonl(papers, edges);
  for (auto _ : state) {
    std::istringstream pin(p), ein(e);
    auto r = build_index(pin, ein);
    benchmark::DoNotOptimize(r.index.edge_count());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IngestJsonl)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

static void BM_SaveLoad(benchmark::State& state) {
  const auto index = bench::random_index(100'000, 1'000'000);
  const auto path = std::filesystem::temp_directory_path() / "citefield-bench.idx";
  for (auto _ : state) {
    save_index(index, path);
    auto loaded = load_index(path);
    benchmark::DoNotOptimize(loaded.edge_count());
  }
  std::filesystem::remove(path);
}
BENCHMARK(BM_SaveLoad)->Unit(benchmark::kMillisecond);
