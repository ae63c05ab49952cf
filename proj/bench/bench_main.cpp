#include "twinrecover/density.hpp"
#include "twinrecover/graph.hpp"
#include "twinrecover/kde.hpp"
#include "twinrecover/philox.hpp"
#include "twinrecover/recoverability.hpp"

#include <benchmark/benchmark.h>

#include <string>

using namespace twinrec;

namespace {

Column normal_sample(std::size_t n) {
    Philox4x32 rng(1, 0);
    Column out(n);
    for (auto& v : out) v = rng.normal();
    return out;
}

void kde(benchmark::State& state, Exec exec) {
    const auto samples = normal_sample(static_cast<std::size_t>(state.range(0)));
    const Grid grid{-6, 6, 512};
    const double h = silverman_bandwidth(samples);
    for (auto _ : state) benchmark::DoNotOptimize(gaussian_kde(samples, h, grid, exec));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 512);
}

void BM_KdeSerial(benchmark::State& state) { kde(state, Exec::Serial); }
void BM_KdeParallel(benchmark::State& state) { kde(state, Exec::Parallel); }
BENCHMARK(BM_KdeSerial)->Arg(1000)->Arg(4000)->Arg(16000);
BENCHMARK(BM_KdeParallel)->Arg(1000)->Arg(4000)->Arg(16000);

// A chain of k confounders W0 -> ... -> Wk-1, each also pointing at X, Y and S,
// so the admissible-set search has to walk every subset up to the size limit.
CausalGraph layered(std::size_t k) {
    std::string text = "node X endo; node Y endo; node S sel\nedge X -> Y\n";
    for (std::size_t i = 0; i < k; ++i) {
        const std::string w = "W" + std::to_string(i);
        text += "node " + w + " endo\nedge " + w + " -> X\nedge " + w + " -> Y\n";
        if (i % 2 == 0) text += "edge " + w + " -> S\n";
        if (i > 0) text += "edge W" + std::to_string(i - 1) + " -> " + w + "\n";
    }
    return parse_graph(text);
}

void admissible(benchmark::State& state, Exec exec) {
    const auto g = layered(static_cast<std::size_t>(state.range(0)));
    NodeSet candidates;
    for (std::int64_t i = 0; i < state.range(0); ++i) candidates.insert("W" + std::to_string(i));
    for (auto _ : state) benchmark::DoNotOptimize(find_admissible_sets(g, "X", "Y", candidates, 4, exec));
}

void BM_AdmissibleSerial(benchmark::State& state) { admissible(state, Exec::Serial); }
void BM_AdmissibleParallel(benchmark::State& state) { admissible(state, Exec::Parallel); }
BENCHMARK(BM_AdmissibleSerial)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AdmissibleParallel)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
