// Serial reference vs OpenMP batch kernel on generated models.
#include <benchmark/benchmark.h>

#include "shortkit/generator.hpp"
#include "shortkit/kernels.hpp"

using namespace shortkit;

namespace {

struct Batch {
    GeneratedModel g;
    CostAssignment costs;
    std::vector<Prior> priors;
    std::vector<SampleJob> jobs;
};

Batch make_batch(int nodes, int jobs) {
    GenSpec spec;
    spec.nodes = nodes;
    spec.keys = std::max(3, nodes / 35);
    Batch b;
    b.g = generate_model(spec);
    b.costs = sample_costs(b.g.model, 1);
    // half the jobs carry the planted keys as a prior, like OPTIMIZE members do
    b.priors.assign(1, b.g.keys);
    for (int i = 0; i < jobs; ++i)
        b.jobs.push_back({i % 2 ? &b.priors[0] : nullptr, derive_seed(7, {static_cast<std::uint64_t>(i)}), nullptr});
    return b;
}

template <bool Parallel>
void bm_batch(benchmark::State& state) {
    const auto b = make_batch(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        auto out = Parallel ? sample_batch_parallel(b.g.model, b.jobs, b.costs)
                            : sample_batch_serial(b.g.model, b.jobs, b.costs);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(b.jobs.size()));
    state.counters["threads"] = Parallel ? max_threads() : 1;
}

void sizes(benchmark::internal::Benchmark* b) {
    for (int nodes : {50, 200, 400}) b->Args({nodes, 1000});
    b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(bm_batch<false>)->Name("sample_batch_serial")->Apply(sizes);
BENCHMARK(bm_batch<true>)->Name("sample_batch_parallel")->Apply(sizes);

BENCHMARK_MAIN();
