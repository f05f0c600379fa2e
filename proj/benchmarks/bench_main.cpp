// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "ntnpos/bounds.hpp"
#include "ntnpos/estimation.hpp"

using namespace ntnpos;

namespace {

struct Setup {
    Scenario sc;
    GroundTruth truth;
    ModelContext ctx;

    explicit Setup(int n, int m) {
        sc.subcarriers = n;
        sc.symbols = m;
        truth = compute_truth(sc);
        ctx = make_context(sc, truth);
    }
};

void bm_simplified_synthesis(benchmark::State& state) {
    const Setup s(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const ModelKind kind = static_cast<ModelKind>(state.range(2));
    for (auto _ : state) {
        const ObservationGrid y = build_observation_simplified(kind, s.truth.chi, s.ctx);
        benchmark::DoNotOptimize(y.samples.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void bm_generative_synthesis(benchmark::State& state) {
    const Setup s(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        const ObservationGrid y = build_observation_generative(s.sc, s.truth, s.ctx);
        benchmark::DoNotOptimize(y.samples.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void bm_estimate(benchmark::State& state) {
    const Setup s(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const ModelKind kind = static_cast<ModelKind>(state.range(2));
    const ObservationGrid y = build_observation_generative(s.sc, s.truth, s.ctx);
    const SearchConfig cfg = SearchConfig::defaults(s.ctx);
    for (auto _ : state) {
        const EstimationReport rep = estimate(kind, y, s.ctx, cfg);
        benchmark::DoNotOptimize(rep.objective);
    }
}

void bm_channel_fim(benchmark::State& state) {
    const Setup s(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const double sigma2 = scenario_sigma2(s.sc, s.truth);
    for (auto _ : state) {
        const Eigen::MatrixXd f =
            fim_channel(ModelKind::CCFOD, s.truth.chi, s.sc, s.ctx, sigma2);
        benchmark::DoNotOptimize(f.data());
    }
}

BENCHMARK(bm_simplified_synthesis)
    ->Args({64, 8, static_cast<int>(ModelKind::Comm)})
    ->Args({64, 8, static_cast<int>(ModelKind::CCFOD)})
    ->Args({512, 32, static_cast<int>(ModelKind::Comm)})
    ->Args({512, 32, static_cast<int>(ModelKind::CCFOD)});
BENCHMARK(bm_generative_synthesis)->Args({64, 8})->Args({512, 32});
BENCHMARK(bm_estimate)
    ->Args({64, 8, static_cast<int>(ModelKind::Comm)})
    ->Args({64, 8, static_cast<int>(ModelKind::CCFOD)})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bm_channel_fim)->Args({64, 8})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
