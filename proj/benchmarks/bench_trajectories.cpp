#include <benchmark/benchmark.h>

#include "madelab/analytic.hpp"
#include "madelab/bohm.hpp"

using namespace madelab;

namespace {

void BM_ensemble_analytic_flow(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    GaussianPrep prep;
    prep.v0 = vec(0.3);
    auto scen = analytic::make_linear_scenario(prep, vec(0.2), 1.0, 1.0, 1);
    const auto flow = bohm::analytic_flow(scen, bohm::VelocityMode::standard());
    const bohm::CallableVelocitySource src(flow, 0.0, 1.0, 1e-2);
    const auto samples = bohm::sample_initial(prep, 1, n, 7);
    bohm::IntegrateOptions opts;
    opts.record_times = {0.0, 1.0};
    for (auto _ : state) {
        const auto run = bohm::integrate_ensemble(src, samples, prep.zeta0,
                                                  bohm::VelocityMode::standard(), opts);
        benchmark::DoNotOptimize(run.trajectories[0].positions.back()[0]);
    }
    state.SetItemsProcessed(state.iterations() * n);
}

void BM_sampling(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    GaussianPrep prep;
    for (auto _ : state) {
        const auto samples = bohm::sample_initial(prep, 1, n, 11);
        benchmark::DoNotOptimize(samples[0].eta0[0]);
    }
    state.SetItemsProcessed(state.iterations() * n);
}

} // namespace

BENCHMARK(BM_ensemble_analytic_flow)->Arg(100)->Arg(1000);
BENCHMARK(BM_sampling)->Arg(1000)->Arg(100000);
