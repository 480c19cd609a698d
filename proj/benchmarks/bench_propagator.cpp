#include <benchmark/benchmark.h>

#include "madelab/schrodinger.hpp"
#include "madelab/types.hpp"

using namespace madelab;

namespace {

WaveField prepared_1d(int points) {
    SystemParams params;
    params.dim = 1;
    const Grid g = make_grid_1d(-20.0, 20.0, points);
    return prepare_wavefunction(GaussianPrep{}, params, g);
}

void BM_split_step_1d(benchmark::State& state) {
    const int points = static_cast<int>(state.range(0));
    SystemParams params;
    params.dim = 1;
    params.potential = LinearPotential{vec(0.3)};
    const WaveField psi0 = prepared_1d(points);

    schrodinger::PropagatorConfig cfg;
    cfg.dt = 1e-3;
    cfg.n_steps = 64;
    cfg.snapshot_stride = cfg.n_steps;
    for (auto _ : state) {
        const auto snaps = schrodinger::evolve(psi0, params, cfg);
        benchmark::DoNotOptimize(snaps.back().values[0]);
    }
    state.SetItemsProcessed(state.iterations() * cfg.n_steps * points);
}

void BM_split_step_2d(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SystemParams params;
    params.dim = 2;
    params.potential = HarmonicPotential{1.0};
    const std::pair<double, double> b[2] = {{-8.0, 8.0}, {-8.0, 8.0}};
    const int pts[2] = {n, n};
    const Grid g = make_grid(2, {b, 2}, {pts, 2});
    CoherentPrep prep;
    params.hbar = 1.0;
    const WaveField psi0 = prepare_wavefunction(prep, params, g);

    schrodinger::PropagatorConfig cfg;
    cfg.dt = 1e-3;
    cfg.n_steps = 16;
    cfg.snapshot_stride = cfg.n_steps;
    for (auto _ : state) {
        const auto snaps = schrodinger::evolve(psi0, params, cfg);
        benchmark::DoNotOptimize(snaps.back().values[0]);
    }
    state.SetItemsProcessed(state.iterations() * cfg.n_steps * g.size());
}

} // namespace

BENCHMARK(BM_split_step_1d)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(BM_split_step_2d)->Arg(64)->Arg(128)->Arg(256);
