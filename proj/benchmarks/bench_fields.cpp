#include <benchmark/benchmark.h>

#include "madelab/analytic.hpp"
#include "madelab/madelung.hpp"
#include "madelab/types.hpp"

using namespace madelab;

namespace {

MadelungFields linear_snapshot(int points, double t, const analytic::LinearScenario& scen) {
    const Grid g = make_grid_1d(-16.0, 16.0, points);
    MadelungFields f;
    f.grid = g;
    f.time = t;
    f.rho.resize(g.size());
    f.action.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto s = analytic::linear_fields(g.node(i), t, scen);
        f.rho[i] = s.rho;
        f.action[i] = s.action;
    }
    return f;
}

void BM_decompose_1d(benchmark::State& state) {
    const int points = static_cast<int>(state.range(0));
    SystemParams params;
    params.dim = 1;
    const Grid g = make_grid_1d(-20.0, 20.0, points);
    GaussianPrep prep;
    prep.v0 = vec(0.7);
    const WaveField psi = prepare_wavefunction(prep, params, g);
    for (auto _ : state) {
        const auto f = madelung::decompose(psi, params);
        benchmark::DoNotOptimize(f.action[points / 2]);
    }
    state.SetItemsProcessed(state.iterations() * points);
}

void BM_quantum_potential_1d(benchmark::State& state) {
    const int points = static_cast<int>(state.range(0));
    GaussianPrep prep;
    auto scen = analytic::make_linear_scenario(prep, vec(0.2), 1.0, 1.0, 1);
    const auto f = linear_snapshot(points, 0.5, scen);
    for (auto _ : state) {
        const auto q = madelung::quantum_potential(f, scen.params);
        benchmark::DoNotOptimize(q[points / 2]);
    }
    state.SetItemsProcessed(state.iterations() * points);
}

void BM_residuals_1d(benchmark::State& state) {
    const int points = static_cast<int>(state.range(0));
    GaussianPrep prep;
    auto scen = analytic::make_linear_scenario(prep, vec(0.2), 1.0, 1.0, 1);
    const double dt = 1e-3;
    const auto prev = linear_snapshot(points, 1.0 - dt, scen);
    const auto mid = linear_snapshot(points, 1.0, scen);
    const auto next = linear_snapshot(points, 1.0 + dt, scen);
    for (auto _ : state) {
        const auto rep = madelung::residuals(prev, mid, next, scen.params);
        benchmark::DoNotOptimize(rep.lsq_functional);
    }
    state.SetItemsProcessed(state.iterations() * points);
}

} // namespace

BENCHMARK(BM_decompose_1d)->Arg(1024)->Arg(4096);
BENCHMARK(BM_quantum_potential_1d)->Arg(1024)->Arg(4096);
BENCHMARK(BM_residuals_1d)->Arg(1024)->Arg(4096);
