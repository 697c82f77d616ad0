// Microbenchmarks for the hot paths: operator assembly, eigensolve, classical
// trajectory stepping, stochastic sampling, quantization, and the closed-form
// 2x2 eigensolve that sits inside every potential evaluation.

#include <wbomd/bomd.hpp>
#include <wbomd/langevin.hpp>
#include <wbomd/model.hpp>
#include <wbomd/schrodinger.hpp>
#include <wbomd/weyl.hpp>

#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>

namespace {

const wbomd::MatrixPotential& reference_potential()
{
    static const wbomd::MatrixPotential pot =
        wbomd::build_avoided_crossing(0.1, 1.0, 10.0);
    return pot;
}

void BM_Eig2(benchmark::State& state)
{
    Eigen::Matrix2d m;
    m << 1.3, 0.4, 0.4, -0.2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbomd::eig2(m));
    }
}
BENCHMARK(BM_Eig2);

void BM_AssembleHamiltonian(benchmark::State& state)
{
    const wbomd::SpatialGrid grid(-6.0, 6.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            wbomd::assemble_hamiltonian(reference_potential(), grid, 1000.0));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AssembleHamiltonian)->Arg(301)->Arg(751);

void BM_Eigensolve(benchmark::State& state)
{
    const wbomd::SpatialGrid grid(-6.0, 6.0, static_cast<int>(state.range(0)));
    const wbomd::DiscreteHamiltonian h =
        wbomd::assemble_hamiltonian(reference_potential(), grid, 1000.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbomd::solve_eigenproblem(h));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Eigensolve)->Arg(151)->Arg(301)->Unit(benchmark::kMillisecond);

void BM_VerletSteps(benchmark::State& state)
{
    const wbomd::VerletParams params{1e-3, state.range(0)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbomd::verlet_trajectory(
            reference_potential(), 1, {0.5, 0.2}, params.dt * params.n_steps,
            params));
    }
    state.SetItemsProcessed(state.iterations() * params.n_steps);
}
BENCHMARK(BM_VerletSteps)->Arg(200)->Arg(2000);

void BM_LangevinSteps(benchmark::State& state)
{
    wbomd::LangevinParams params;
    params.temperature = 1.9947;
    params.burn_in = 0;
    params.steps = state.range(0);
    params.batches = 20;
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbomd::langevin_average(
            reference_potential(), 1,
            [](wbomd::PhasePoint z) { return z.x * z.x; }, params));
    }
    state.SetItemsProcessed(state.iterations() * params.steps);
}
BENCHMARK(BM_LangevinSteps)->Arg(50000)->Unit(benchmark::kMillisecond);

void BM_WeylQuantize(benchmark::State& state)
{
    const double m = 25.0;
    const wbomd::SpatialGrid x =
        wbomd::admissible_x_grid(-6.0, 6.0, m, 6.0, 16);
    const wbomd::PhaseSpaceGrid grid(x, wbomd::SpatialGrid(-6.0, 6.0, 300));
    const wbomd::SymbolField a =
        wbomd::make_scalar_symbol(grid, [](double xx, double pp) {
            return std::complex<double>(std::exp(-xx * xx - pp * pp), 0.0);
        });
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbomd::weyl_quantize(a, m));
    }
    state.SetComplexityN(grid.x.n_nodes());
}
BENCHMARK(BM_WeylQuantize)->Unit(benchmark::kMillisecond);

void BM_MdCorrelationZeroLag(benchmark::State& state)
{
    const wbomd::SpatialGrid xg(-4.5, 4.5, 200);
    const wbomd::PhaseSpaceGrid grid(xg, xg);
    const wbomd::GibbsWeights w =
        wbomd::gibbs_weights(reference_potential(), 1.9947, xg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbomd::md_correlation(
            reference_potential(), 1.9947, 0.0, grid, w));
    }
}
BENCHMARK(BM_MdCorrelationZeroLag)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
