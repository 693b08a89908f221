#include <benchmark/benchmark.h>

#include "mftx/analytic.hpp"
#include "mftx/eigenmodes.hpp"
#include "mftx/particle_sim.hpp"

using namespace mftx;

static void BM_EigenSolve(benchmark::State& state) {
    const SystemConfig c;
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(eigen::solve_eigenvalues(c, n));
}
BENCHMARK(BM_EigenSolve)->Arg(50)->Arg(200)->Arg(800);

static void BM_ReleaseDensity(benchmark::State& state) {
    const analytic::Channel ch{SystemConfig{}};
    double t = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(ch.release_density(t));
}
BENCHMARK(BM_ReleaseDensity);

static void BM_E2eHitting(benchmark::State& state) {
    const analytic::Channel ch{SystemConfig{}};
    const double t = static_cast<double>(state.range(0)) / 10.0;
    for (auto _ : state) benchmark::DoNotOptimize(ch.e2e_hitting(t));
}
BENCHMARK(BM_E2eHitting)->Arg(5)->Arg(20)->Arg(100);

static void BM_VesicleStep(benchmark::State& state) {
    const SystemConfig c;
    sim::RandomStream rng(1, 0);
    sim::VesicleState v;
    for (auto _ : state) {
        if (v.status != sim::VesicleStatus::diffusing) v = {};
        benchmark::DoNotOptimize(sim::advance_vesicle(v, c, rng));
    }
}
BENCHMARK(BM_VesicleStep);

static void BM_MoleculeStep(benchmark::State& state) {
    SystemConfig c;
    c.k_d = 0.0;
    const Vec3 rx{c.l, 0.0, 0.0};
    sim::RandomStream rng(2, 0);
    sim::MoleculeState m{{10.0, 0.0, 0.0}, 0.0, sim::MoleculeStatus::diffusing};
    for (auto _ : state) {
        m = sim::propagate_molecule(m, c, rx, c.dt_s, rng);
        if (m.status != sim::MoleculeStatus::diffusing) m = {{10.0, 0.0, 0.0}, 0.0, sim::MoleculeStatus::diffusing};
    }
}
BENCHMARK(BM_MoleculeStep);

static void BM_Realization(benchmark::State& state) {
    SystemConfig c;
    c.n_v = 10;
    sim::RunSpec spec;
    spec.realizations = 1;
    std::uint64_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sim::simulate_realization(c, spec, i++, false));
}
BENCHMARK(BM_Realization)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
