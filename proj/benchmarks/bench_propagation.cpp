#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "dcesync/hamiltonian.hpp"
#include "dcesync/observables.hpp"
#include "dcesync/propagator.hpp"

using namespace dcesync;

namespace {

SystemParams driven() {
    SystemParams p;
    p.alpha0 = 0.052;
    return p;
}

void BM_SparseApply(benchmark::State& state) {
    const FockTruncation t(static_cast<int>(state.range(0)));
    const SparseOperator h = build_tc(driven(), t) + build_drive(t).scaled(0.052);
    std::vector<Complex> x(t.dimension(), Complex(0.5, 0.1)), y(t.dimension());
    for (auto _ : state) {
        h.apply(x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(h.nonzeros()));
}
BENCHMARK(BM_SparseApply)->Arg(16)->Arg(80)->Arg(160);

void BM_Derivative(benchmark::State& state) {
    const FockTruncation t(static_cast<int>(state.range(0)));
    const DrivenOperators ops(driven(), t);
    std::vector<Complex> x(t.dimension(), Complex(0.5, 0.1)), y(t.dimension()), scratch(t.dimension());
    double time = 0.0;
    for (auto _ : state) {
        ops.derivative(time, 0.052 * std::cos(time), x, y, scratch);
        benchmark::DoNotOptimize(y.data());
        time += 0.01;
    }
}
BENCHMARK(BM_Derivative)->Arg(16)->Arg(80)->Arg(160);

void BM_Rk4Step(benchmark::State& state) {
    const FockTruncation t(static_cast<int>(state.range(0)), 0.5);
    const DrivenOperators ops(driven(), t);
    StateVector psi = prepare_initial(std::numbers::pi / 4, 5 * std::numbers::pi / 12, t);
    double time = 0.0;
    for (auto _ : state) {
        psi = step(psi, time, 0.01, ops);
        time += 0.01;
    }
}
BENCHMARK(BM_Rk4Step)->Arg(16)->Arg(80)->Arg(160);

void BM_EvolveHorizon(benchmark::State& state) {
    IntegratorConfig c;
    c.t_end = 100.0;
    const StateVector psi =
        prepare_initial(std::numbers::pi / 4, 5 * std::numbers::pi / 12, FockTruncation(static_cast<int>(state.range(0)), 0.5));
    for (auto _ : state) benchmark::DoNotOptimize(evolve(psi, c, driven()).n.back());
}
BENCHMARK(BM_EvolveHorizon)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_Pearson(benchmark::State& state) {
    std::vector<double> t, a, b;
    for (int k = 0; k <= 4000; ++k) {
        t.push_back(0.5 * k);
        a.push_back(std::sin(0.05 * t.back()));
        b.push_back(std::cos(0.051 * t.back()));
    }
    const Series s1(t, a), s2(t, b);
    for (auto _ : state) benchmark::DoNotOptimize(pearson(s1, s2, {500.0, 1500.0}));
}
BENCHMARK(BM_Pearson);

}  // namespace

BENCHMARK_MAIN();
