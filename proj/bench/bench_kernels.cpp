// Serial references against the OpenMP kernels.  Run with OMP_NUM_THREADS
// set to compare thread counts; the reference ignores it.

#include "gaussline/cylinder_quadrature.hpp"
#include "gaussline/fourier.hpp"
#include "gaussline/thermo.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>

namespace {

using namespace gaussline;

void pressure_args(benchmark::internal::Benchmark* b)
{
    b->Args({2, 16})->Args({3, 11})->Args({5, 8})->Unit(benchmark::kMillisecond);
}

void BM_PressureReference(benchmark::State& state)
{
    const Alphabet a = Alphabet::first_n(static_cast<Digit>(state.range(0)));
    const int depth = static_cast<int>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(pressure_estimate_reference(Potential::tlog(0.7), a, depth).value);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(std::pow(state.range(0), depth)));
}
BENCHMARK(BM_PressureReference)->Apply(pressure_args);

void BM_PressureKernel(benchmark::State& state)
{
    const Alphabet a = Alphabet::first_n(static_cast<Digit>(state.range(0)));
    const int depth = static_cast<int>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(pressure_estimate(Potential::tlog(0.7), a, depth).value);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(std::pow(state.range(0), depth)));
}
BENCHMARK(BM_PressureKernel)->Apply(pressure_args);

// Fourier integrand of the Minkowski measure at xi = 2^range(0), tol 1e-3.
template <bool Parallel>
void BM_Quadrature(benchmark::State& state)
{
    const double xi = std::ldexp(1.0, static_cast<int>(state.range(0)));
    QuadOptions opt;
    opt.leaf_osc = 1e-3;
    opt.mass_floor = 1e-3 / static_cast<double>(opt.max_leaves);
    opt.osc_cap = 2.0;
    const auto f = [xi](double x) { return unit_phase(xi, x); };
    const auto osc = [xi](double lo, double hi) { return 2 * M_PI * xi * (hi - lo); };
    const MeasureModel m = MeasureModel::minkowski();
    std::uint64_t leaves = 0;
    for (auto _ : state) {
        const auto r = Parallel ? integrate_parallel<std::complex<double>>(m, f, osc, opt)
                                : integrate_serial<std::complex<double>>(m, f, osc, opt);
        benchmark::DoNotOptimize(r.value);
        leaves = r.leaves;
    }
    state.counters["leaves"] = static_cast<double>(leaves);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(leaves));
}
BENCHMARK_TEMPLATE(BM_Quadrature, false)->DenseRange(6, 12, 3)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Quadrature, true)->DenseRange(6, 12, 3)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
