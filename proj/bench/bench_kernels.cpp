// bench_kernels.cpp
// Serial reference kernels against their OpenMP counterparts. Both produce
// bitwise-identical results; only the wall time differs.
#include "idyll/bicharacteristics.hpp"
#include "idyll/lyapunov_perron.hpp"

#include <benchmark/benchmark.h>

using namespace idyll;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void BM_LambdaM(benchmark::State& st) {
    const VectorField3D f = VectorField3D::abc(1.0, 1.0, 1.0);
    for (auto _ : st) {
        benchmark::DoNotOptimize(estimate_lambda_m(f, 1, 20.0, 100, 1, exec_of(st)).value);
    }
    st.SetLabel(st.range(0) ? "openmp" : "serial");
}

void BM_Mu0(benchmark::State& st) {
    const VectorField3D f = VectorField3D::sine_shear(1.0, 0.5);
    for (auto _ : st) {
        benchmark::DoNotOptimize(estimate_mu0(f, 20.0, 100, 1, exec_of(st)).value);
    }
    st.SetLabel(st.range(0) ? "openmp" : "serial");
}

void BM_UnstableGraph(benchmark::State& st) {
    LPOptions opt;
    opt.delta1_safety = 0.9;
    const LPSystem sys = toy_system(-0.9, 0.9, opt);
    for (auto _ : st) {
        benchmark::DoNotOptimize(unstable_graph(sys, 0.1, 21, opt, exec_of(st)).tangency_norm);
    }
    st.SetLabel(st.range(0) ? "openmp" : "serial");
}

}  // namespace

BENCHMARK(BM_LambdaM)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Mu0)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UnstableGraph)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
