#include <benchmark/benchmark.h>

#include "qcurrents/qcurrents.hpp"

using namespace qc;

namespace {

std::vector<double> grid(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

void BM_SteadyStateFock(benchmark::State& state) {
    const LindbladModel m = build(ExampleD{cplx(0.0, 0.3), 0.1, 0.0, 1.0, state.range(0)});
    for (auto _ : state) {
        const Liouvillian l(m);
        benchmark::DoNotOptimize(l.steady_state_vec());
    }
}
BENCHMARK(BM_SteadyStateFock)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_PowerSpectrum(benchmark::State& state) {
    const OpenSystem sys(build(ExampleA{0.2, 1.0, 1.0, 0.1}));
    const auto spec = default_spec(sys.model);
    const auto omega = grid(0.0, 5.0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(power_spectrum(sys, spec, omega));
}
BENCHMARK(BM_PowerSpectrum)->Arg(100)->Arg(1000);

void BM_Scgf(benchmark::State& state) {
    const LindbladModel m = build(ExampleB{0.0, 1.0, 0.25, 0.3, 0.6});
    const auto tilted = tilted_jump(m, default_spec(m));
    const auto chi = grid(-3.14159, 3.14159, 257);
    for (auto _ : state) benchmark::DoNotOptimize(scgf(tilted, chi));
}
BENCHMARK(BM_Scgf);

void BM_RecursiveCumulants(benchmark::State& state) {
    const LindbladModel m = build(ExampleA{0.2, 1.0, 1.0, 0.3});
    const auto tilted = tilted_jump(m, default_spec(m));
    for (auto _ : state) benchmark::DoNotOptimize(cumulants_recursive(tilted, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_RecursiveCumulants)->Arg(4)->Arg(8);

void BM_McwfTrajectory(benchmark::State& state) {
    const LindbladModel m = build(ExampleA{0.0, 1.0, 1.0, 0.0});
    cvec psi = cvec::Zero(2);
    psi(1) = 1.0;
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(mcwf_simulate(m, psi, 100.0, ++seed));
}
BENCHMARK(BM_McwfTrajectory)->Unit(benchmark::kMicrosecond);

void BM_GaussianStats(benchmark::State& state) {
    const GaussianModel g = build_gaussian(ExampleD{cplx(0.0, 0.3), 0.0, 0.0, 1.0, 30});
    const auto omega = grid(0.0, 5.0, 200);
    for (auto _ : state) benchmark::DoNotOptimize(gaussian_jump_stats(g, omega));
}
BENCHMARK(BM_GaussianStats);

}  // namespace

BENCHMARK_MAIN();
