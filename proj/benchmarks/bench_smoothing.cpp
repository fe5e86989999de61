#include <benchmark/benchmark.h>

#include "loopspace/corpus.hpp"
#include "loopspace/smoothing.hpp"

using namespace loopspace;

static void BM_DeltaGauge(benchmark::State& state) {
    const GridLoop tri = triangle_wave(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(delta_of(tri, 0.05));
}
BENCHMARK(BM_DeltaGauge)->Arg(256)->Arg(1024);

static void BM_MollifyDirect(benchmark::State& state) {
    const GridLoop tri = triangle_wave(static_cast<int>(state.range(0)));
    const double delta = delta_of(tri, 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(mollify_fixed_delta(tri, delta));
}
BENCHMARK(BM_MollifyDirect)->Arg(256)->Arg(1024);

static void BM_MollifyFFT(benchmark::State& state) {
    const GridLoop tri = triangle_wave(static_cast<int>(state.range(0)));
    const double delta = delta_of(tri, 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(mollify_fft(tri, delta));
}
BENCHMARK(BM_MollifyFFT)->Arg(256)->Arg(1024);

static void BM_HomotopyEval(benchmark::State& state) {
    const auto sphere = EmbeddedManifold::sphere2();
    CorpusSpec spec{CorpusKind::GreatCircle, 7, 1, 1, 5, 256, "sphere2"};
    const ManifoldLoop gamma(sphere, generate_corpus(spec).front(), true, 256);
    const ManifoldLoop center =
        mollify_to_manifold(gamma, MollifierParams::for_manifold(sphere));
    double s = 0.0;
    for (auto _ : state) {
        s += 0.125;
        if (s > 1.0) s = 0.0;
        benchmark::DoNotOptimize(homotopy_eval(gamma, center, s));
    }
}
BENCHMARK(BM_HomotopyEval);
