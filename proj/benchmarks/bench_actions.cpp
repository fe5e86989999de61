#include <benchmark/benchmark.h>

#include "loopspace/actions.hpp"
#include "loopspace/corpus.hpp"

using namespace loopspace;

static void BM_RotateFourier(benchmark::State& state) {
    CorpusSpec spec{CorpusKind::FourierRandom, 1, 1, 2,
                    static_cast<int>(state.range(0)), 256, ""};
    const FourierLoop f = std::get<FourierLoop>(generate_corpus(spec).front());
    double s = 0.0;
    for (auto _ : state) {
        s += 0.37;
        benchmark::DoNotOptimize(rotate(f, s));
    }
}
BENCHMARK(BM_RotateFourier)->Arg(4)->Arg(16);

static void BM_SeminormSup(benchmark::State& state) {
    CorpusSpec spec{CorpusKind::FourierRandom, 2, 1, 2,
                    static_cast<int>(state.range(0)), 256, ""};
    const FourierLoop f = std::get<FourierLoop>(generate_corpus(spec).front());
    for (auto _ : state) benchmark::DoNotOptimize(seminorm(f, 3));
}
BENCHMARK(BM_SeminormSup)->Arg(4)->Arg(16);

static void BM_OrbitModulus(benchmark::State& state) {
    const Loop cosloop{FourierLoop::cosine(1)};
    for (auto _ : state) benchmark::DoNotOptimize(orbit_modulus(cosloop, 0.1, 0));
}
BENCHMARK(BM_OrbitModulus);

static void BM_ContinuityReport(benchmark::State& state) {
    CorpusSpec spec{CorpusKind::FourierRandom, 3, 4, 1, 3, 256, ""};
    const auto corpus = generate_corpus(spec);
    for (auto _ : state)
        benchmark::DoNotOptimize(continuity_report(SpaceTag::Smooth, corpus));
}
BENCHMARK(BM_ContinuityReport);
