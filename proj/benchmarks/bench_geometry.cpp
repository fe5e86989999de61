#include <benchmark/benchmark.h>

#include <random>

#include "loopspace/manifold.hpp"

using namespace loopspace;

namespace {

EmbeddedManifold pick(int idx) {
    switch (idx) {
        case 0: return EmbeddedManifold::circle();
        case 1: return EmbeddedManifold::sphere2();
        default: return EmbeddedManifold::flat_torus2();
    }
}

} // namespace

static void BM_ExpLogRoundtrip(benchmark::State& state) {
    const EmbeddedManifold M = pick(static_cast<int>(state.range(0)));
    std::mt19937_64 rng(1);
    std::vector<std::pair<Vec, Vec>> pairs;
    while (pairs.size() < 256) {
        const Vec u = M.random_point(rng), q = M.random_point(rng);
        if (M.diagonal_nbhd_contains(u, q)) pairs.emplace_back(u, q);
    }
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& [u, q] = pairs[i++ & 255];
        benchmark::DoNotOptimize(M.local_add(u, M.local_add_inverse(u, q)));
    }
}
BENCHMARK(BM_ExpLogRoundtrip)->Arg(0)->Arg(1)->Arg(2);

static void BM_TransportClosedForm(benchmark::State& state) {
    const EmbeddedManifold M = EmbeddedManifold::sphere2();
    std::mt19937_64 rng(2);
    const Vec u = M.random_point(rng);
    Vec p = M.random_tangent(u, rng);
    p *= 1.5 / p.norm();
    const Vec w = M.random_tangent(u, rng);
    for (auto _ : state) benchmark::DoNotOptimize(M.parallel_transport(u, p, w));
}
BENCHMARK(BM_TransportClosedForm);

static void BM_TransportRK4(benchmark::State& state) {
    const EmbeddedManifold M = EmbeddedManifold::sphere2();
    std::mt19937_64 rng(3);
    const Vec u = M.random_point(rng);
    Vec p = M.random_tangent(u, rng);
    p *= 1.5 / p.norm();
    const Vec w = M.random_tangent(u, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(M.parallel_transport_rk4(u, p, w, state.range(0)));
}
BENCHMARK(BM_TransportRK4)->Arg(16)->Arg(64)->Arg(256);
