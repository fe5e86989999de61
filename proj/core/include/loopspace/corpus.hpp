#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "loopspace/loops.hpp"
#include "loopspace/manifold.hpp"

namespace loopspace {

enum class CorpusKind { FourierRandom, LipschitzRandom, Triangle, GreatCircle };

CorpusKind parse_corpus_kind(std::string_view name);
std::string to_string(CorpusKind kind);

struct CorpusSpec {
    CorpusKind kind = CorpusKind::FourierRandom;
    std::uint64_t seed = 1;
    int count = 1;
    int dim = 1;       ///< fourier_random / lipschitz_random
    int degree = 5;    ///< fourier_random
    int grid_n = 256;  ///< lipschitz_random / triangle
    std::string manifold = "sphere2"; ///< great_circle
};

/// Deterministic under the seed.  Manifold kinds produce loops whose samples
/// satisfy the manifold constraints exactly (closed geodesics).
std::vector<Loop> generate_corpus(const CorpusSpec& spec);

/// The unit triangle wave 1 - 4 |t - 1/2|, corners at t = 0 and t = 1/2.
GridLoop triangle_wave(int n_samples = 256);

/// Writes loop_000.json ... into the directory; returns the paths.
std::vector<std::filesystem::path> write_corpus(const CorpusSpec& spec,
                                                const std::filesystem::path& dir);

} // namespace loopspace
