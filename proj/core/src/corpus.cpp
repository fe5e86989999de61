#include "loopspace/corpus.hpp"

#include <cmath>
#include <random>

#include "loopspace/io.hpp"

namespace loopspace {

CorpusKind parse_corpus_kind(std::string_view name) {
    if (name == "fourier_random") return CorpusKind::FourierRandom;
    if (name == "lipschitz_random") return CorpusKind::LipschitzRandom;
    if (name == "triangle") return CorpusKind::Triangle;
    if (name == "great_circle") return CorpusKind::GreatCircle;
    throw ConfigError("unknown corpus kind: " + std::string(name));
}

std::string to_string(CorpusKind kind) {
    switch (kind) {
        case CorpusKind::FourierRandom: return "fourier_random";
        case CorpusKind::LipschitzRandom: return "lipschitz_random";
        case CorpusKind::Triangle: return "triangle";
        case CorpusKind::GreatCircle: return "great_circle";
    }
    return {};
}

GridLoop triangle_wave(int n_samples) {
    Eigen::MatrixXd s(n_samples, 1);
    for (int i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i) / n_samples;
        s(i, 0) = 1.0 - 4.0 * std::abs(t - 0.5);
    }
    return GridLoop(std::move(s), Interp::Linear);
}

namespace {

FourierLoop random_fourier(std::mt19937_64& rng, int dim, int degree) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd c(degree + 1, dim);
    for (int d = 0; d < dim; ++d) {
        c(0, d) = 0.3 * gauss(rng);
        for (int k = 1; k <= degree; ++k) {
            const double scale = 0.3 * std::pow(0.5, k - 1);
            c(k, d) = std::complex<double>(scale * gauss(rng), scale * gauss(rng));
        }
    }
    return FourierLoop(std::move(c));
}

/// Piecewise-linear loop through random knots; amplitudes are kept small so
/// the slope stays mollifiable at tight closeness targets.
GridLoop random_lipschitz(std::mt19937_64& rng, int dim, int grid_n) {
    std::uniform_real_distribution<double> unif(-0.1, 0.1);
    const int knots = 8;
    Eigen::MatrixXd k(knots, dim);
    for (int i = 0; i < knots; ++i)
        for (int d = 0; d < dim; ++d) k(i, d) = unif(rng);

    Eigen::MatrixXd s(grid_n, dim);
    for (int i = 0; i < grid_n; ++i) {
        const double pos = static_cast<double>(i) / grid_n * knots;
        const int a = static_cast<int>(std::floor(pos));
        const double f = pos - a;
        s.row(i) = (1.0 - f) * k.row(a % knots) + f * k.row((a + 1) % knots);
    }
    return GridLoop(std::move(s), Interp::CubicPeriodic);
}

FourierLoop great_circle_loop(std::mt19937_64& rng, const EmbeddedManifold& M) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> winding(-2, 2);
    const std::complex<double> I(0.0, 1.0);

    switch (M.kind()) {
        case ManifoldKind::Sphere2: {
            Vec e(3), f(3);
            do {
                for (int i = 0; i < 3; ++i) e[i] = gauss(rng);
            } while (e.norm() < 1e-6);
            e.normalize();
            do {
                for (int i = 0; i < 3; ++i) f[i] = gauss(rng);
                f -= f.dot(e) * e;
            } while (f.norm() < 1e-6);
            f.normalize();
            Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(2, 3);
            for (int d = 0; d < 3; ++d) c(1, d) = 0.5 * (e[d] - I * f[d]);
            return FourierLoop(std::move(c));
        }
        case ManifoldKind::Circle: {
            const double phase = unif(rng);
            Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(2, 2);
            const auto w = std::polar(0.5, 2.0 * M_PI * phase);
            c(1, 0) = w;
            c(1, 1) = -I * w;
            return FourierLoop(std::move(c));
        }
        case ManifoldKind::FlatTorus2: {
            int k1 = winding(rng), k2 = winding(rng);
            if (k1 == 0 && k2 == 0) k1 = 1;
            const double p1 = unif(rng), p2 = unif(rng);
            const int degree = std::max(std::abs(k1), std::abs(k2));
            Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(degree + 1, 4);
            auto put = [&](int k, int col0, double phase) {
                // cos / sin pair of winding k; negative windings conjugate.
                const auto w = std::polar(0.5, 2.0 * M_PI * phase);
                if (k == 0) {
                    c(0, col0) = std::cos(2.0 * M_PI * phase);
                    c(0, col0 + 1) = std::sin(2.0 * M_PI * phase);
                } else if (k > 0) {
                    c(k, col0) = w;
                    c(k, col0 + 1) = -I * w;
                } else {
                    c(-k, col0) = std::conj(w);
                    c(-k, col0 + 1) = -I * std::conj(w) * -1.0;
                }
            };
            put(k1, 0, p1);
            put(k2, 2, p2);
            return FourierLoop(std::move(c));
        }
        default:
            throw ConfigError("great_circle corpus needs a compact manifold");
    }
}

} // namespace

std::vector<Loop> generate_corpus(const CorpusSpec& spec) {
    if (spec.count < 1) throw ConfigError("corpus count must be >= 1");
    std::mt19937_64 rng(spec.seed);
    std::vector<Loop> out;
    out.reserve(spec.count);
    for (int i = 0; i < spec.count; ++i) {
        switch (spec.kind) {
            case CorpusKind::FourierRandom:
                out.emplace_back(random_fourier(rng, spec.dim, spec.degree));
                break;
            case CorpusKind::LipschitzRandom:
                out.emplace_back(random_lipschitz(rng, spec.dim, spec.grid_n));
                break;
            case CorpusKind::Triangle:
                out.emplace_back(triangle_wave(spec.grid_n));
                break;
            case CorpusKind::GreatCircle:
                out.emplace_back(
                    great_circle_loop(rng, EmbeddedManifold::parse(spec.manifold)));
                break;
        }
    }
    return out;
}

std::vector<std::filesystem::path> write_corpus(const CorpusSpec& spec,
                                                const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto corpus = generate_corpus(spec);
    std::vector<std::filesystem::path> paths;
    paths.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "loop_%03zu.json", i);
        auto path = dir / name;
        write_loop(path, corpus[i]);
        paths.push_back(std::move(path));
    }
    return paths;
}

} // namespace loopspace
