#include "doctest.h"

#include <cmath>
#include <random>

#include "loopspace/actions.hpp"
#include "loopspace/corpus.hpp"

using namespace loopspace;

namespace {

FourierLoop random_fourier(std::uint64_t seed, int degree, int dim) {
    CorpusSpec spec{CorpusKind::FourierRandom, seed, 1, dim, degree, 256, ""};
    return std::get<FourierLoop>(generate_corpus(spec).front());
}

} // namespace

TEST_CASE("rotation basics") {
    const Vec c = (Vec(2) << 1.0, -2.0).finished();
    for (double s : {0.0, 0.3, 0.99}) {
        const FourierLoop r = rotate(FourierLoop::constant(c), s);
        CHECK((r.evaluate(0.5) - c).norm() == 0.0);
    }

    // Half-turn flips the fundamental cosine.
    const FourierLoop flipped = rotate(FourierLoop::cosine(1), 0.5);
    CHECK(seminorm(flipped + FourierLoop::cosine(1), 0) <= 1e-12);

    // Group law.
    const FourierLoop f = random_fourier(1, 4, 2);
    double defect = 0.0;
    for (auto [a, b] : {std::pair{0.37, 0.21}, {0.9, 0.35}, {0.125, 0.125}})
        defect = std::max(defect, seminorm(rotate(rotate(f, a), b) - rotate(f, a + b), 0));
    CHECK(defect <= 1e-12);
    CHECK(seminorm(rotate(f, 0.0) - f, 0) == 0.0);
}

TEST_CASE("rotations keep manifold loops on the manifold") {
    const auto sphere = EmbeddedManifold::sphere2();
    CorpusSpec spec{CorpusKind::GreatCircle, 7, 1, 1, 5, 128, "sphere2"};
    const ManifoldLoop loop(sphere, generate_corpus(spec).front(), true, 128);
    for (double s : {0.25, 0.3331}) {
        const ManifoldLoop rotated = rotate_manifold_loop(loop, s);
        for (int i = 0; i < rotated.nodes(); ++i)
            CHECK(sphere.constraint_residual(rotated.at_node(i)) <= 1e-10);
    }
}

TEST_CASE("precomposition by circle diffeomorphisms") {
    const FourierLoop f = random_fourier(11, 2, 1);

    // Identity and rigid rotations are exact.
    const Loop same = precompose(Loop(f), CircleDiffeo::identity());
    CHECK(seminorm(std::get<FourierLoop>(same) - f, 0) == 0.0);
    const Loop shifted = precompose(Loop(f), CircleDiffeo::rotation_lift(0.3));
    CHECK(seminorm(std::get<FourierLoop>(shifted) - rotate(f, 0.3), 0) == 0.0);

    // Small-displacement roundtrip against a bisection-inverse oracle.
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(4, 1);
    d(1, 0) = std::complex<double>(0.006, -0.004);
    d(3, 0) = std::complex<double>(0.002, 0.003);
    const CircleDiffeo psi{FourierLoop(d)};
    const Loop pushed = precompose(Loop(f), psi, 2048);

    auto oracle_inverse = [&](double y) {
        double lo = y - 0.1, hi = y + 0.1;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (mid + psi.displacement().evaluate(mid)[0] < y ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    double worst = 0.0;
    for (int j = 0; j < 512; ++j) {
        const double t = static_cast<double>(j) / 512;
        const Vec back = evaluate(pushed, oracle_inverse(t));
        worst = std::max(worst, (back - f.evaluate(t)).norm());
    }
    CHECK(worst <= 1e-8);

    // Monotonicity is certified at construction.
    Eigen::MatrixXcd steep = Eigen::MatrixXcd::Zero(2, 1);
    steep(1, 0) = 0.2; // displacement cos term with slope 2 pi * 0.4 > 1
    CHECK_THROWS_AS(CircleDiffeo{FourierLoop(steep)}, MonotonicityViolation);
}

TEST_CASE("seminorm invariance under rotation") {
    const FourierLoop f = random_fourier(21, 4, 2);
    CHECK(norm_invariance_residual(Loop(f), 0.411, 0) <= 1e-12);
    CHECK(norm_invariance_residual(Loop(FourierLoop::cosine(1)), 0.37, 3) <= 1e-10);
    CHECK(norm_invariance_residual(Loop(FourierLoop::zero(2, 3)), 0.7, 2) == 0.0);
}

TEST_CASE("orbit modulus of continuity") {
    const Loop constant{FourierLoop::constant((Vec(1) << 4.2).finished())};
    CHECK(orbit_modulus(constant, 0.05) == 0.25);

    const Loop cosloop{FourierLoop::cosine(1)};
    const double d0 = orbit_modulus(cosloop, 0.1, 0);
    CHECK(std::abs(d0 * 2.0 * M_PI / 0.1 - 1.0) <= 0.15); // Lipschitz oracle
    const double d1 = orbit_modulus(cosloop, 0.1, 1);
    CHECK(d1 <= d0 / 4.0); // the derivative costs another factor 2 pi

    CHECK_THROWS_AS((void)orbit_modulus(cosloop, 1e-9, 0), ResolutionTooCoarse);
}

TEST_CASE("discontinuity witness achieves the bound 2") {
    const DiscontinuityWitness w03 = discontinuity_witness(0.3);
    CHECK(w03.n == 4);
    CHECK(w03.h == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(w03.lower_bound == 2.0);
    CHECK(std::abs(w03.achieved_ratio - 2.0) <= 1e-12);

    const DiscontinuityWitness tiny = discontinuity_witness(0.001);
    CHECK(tiny.n == 1001);
    CHECK(std::abs(tiny.achieved_ratio - 2.0) <= 1e-12);

    // Sanity: |gamma| = 1 and |(I - R_h) gamma| = 2.
    CHECK(std::abs(seminorm(w03.loop, 0) - 1.0) <= 1e-12);
    CHECK(std::abs(seminorm(w03.loop - rotate(w03.loop, w03.h), 0) - 2.0) <= 1e-12);
}

TEST_CASE("operator norm lower bounds from probes") {
    OperatorProbe probe;
    for (int k = 1; k <= 4; ++k) probe.members.emplace_back(FourierLoop::cosine(k));
    probe.order = 0;

    const double ident = operator_norm_lower_bound([](const Loop& g) { return g; }, probe);
    CHECK(ident == doctest::Approx(1.0).epsilon(1e-12));

    const int n = 4;
    const double h = 1.0 / (2.0 * n);
    const double flip = operator_norm_lower_bound(
        [&](const Loop& g) {
            return Loop(std::get<FourierLoop>(g) - rotate(std::get<FourierLoop>(g), h));
        },
        probe);
    CHECK(flip >= 2.0 - 1e-12);

    const double iso = operator_norm_lower_bound(
        [](const Loop& g) { return rotate(g, 0.377); }, probe);
    CHECK(std::abs(iso - 1.0) <= 1e-12);

    OperatorProbe zeros;
    zeros.members.emplace_back(FourierLoop::zero(1, 3));
    CHECK_THROWS_AS((void)operator_norm_lower_bound([](const Loop& g) { return g; },
                                                    zeros),
                    ZeroProbe);
}

TEST_CASE("orbit smoothness dichotomy") {
    const OrbitSmoothnessReport smooth =
        orbit_smoothness_probe(Loop(FourierLoop::cosine(1)), 2);
    CHECK(smooth.smooth_compatible);
    CHECK(std::abs(smooth.per_order[0].quotient_norms[2] - 2.0 * M_PI) <= 0.05);
    CHECK(smooth.per_order[0].order_estimate >= 1.9);

    const OrbitSmoothnessReport rough =
        orbit_smoothness_probe(Loop(triangle_wave(256)), 1);
    CHECK_FALSE(rough.smooth_compatible);
    CHECK(rough.per_order[0].order_estimate < 1.5);

    const OrbitSmoothnessReport idle = orbit_smoothness_probe(
        Loop(FourierLoop::constant((Vec(1) << 2.0).finished())), 2);
    CHECK(idle.smooth_compatible);
    CHECK(idle.per_order[0].quotient_norms[2] <= 1e-12);
}

TEST_CASE("continuity reports per space") {
    CorpusSpec smooth_spec{CorpusKind::FourierRandom, 31, 6, 1, 3, 256, ""};
    const ContinuityReport smooth =
        continuity_report(SpaceTag::Smooth, generate_corpus(smooth_spec));
    for (const auto& lv : smooth.levels) CHECK(lv.status != "refuted");
    CHECK(smooth.levels.back().status == "not-testable");

    CorpusSpec rough_spec{CorpusKind::LipschitzRandom, 32, 6, 1, 3, 256, ""};
    auto corpus = generate_corpus(rough_spec);
    for (auto& loop : corpus)
        loop = std::get<GridLoop>(loop).with_interp(Interp::Linear);
    const ContinuityReport c0 = continuity_report(SpaceTag::C0, corpus, 0.3);
    CHECK(c0.levels.front().level == "i");
    CHECK(c0.levels.front().status == "refuted");
    REQUIRE(c0.levels.front().witness.has_value());
    CHECK(c0.levels.front().witness->lower_bound == 2.0);
    for (std::size_t i = 1; i < c0.levels.size(); ++i)
        CHECK(c0.levels[i].status == "verified-at-scale");

    const std::string json = c0.to_json_string();
    CHECK(json.find("refuted") != std::string::npos);

    CHECK_THROWS_AS((void)continuity_report(SpaceTag::C0, {}, 0.3), EmptyCorpus);
}

TEST_CASE("e0 reduction identity") {
    const FourierLoop f = random_fourier(41, 3, 2);
    double worst = 0.0;
    for (double t : {0.0, 0.2, 0.456, 0.9})
        worst = std::max(worst, (rotate(f, t).evaluate(0.0) - f.evaluate(t)).norm());
    CHECK(worst <= 1e-12);

    const GridLoop g = to_grid(Loop(f), 128);
    double gworst = 0.0;
    for (double t : {0.25, 0.5})
        gworst = std::max(gworst, (rotate(g, t).evaluate(0.0) - g.evaluate(t)).norm());
    CHECK(gworst <= 1e-12);
}
