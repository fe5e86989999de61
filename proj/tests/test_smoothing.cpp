#include "doctest.h"

#include <cmath>
#include <random>

#include "loopspace/corpus.hpp"
#include "loopspace/smoothing.hpp"

using namespace loopspace;

namespace {

GridLoop sampled(const std::function<double(double)>& f, int n) {
    Eigen::MatrixXd s(n, 1);
    for (int i = 0; i < n; ++i) s(i, 0) = f(static_cast<double>(i) / n);
    return GridLoop(std::move(s), Interp::Linear);
}

double sup_gap(const GridLoop& smooth, const GridLoop& original) {
    double worst = 0.0;
    for (int i = 0; i < smooth.size(); ++i) {
        const double t = static_cast<double>(i) / smooth.size();
        worst = std::max(worst, (smooth.sample(i) - original.evaluate(t)).norm());
    }
    return worst;
}

} // namespace

TEST_CASE("bump function and plateau cutoff") {
    const auto& bump = BumpFunction::standard();
    CHECK(std::abs(bump.integral(20000) - 1.0) <= 1e-10);
    CHECK(bump.value(1.0) == 0.0);
    CHECK(bump.value(-1.2) == 0.0);
    CHECK(bump.value(0.0) > 0.0);

    CHECK(plateau(0.0) == 1.0);
    CHECK(plateau(1.0) == 1.0);
    CHECK(plateau(0.7) == 1.0);
    CHECK(plateau(2.0) == 0.0);
    CHECK(plateau(3.5) == 0.0);
    double prev = 1.0;
    for (int i = 0; i <= 100; ++i) {
        const double x = 1.0 + i / 100.0;
        const double v = plateau(x);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
}

TEST_CASE("certified manifold constants") {
    const auto constants = manifold_constants(EmbeddedManifold::sphere2());
    CHECK(constants.mu > 0.0);
    CHECK(constants.eps_tube > 0.0);
    CHECK(constants.pairs_tested > 100);
    CHECK(constants.tube_points_tested > 100);

    // Chord/arc oracle on the circle: mu = 2 sin(arc/2).
    const auto circle = EmbeddedManifold::circle();
    const auto c = manifold_constants(circle);
    CHECK(c.mu == doctest::Approx(2.0 * std::sin(0.45 * M_PI)).epsilon(1e-12));

    CHECK_THROWS_AS((void)manifold_constants(EmbeddedManifold::euclidean(3)),
                    NoCompactness);
}

TEST_CASE("oscillation gauge delta") {
    const GridLoop cosg = sampled([](double t) { return std::cos(2.0 * M_PI * t); }, 256);

    // Lipschitz oracle: any delta below eps / (2 pi) certifies.
    CHECK(delta_certificate(cosg, 0.1, 0.1 / (2.0 * M_PI) * 0.99));
    const double delta = delta_of(cosg, 0.1);
    CHECK(delta >= 1.0 / 256);
    CHECK(delta <= 0.1 / (2.0 * M_PI) + 1e-12);
    CHECK(delta_certificate(cosg, 0.1, delta));

    const GridLoop flat = GridLoop::constant((Vec(1) << 3.0).finished(), 64);
    CHECK(delta_of(flat, 0.05) == 0.25);

    // Triangle wave: slope oracle.
    const GridLoop tri = triangle_wave(256);
    const double dt = delta_of(tri, 0.05);
    CHECK(dt <= 0.05 / 4.0 + 1e-12);
    CHECK(delta_certificate(tri, 0.05, dt));

    CHECK_THROWS_AS((void)delta_of(cosg, 1e-5), ResolutionTooCoarse);
}

TEST_CASE("mollification closeness and exactness on constants") {
    const Vec c = (Vec(2) << 0.3, -1.1).finished();
    const GridLoop constant = GridLoop::constant(c, 128);
    const GridLoop rc = mollify(constant, 0.1);
    CHECK((rc.samples().rowwise() - c.transpose()).cwiseAbs().maxCoeff() == 0.0);

    const GridLoop tri = triangle_wave(256);
    CHECK(sup_gap(mollify(tri, 0.05), tri) < 0.05);

    const GridLoop cosg = sampled([](double t) { return std::cos(2.0 * M_PI * t); }, 256);
    CHECK(sup_gap(mollify(cosg, 0.1), cosg) < 0.1);
}

TEST_CASE("mollifier corpus closeness at two scales") {
    CorpusSpec spec;
    spec.kind = CorpusKind::LipschitzRandom;
    spec.seed = 99;
    spec.count = 10;
    spec.dim = 2;
    spec.grid_n = 256;
    for (const auto& loop : generate_corpus(spec)) {
        const GridLoop& g = std::get<GridLoop>(loop);
        CHECK(sup_gap(mollify(g, 0.1), g) < 0.1);
    }
    // The tight scale needs the finer grid.
    spec.grid_n = 1024;
    spec.count = 3;
    for (const auto& loop : generate_corpus(spec)) {
        const GridLoop& g = std::get<GridLoop>(loop);
        CHECK(sup_gap(mollify(g, 0.01), g) < 0.01);
    }
}

TEST_CASE("derivative identity, periodicity, spectral agreement") {
    const GridLoop cosg = sampled([](double t) { return std::cos(2.0 * M_PI * t); }, 256);
    const double delta = delta_of(cosg, 0.1);

    CHECK(derivative_identity_residual(cosg, delta) <= 1e-6);

    const GridLoop rc = mollify_fixed_delta(cosg, delta);
    for (double t : {0.0, 0.25, 0.625})
        CHECK((rc.evaluate(t + 1.0) - rc.evaluate(t)).norm() == 0.0);

    const GridLoop fft = mollify_fft(cosg, delta);
    CHECK((fft.samples() - rc.samples()).cwiseAbs().maxCoeff() <= 1e-8);

    // Translation invariance at fixed scale, node-aligned shift.
    const GridLoop tri = triangle_wave(256);
    const double dt = delta_of(tri, 0.05);
    Eigen::MatrixXd shifted(256, 1);
    for (int i = 0; i < 256; ++i) shifted.row(i) = tri.samples().row((i + 64) % 256);
    const GridLoop rot(shifted, Interp::Linear);
    const GridLoop a = mollify_fixed_delta(rot, dt);
    const GridLoop b = mollify_fixed_delta(tri, dt);
    double worst = 0.0;
    for (int i = 0; i < a.size(); ++i)
        worst = std::max(worst, (a.sample(i) - b.sample(i + 256)).norm());
    CHECK(worst <= 1e-10);
}

TEST_CASE("mollified loops are spectrally smooth") {
    // The tail claim needs the quadrature to resolve the kernel; at the
    // default Q = 4N this holds once N carries ~50 taps across the support.
    const GridLoop tri = triangle_wave(1024);
    const GridLoop smooth = mollify(tri, 0.1);
    CHECK(fourier_tail_sup(smooth, smooth.size() / 4) <= 1e-8);

    // Refining the quadrature collapses the tail further.
    const GridLoop finer = mollify(tri, 0.05, 16 * 1024);
    CHECK(fourier_tail_sup(finer, finer.size() / 4) <= 1e-10);
}

TEST_CASE("based mollifier") {
    const GridLoop zero = GridLoop::constant(Vec::Zero(1), 64);
    const GridLoop rz = mollify_based(zero, 0.1);
    CHECK(rz.samples().cwiseAbs().maxCoeff() == 0.0);

    const GridLoop sing = sampled([](double t) { return std::sin(2.0 * M_PI * t); }, 256);
    const GridLoop based = mollify_based(sing, 0.1);
    CHECK(based.sample(0).norm() == 0.0);
    CHECK(sup_gap(based, sing) < 0.1);

    const GridLoop cosg = sampled([](double t) { return std::cos(2.0 * M_PI * t); }, 256);
    CHECK_THROWS_AS((void)mollify_based(cosg, 0.1), NotBased);
}

TEST_CASE("manifold mollification") {
    const auto sphere = EmbeddedManifold::sphere2();
    const MollifierParams params = MollifierParams::for_manifold(sphere);

    // A band-limited great circle barely moves.
    CorpusSpec spec{CorpusKind::GreatCircle, 5, 1, 1, 5, 256, "sphere2"};
    const ManifoldLoop smooth(sphere, generate_corpus(spec).front(), true, 256);
    const ManifoldLoop rs = mollify_to_manifold(smooth, params);
    double move = 0.0;
    for (int i = 0; i < rs.nodes(); ++i)
        move = std::max(move, (rs.at_node(i) - smooth.at_node(i)).norm());
    CHECK(move < params.mu);

    // A noisy equator lands on the sphere with the V-membership certificate.
    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd noisy(256, 3);
    for (int i = 0; i < 256; ++i) {
        const double t = 2.0 * M_PI * i / 256.0;
        Vec x(3);
        x << std::cos(t), std::sin(t), 0.0;
        Vec w(3);
        for (int d = 0; d < 3; ++d) w[d] = gauss(rng);
        noisy.row(i) = sphere.project(x + 0.03 * w).transpose();
    }
    const ManifoldLoop gamma(sphere, GridLoop(std::move(noisy), Interp::Linear));
    const ManifoldLoop rm = mollify_to_manifold(gamma, params);
    CHECK(rm.smooth_certified());
    double residual = 0.0;
    for (int i = 0; i < rm.nodes(); ++i) {
        residual = std::max(residual, sphere.constraint_residual(rm.at_node(i)));
        CHECK(sphere.diagonal_nbhd_contains(gamma.at_node(i), rm.at_node(i)));
    }
    CHECK(residual <= 1e-12);

    // Constant loops stay put.
    const Vec x0 = sphere.random_point(rng);
    const ManifoldLoop constant(sphere, GridLoop::constant(x0, 64));
    const ManifoldLoop rc = mollify_to_manifold(constant, params);
    double cgap = 0.0;
    for (int i = 0; i < rc.nodes(); ++i)
        cgap = std::max(cgap, (rc.at_node(i) - x0).norm());
    CHECK(cgap <= 1e-12);
}

TEST_CASE("homotopy between a loop and its mollification") {
    const auto sphere = EmbeddedManifold::sphere2();
    const MollifierParams params = MollifierParams::for_manifold(sphere);

    std::mt19937_64 rng(37);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd noisy(256, 3);
    for (int i = 0; i < 256; ++i) {
        const double t = 2.0 * M_PI * i / 256.0;
        Vec x(3);
        x << std::cos(t), 0.0, -std::sin(t);
        Vec w(3);
        for (int d = 0; d < 3; ++d) w[d] = gauss(rng);
        noisy.row(i) = sphere.project(x + 0.02 * w).transpose();
    }
    const ManifoldLoop gamma(sphere, GridLoop(std::move(noisy), Interp::Linear));
    const ManifoldLoop center = mollify_to_manifold(gamma, params);

    auto gap = [](const ManifoldLoop& a, const ManifoldLoop& b) {
        double worst = 0.0;
        for (int i = 0; i < a.nodes(); ++i)
            worst = std::max(worst, (a.at_node(i) - b.at_node(i)).norm());
        return worst;
    };
    CHECK(gap(homotopy_eval(gamma, center, 1.0), gamma) <= 1e-9);
    CHECK(gap(homotopy_eval(gamma, center, 0.0), center) <= 1e-9);

    for (int k = 0; k <= 8; ++k) {
        const ManifoldLoop h = homotopy_eval(gamma, center, k / 8.0);
        for (int i = 0; i < h.nodes(); ++i) {
            CHECK(sphere.constraint_residual(h.at_node(i)) <= 1e-12);
            CHECK(sphere.diagonal_nbhd_contains(center.at_node(i), h.at_node(i)));
        }
    }
}
