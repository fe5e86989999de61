#include "doctest.h"

#include <cmath>
#include <random>

#include "loopspace/corpus.hpp"
#include "loopspace/tubular.hpp"

using namespace loopspace;

namespace {

ManifoldLoop loop_through(const EmbeddedManifold& M, const Vec& start, int nodes,
                          std::uint64_t seed) {
    // A closed geodesic-flavoured loop with gamma(0) = start, exactly on M.
    std::mt19937_64 rng(seed);
    if (M.kind() == ManifoldKind::Sphere2) {
        Vec q = M.random_tangent(start, rng);
        q.normalize();
        Eigen::MatrixXd s(nodes, 3);
        for (int i = 0; i < nodes; ++i) {
            const double t = 2.0 * M_PI * i / nodes;
            s.row(i) = (std::cos(t) * start + std::sin(t) * q).transpose();
        }
        return ManifoldLoop(M, GridLoop(std::move(s), Interp::CubicPeriodic), true);
    }
    if (M.kind() == ManifoldKind::Circle) {
        const double phase = std::atan2(start[1], start[0]);
        Eigen::MatrixXd s(nodes, 2);
        for (int i = 0; i < nodes; ++i) {
            const double t = 2.0 * M_PI * i / nodes + phase;
            s.row(i) << std::cos(t), std::sin(t);
        }
        return ManifoldLoop(M, GridLoop(std::move(s), Interp::CubicPeriodic), true);
    }
    throw std::logic_error("unsupported manifold in test helper");
}

} // namespace

TEST_CASE("section fields from squared partitions") {
    const auto sphere = EmbeddedManifold::sphere2();
    std::mt19937_64 rng(1);
    const Vec x0 = sphere.random_point(rng);
    const TubularSetup setup = TubularSetup::point(sphere, x0, 0.9);

    const auto charts = setup.default_partition();
    CHECK(SectionField::partition_defect(charts) <= 1e-12);

    for (int k = 0; k < 50; ++k) {
        Vec v(2);
        std::normal_distribution<double> gauss(0.0, 1.0);
        v << gauss(rng), gauss(rng);
        const SectionField s(charts, 0.0, v);
        CHECK((s.eval(0.0) - v).norm() <= 1e-12);
    }

    // Zero vector gives the zero section.
    const SectionField z(charts, 0.0, Vec::Zero(2));
    CHECK(z.eval(0.0).norm() == 0.0);

    // A cover whose squares do not sum to one is rejected.
    std::vector<BundleChart> bogus = {
        {Arc{-0.5, 1.5}, [](double) { return Eigen::MatrixXd::Identity(1, 1); },
         [](double) { return 0.5; }}};
    CHECK_THROWS_AS(SectionField(bogus, 0.0, Vec::Ones(1)), PartitionDefect);
}

TEST_CASE("vertical flow") {
    const auto sphere = EmbeddedManifold::sphere2();
    std::mt19937_64 rng(2);
    const Vec x0 = sphere.random_point(rng);
    const TubularSetup setup = TubularSetup::point(sphere, x0, 0.9);
    const auto charts = setup.default_partition();

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        Vec v(2);
        v << gauss(rng), gauss(rng);
        v *= 1.2 * unif(rng) / std::max(v.norm(), 1e-12);
        const VerticalFlow flow{SectionField(charts, 0.0, v)};

        // The anchored vector flows linearly to the origin in unit time.
        CHECK(flow.flow(0.0, v).norm() <= 1e-12);

        // Far fiber points sit outside the cutoff support and stay fixed.
        Vec far = v.norm() > 1e-9 ? v : Vec(Vec::Ones(2));
        far *= std::sqrt(2.5 * (1.0 + v.squaredNorm())) / far.norm();
        CHECK((flow.flow(0.0, far) - far).norm() == 0.0);

        // Inverse flow undoes the forward flow.
        Vec mid = 0.5 * v + 0.1 * Vec(Vec::Ones(2));
        const Vec there = flow.flow(0.0, mid);
        CHECK((flow.flow(0.0, there, /*inverse=*/true) - mid).norm() <= 1e-9);
    }

    // v = 0 induces the identity flow.
    const VerticalFlow idle{SectionField(charts, 0.0, Vec::Zero(2))};
    const Vec probe = (Vec(2) << 0.4, -0.7).finished();
    CHECK((idle.flow(0.0, probe) - probe).norm() == 0.0);
}

TEST_CASE("based trivialisation over a point") {
    const auto sphere = EmbeddedManifold::sphere2();
    std::mt19937_64 rng(3);
    const Vec x0 = sphere.random_point(rng);
    const TubularSetup setup = TubularSetup::point(sphere, x0, 0.9);

    // A loop already based at x0 keeps its basepoint and zero normal.
    const ManifoldLoop based = loop_through(sphere, x0, 128, 31);
    const BasedTrivialization t0 = based_trivialize(setup, based);
    CHECK(t0.normal.norm() <= 1e-12);
    double unchanged = 0.0;
    for (int i = 0; i < based.nodes(); ++i)
        unchanged = std::max(unchanged,
                             (t0.fiber_loop.at_node(i) - based.at_node(i)).norm());
    CHECK(unchanged <= 1e-12);

    // A basepoint inside the tube is flowed onto x0 and the roundtrip
    // reproduces the loop.
    Vec dir = sphere.random_tangent(x0, rng);
    dir *= 0.5 / dir.norm();
    const Vec start = sphere.local_add(x0, dir);
    const ManifoldLoop alpha = loop_through(sphere, start, 128, 32);
    const BasedTrivialization triv = based_trivialize(setup, alpha);
    CHECK((triv.fiber_loop.at_node(0) - x0).norm() <= 1e-6);
    CHECK(triv.normal.norm() > 0.0);

    const ManifoldLoop back =
        based_trivialize_inverse(setup, triv.fiber_loop, triv.base_param, triv.normal);
    double rt = 0.0;
    for (int i = 0; i < alpha.nodes(); ++i)
        rt = std::max(rt, (back.at_node(i) - alpha.at_node(i)).norm());
    CHECK(rt <= 1e-6);

    // The evaluation fibration intertwines the structure.
    CHECK((back.at_node(0) - setup.from_normal(triv.base_param, triv.normal)).norm() <=
          1e-6);

    // Basepoints outside the tube are rejected.
    Vec away = sphere.random_tangent(x0, rng);
    away *= 1.8 / away.norm();
    const ManifoldLoop outside = loop_through(sphere, sphere.local_add(x0, away), 128, 33);
    CHECK_THROWS_AS((void)based_trivialize(setup, outside), BasepointOutsideU);
}

TEST_CASE("based trivialisation over the torus sub-circle") {
    const TubularSetup setup = TubularSetup::torus_subcircle(
        (Eigen::Vector2d() << 1.0, 0.0).finished(), 0.9);
    const auto charts = setup.default_partition();
    CHECK(charts.size() == 2);
    CHECK(SectionField::partition_defect(charts) <= 1e-12);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        const double p = unif(rng);
        Vec v(1);
        v[0] = 2.0 * unif(rng) - 1.0;
        const SectionField s(charts, p, v);
        CHECK((s.eval(p) - v).norm() <= 1e-12);
    }

    // Loop wandering in and out of the tube: in-tube points flow, the rest
    // stay fixed, and the inverse restores everything.
    const int n = 256;
    Eigen::MatrixXd samples(n, 4);
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / n;
        const double a = 2.0 * M_PI * t;
        const double b = 0.3 + 1.4 * std::sin(2.0 * M_PI * t);
        samples.row(i) << std::cos(a), std::sin(a), std::cos(b), std::sin(b);
    }
    const ManifoldLoop alpha(EmbeddedManifold::flat_torus2(),
                             GridLoop(std::move(samples), Interp::CubicPeriodic));
    REQUIRE(setup.in_tube(alpha.at_node(0)));

    const BasedTrivialization triv = based_trivialize(setup, alpha);
    // The new basepoint lies on P: second block at the anchor circle point.
    CHECK(std::abs(std::atan2(triv.fiber_loop.at_node(0)[3],
                              triv.fiber_loop.at_node(0)[2])) <= 1e-6);

    const ManifoldLoop back =
        based_trivialize_inverse(setup, triv.fiber_loop, triv.base_param, triv.normal);
    double rt = 0.0;
    for (int i = 0; i < n; ++i)
        rt = std::max(rt, (back.at_node(i) - alpha.at_node(i)).norm());
    CHECK(rt <= 1e-6);

    // Points outside the tube were untouched by the forward map.
    for (int i = 0; i < n; ++i) {
        if (!setup.in_tube(alpha.at_node(i)))
            CHECK((triv.fiber_loop.at_node(i) - alpha.at_node(i)).norm() == 0.0);
    }
}
