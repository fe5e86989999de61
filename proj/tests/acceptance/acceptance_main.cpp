// Acceptance gate: one binary, one pass/fail line per criterion, exit 0 only
// if every criterion holds at its stated tolerance.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "loopspace/atlas.hpp"
#include "loopspace/corpus.hpp"
#include "loopspace/io.hpp"
#include "loopspace/smoothing.hpp"
#include "loopspace/suites.hpp"
#include "loopspace/tubular.hpp"

using namespace loopspace;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %d. %s: %s\n", ok ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

double loop_gap(const ManifoldLoop& a, const ManifoldLoop& b) {
    double worst = 0.0;
    for (int i = 0; i < a.nodes(); ++i)
        worst = std::max(worst, (a.at_node(i) - b.at_node(i)).norm());
    return worst;
}

ManifoldLoop great_circle(const EmbeddedManifold& M, std::uint64_t seed, int nodes) {
    CorpusSpec spec{CorpusKind::GreatCircle, seed, 1, 1, 5, nodes, M.spec_string()};
    return ManifoldLoop(M, generate_corpus(spec).front(), true, nodes);
}

ManifoldLoop smooth_center_for(const EmbeddedManifold& M, std::uint64_t seed, int nodes) {
    if (M.compact()) return great_circle(M, seed, nodes);
    CorpusSpec spec{CorpusKind::FourierRandom, seed, 1, M.ambient_dim(), 3, nodes, ""};
    return ManifoldLoop(M, generate_corpus(spec).front(), true, nodes);
}

PullbackSection smooth_section(const ManifoldLoop& center, double amplitude,
                               std::uint64_t seed) {
    const EmbeddedManifold& M = center.manifold();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vec dir(center.dim()), dir2(center.dim());
    for (int d = 0; d < center.dim(); ++d) dir[d] = gauss(rng), dir2[d] = gauss(rng);
    const double p1 = unif(rng), p2 = unif(rng);
    Eigen::MatrixXd vecs(center.nodes(), center.dim());
    for (int i = 0; i < center.nodes(); ++i) {
        const double t = center.node_t(i);
        const Vec base = center.at_node(i);
        Vec a = M.tangent_project(base, dir);
        Vec b = M.tangent_project(base, dir2);
        if (a.norm() > 1e-12) a /= a.norm();
        if (b.norm() > 1e-12) b /= b.norm();
        vecs.row(i) = (amplitude * ((0.6 + 0.4 * std::sin(2 * M_PI * (t + p1))) * a +
                                    0.3 * std::cos(2 * M_PI * (t + p2)) * b))
                          .transpose();
    }
    return {center, std::move(vecs)};
}

void criterion_local_addition() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1001);

    double zero_defect = 0.0;
    double roundtrip = 0.0;
    for (const auto& M : {EmbeddedManifold::sphere2(), EmbeddedManifold::flat_torus2()}) {
        for (int k = 0; k < 200; ++k) {
            const Vec u = M.random_point(rng);
            zero_defect = std::max(
                zero_defect, (M.local_add(u, Vec::Zero(M.ambient_dim())) - u).norm());
        }
        int accepted = 0;
        while (accepted < 1000) {
            const Vec u = M.random_point(rng);
            const Vec q = M.random_point(rng);
            if (!M.diagonal_nbhd_contains(u, q)) continue;
            ++accepted;
            roundtrip = std::max(
                roundtrip, (M.local_add(u, M.local_add_inverse(u, q)) - q).norm());
        }
    }
    const double elapsed = seconds_since(start);
    report(1, "local-addition",
           zero_defect == 0.0 && roundtrip < 1e-9 && elapsed < 1.0,
           "zero-section defect " + fmt(zero_defect) + " (exact), exp/log roundtrip " +
               fmt(roundtrip) + " < 1e-9 over 2x1000 in-V pairs, " + fmt(elapsed) +
               " s < 1 s");
}

void criterion_charts() {
    double roundtrip = 0.0, zero_defect = 0.0;
    int manifolds = 0;
    for (const auto& M : {EmbeddedManifold::euclidean(3), EmbeddedManifold::circle(),
                          EmbeddedManifold::sphere2(), EmbeddedManifold::flat_torus2()}) {
        ++manifolds;
        Chart chart(smooth_center_for(M, 2000 + manifolds, 256));
        zero_defect = std::max(zero_defect,
                               loop_gap(chart.forward(PullbackSection::zero(chart.center())),
                                        chart.center()));
        const double amp =
            M.compact() ? 0.22 * M.safety() * M.injectivity_radius() : 0.8;
        for (int k = 0; k < 100; ++k) {
            const PullbackSection sigma =
                smooth_section(chart.center(), amp, 3000 + 100 * manifolds + k);
            const ManifoldLoop beta = chart.forward(sigma);
            roundtrip =
                std::max(roundtrip, loop_gap(chart.forward(chart.inverse(beta)), beta));
            roundtrip = std::max(roundtrip, (chart.inverse(beta).vectors() -
                                             sigma.vectors()).rowwise().norm().maxCoeff());
        }
    }
    report(2, "charts", roundtrip < 1e-8 && zero_defect < 1e-12,
           "roundtrip " + fmt(roundtrip) + " < 1e-8 on 100 loops x " +
               std::to_string(manifolds) + " manifolds, zero-section " +
               fmt(zero_defect) + " < 1e-12");
}

void criterion_transitions() {
    const auto start = std::chrono::steady_clock::now();
    const auto sphere = EmbeddedManifold::sphere2();
    const ManifoldLoop a1 = great_circle(sphere, 41, 256);
    Eigen::MatrixXd shifted(a1.nodes(), 3);
    for (int i = 0; i < a1.nodes(); ++i) {
        const Vec x = a1.at_node(i);
        Vec axis = sphere.tangent_project(x, (Vec(3) << 0.2, -0.1, 0.95).finished());
        if (axis.norm() > 1e-9) axis *= 0.12 / axis.norm();
        shifted.row(i) = sphere.local_add(x, axis).transpose();
    }
    const ManifoldLoop a2(sphere, GridLoop(std::move(shifted), Interp::CubicPeriodic),
                          true);
    TransitionData T{Chart(a1), Chart(a2)};

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double pointwise = 0.0;
    int tested = 0;
    while (tested < 1000) {
        const double t = unif(rng);
        Vec v = sphere.random_tangent(a1.evaluate(t), rng);
        if (v.norm() > 1e-9) v *= 0.5 * unif(rng) / v.norm();
        if (!T.in_domain(t, v)) continue;
        ++tested;
        pointwise = std::max(pointwise,
                             (T.pointwise_reverse(t, T.pointwise(t, v)) - v).norm());
    }

    const PullbackSection sigma = smooth_section(a1, 0.25, 43);
    const PullbackSection via_map = T.apply(sigma);
    const PullbackSection composite = Chart(a2).inverse(Chart(a1).forward(sigma));
    const double coherence =
        (via_map.vectors() - composite.vectors()).rowwise().norm().maxCoeff();

    const SmoothnessReport probe = smoothness_probe(
        [&](const PullbackSection& s) { return T.apply(s); }, sigma,
        smooth_section(a1, 0.15, 44));
    const bool second_order = probe.second_order;

    const double elapsed = seconds_since(start);
    report(3, "transitions",
           pointwise < 1e-8 && coherence < 1e-8 && second_order && elapsed < 5.0,
           "inverse composition " + fmt(pointwise) + " < 1e-8 over 1000 samples, "
           "factorisation gap " + fmt(coherence) + " < 1e-8, probe order " +
               (probe.linear_exact ? std::string("exact") : fmt(probe.order_estimate)) +
               " >= 2, " + fmt(elapsed) + " s < 5 s");
}

void criterion_mollifier() {
    const auto& bump = BumpFunction::standard();
    const double kernel_defect = std::abs(bump.integral(20000) - 1.0);

    CorpusSpec spec;
    spec.kind = CorpusKind::LipschitzRandom;
    spec.seed = 50;
    spec.count = 50;
    spec.dim = 2;
    spec.grid_n = 1024;
    const auto corpus = generate_corpus(spec);

    double worst_ratio = 0.0;
    for (double eps : {0.1, 0.01}) {
        for (const auto& loop : corpus) {
            const GridLoop& g = std::get<GridLoop>(loop);
            const GridLoop smooth = mollify(g, eps);
            double gap = 0.0;
            for (int i = 0; i < smooth.size(); ++i)
                gap = std::max(gap, (smooth.sample(i) -
                                     g.evaluate(double(i) / smooth.size())).norm());
            worst_ratio = std::max(worst_ratio, gap / eps);
        }
    }

    Eigen::MatrixXd cs(1024, 1);
    for (int i = 0; i < 1024; ++i) cs(i, 0) = std::cos(2.0 * M_PI * i / 1024.0);
    const GridLoop cosg(cs, Interp::Linear);
    const double delta = delta_of(cosg, 0.1);
    const double deriv = derivative_identity_residual(cosg, delta);

    const GridLoop rc = mollify_fixed_delta(cosg, delta);
    double periodicity = 0.0;
    for (double t : {0.0, 0.25, 0.75})
        periodicity = std::max(periodicity,
                               (rc.evaluate(t + 1.0) - rc.evaluate(t)).norm());

    report(4, "mollifier",
           kernel_defect < 1e-10 && worst_ratio < 1.0 && deriv < 1e-6 &&
               periodicity == 0.0,
           "sup|gamma-R(gamma)|/eps " + fmt(worst_ratio) +
               " < 1 over 50 loops at eps in {0.1, 0.01}, kernel defect " +
               fmt(kernel_defect) + " < 1e-10, derivative identity " + fmt(deriv) +
               " < 1e-6, periodicity defect " + fmt(periodicity) + " (exact)");
}

void criterion_homotopy() {
    const auto sphere = EmbeddedManifold::sphere2();
    const MollifierParams params = MollifierParams::for_manifold(sphere);

    std::mt19937_64 rng(61);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const ManifoldLoop base = great_circle(sphere, 62, 256);
    Eigen::MatrixXd noisy(256, 3);
    for (int i = 0; i < 256; ++i) {
        Vec w(3);
        for (int d = 0; d < 3; ++d) w[d] = gauss(rng);
        noisy.row(i) = sphere.project(base.at_node(i) + 0.02 * w).transpose();
    }
    const ManifoldLoop gamma(sphere, GridLoop(std::move(noisy), Interp::Linear));
    const ManifoldLoop center = mollify_to_manifold(gamma, params);

    const double end_gap = loop_gap(homotopy_eval(gamma, center, 1.0), gamma);
    const double start_gap = loop_gap(homotopy_eval(gamma, center, 0.0), center);
    double on_m = 0.0;
    for (int k = 0; k <= 10; ++k) {
        const ManifoldLoop h = homotopy_eval(gamma, center, k / 10.0);
        for (int i = 0; i < h.nodes(); ++i)
            on_m = std::max(on_m, sphere.constraint_residual(h.at_node(i)));
    }

    // Smooth-loop composite: smooth -> continuous -> smooth keeps endpoints.
    const ManifoldLoop smooth = great_circle(sphere, 63, 256);
    const ManifoldLoop smooth_center = mollify_to_manifold(smooth, params);
    const double composite_gap =
        std::max(loop_gap(homotopy_eval(smooth, smooth_center, 1.0), smooth),
                 loop_gap(homotopy_eval(smooth, smooth_center, 0.0), smooth_center));

    report(5, "homotopy",
           end_gap < 1e-9 && start_gap < 1e-9 && on_m < 1e-9 && composite_gap < 1e-9,
           "H(.,1) gap " + fmt(end_gap) + ", H(.,0) gap " + fmt(start_gap) +
               ", on-manifold residual " + fmt(on_m) + ", smooth composite " +
               fmt(composite_gap) + "; all < 1e-9");
}

void criterion_based_tubular() {
    const auto sphere = EmbeddedManifold::sphere2();
    std::mt19937_64 rng(71);
    const Vec x0 = sphere.random_point(rng);
    const TubularSetup setup = TubularSetup::point(sphere, x0, 0.9);
    const auto charts = setup.default_partition();

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double anchor = 0.0, flow_zero = 0.0;
    for (int k = 0; k < 100; ++k) {
        Vec v(2);
        v << gauss(rng), gauss(rng);
        v *= 1.2 * unif(rng) / std::max(v.norm(), 1e-12);
        const SectionField s(charts, 0.0, v);
        anchor = std::max(anchor, (s.eval(0.0) - v).norm());
        flow_zero = std::max(flow_zero, VerticalFlow{s}.flow(0.0, v).norm());
    }

    double roundtrip = 0.0, e0_gap = 0.0;
    for (int k = 0; k < 5; ++k) {
        Vec dir = sphere.random_tangent(x0, rng);
        dir *= (0.2 + 0.4 * unif(rng)) / dir.norm();
        const Vec start = sphere.local_add(x0, dir);
        Vec q = sphere.random_tangent(start, rng);
        q.normalize();
        Eigen::MatrixXd s(256, 3);
        for (int i = 0; i < 256; ++i) {
            const double t = 2.0 * M_PI * i / 256.0;
            s.row(i) = (std::cos(t) * start + std::sin(t) * q).transpose();
        }
        const ManifoldLoop alpha(sphere, GridLoop(std::move(s), Interp::CubicPeriodic));
        const BasedTrivialization triv = based_trivialize(setup, alpha);
        const ManifoldLoop back = based_trivialize_inverse(setup, triv.fiber_loop,
                                                           triv.base_param, triv.normal);
        roundtrip = std::max(roundtrip, loop_gap(back, alpha));
        e0_gap = std::max(e0_gap, (evaluate_at_zero(back) -
                                   setup.from_normal(triv.base_param, triv.normal))
                                      .norm());
    }

    report(6, "based-tubular",
           anchor < 1e-10 && flow_zero < 1e-6 && roundtrip < 1e-6 && e0_gap < 1e-6,
           "s(v)(pi(v))=v " + fmt(anchor) + " < 1e-10, Psi_v(v)=0 " + fmt(flow_zero) +
               " < 1e-6 (rk4, 64 steps), trivialisation roundtrip " + fmt(roundtrip) +
               " < 1e-6, e_0 structure " + fmt(e0_gap) + " < 1e-6");
}

void criterion_actions() {
    // Rotation invariance of the C^n seminorms, n <= 5, on band-limited
    // loops normalised in the top seminorm.
    CorpusSpec spec{CorpusKind::FourierRandom, 81, 8, 1, 3, 256, ""};
    std::vector<FourierLoop> corpus;
    for (const auto& loop : generate_corpus(spec)) {
        FourierLoop f = std::get<FourierLoop>(loop);
        corpus.push_back(f * (1.0 / std::max(1.0, seminorm(f, 5))));
    }
    corpus.push_back(FourierLoop::cosine(1));
    double invariance = 0.0;
    for (const auto& f : corpus)
        for (double s : {0.37, 0.125, 0.9})
            for (int n = 0; n <= 5; ++n)
                invariance = std::max(invariance,
                                      norm_invariance_residual(Loop(f), s, n));

    double witness_defect = 0.0;
    bool witness_ns_ok = true;
    for (double delta : {0.3, 0.05, 0.001}) {
        const DiscontinuityWitness w = discontinuity_witness(delta);
        witness_defect = std::max(witness_defect, std::abs(w.achieved_ratio - 2.0));
        witness_ns_ok = witness_ns_ok && (1.0 / w.n < delta);
    }

    const OrbitSmoothnessReport smooth =
        orbit_smoothness_probe(Loop(FourierLoop::cosine(1)), 2);
    const OrbitSmoothnessReport rough =
        orbit_smoothness_probe(Loop(triangle_wave(1024)), 1);

    report(7, "actions",
           invariance <= 1e-10 && witness_defect <= 1e-12 && witness_ns_ok &&
               smooth.smooth_compatible && !rough.smooth_compatible,
           "invariance residual " + fmt(invariance) + " <= 1e-10 (n <= 5), witness |I-R_h| "
           "bound-2 defect " + fmt(witness_defect) +
               " <= 1e-12 for delta in {0.3, 0.05, 0.001}, dichotomy band-limited=" +
               (smooth.smooth_compatible ? "convergent" : "divergent") + " triangle=" +
               (rough.smooth_compatible ? "convergent" : "divergent"));
}

void criterion_whole_suite() {
    const auto start = std::chrono::steady_clock::now();
    ExperimentConfig cfg;
    cfg.suites = {"charts", "transition", "mollify", "homotopy", "actions", "fibration"};
    cfg.grid_n = 1024;
    cfg.quadrature = 4096;
    cfg.seed = 424242;
    cfg.corpus_count = 8;

    const ResidualReport first = run_experiment(cfg);
    const ResidualReport second = run_experiment(cfg);
    const bool deterministic = first.to_json_string() == second.to_json_string();
    const double elapsed = seconds_since(start);

    report(8, "whole-suite",
           deterministic && first.all_pass() && elapsed < 60.0,
           std::string("deterministic=") + (deterministic ? "yes" : "no") + ", " +
               std::to_string(first.passed()) + "/" +
               std::to_string(first.checks.size()) + " checks pass at N=1024 Q=4096, " +
               fmt(elapsed) + " s < 60 s (two full runs)");
}

} // namespace

int main() {
    criterion_local_addition();
    criterion_charts();
    criterion_transitions();
    criterion_mollifier();
    criterion_homotopy();
    criterion_based_tubular();
    criterion_actions();
    criterion_whole_suite();
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all acceptance criteria pass\n");
    return 0;
}
