#include "loopspace/manifold_loop.hpp"

#include <cmath>

namespace loopspace {

namespace {

int default_nodes(const Loop& rep) {
    if (const auto* g = std::get_if<GridLoop>(&rep)) return g->size();
    const auto& f = std::get<FourierLoop>(rep);
    return std::max(256, 8 * (f.degree() + 1));
}

} // namespace

ManifoldLoop::ManifoldLoop(EmbeddedManifold manifold, Loop rep, bool smooth_certified,
                           int nodes)
    : manifold_(std::move(manifold)),
      rep_(std::move(rep)),
      smooth_(smooth_certified || std::holds_alternative<FourierLoop>(rep_)),
      nodes_(nodes > 0 ? nodes : default_nodes(rep_)) {
    if (const auto* g = std::get_if<GridLoop>(&rep_); g && nodes_ != g->size())
        throw GridMismatch("manifold loop: node count must match the grid size");
    if (loop_dim(rep_) != manifold_.ambient_dim())
        throw DimensionMismatch("manifold loop: representation lives in R^" +
                                std::to_string(loop_dim(rep_)) + ", manifold in R^" +
                                std::to_string(manifold_.ambient_dim()));
    for (int i = 0; i < nodes_; ++i) {
        const Vec x = loopspace::evaluate(rep_, node_t(i));
        if (manifold_.constraint_residual(x) > manifold_.tol().tangent)
            throw NotOnManifold("manifold loop: node " + std::to_string(i) +
                                " off " + manifold_.spec_string() + " by " +
                                std::to_string(manifold_.constraint_residual(x)));
    }
}

Vec ManifoldLoop::at_node(int i) const {
    return loopspace::evaluate(rep_, node_t(((i % nodes_) + nodes_) % nodes_));
}

Vec ManifoldLoop::evaluate(double t) const {
    const Vec x = loopspace::evaluate(rep_, t);
    const double resid = manifold_.constraint_residual(x);
    if (resid <= 1e-14) return x;
    return manifold_.project(x);
}

ManifoldLoop ManifoldLoop::resampled(int n_samples) const {
    Eigen::MatrixXd s(n_samples, dim());
    for (int i = 0; i < n_samples; ++i)
        s.row(i) = evaluate(static_cast<double>(i) / n_samples).transpose();
    return ManifoldLoop(manifold_, GridLoop(std::move(s), Interp::CubicPeriodic), smooth_);
}

ManifoldLoop rotate_manifold_loop(const ManifoldLoop& loop, double s) {
    const int n = loop.nodes();
    const double shift = s * n;
    if (const auto* g = std::get_if<GridLoop>(&loop.rep());
        g && std::abs(shift - std::round(shift)) <= 1e-12) {
        const int k = static_cast<int>(std::llround(shift));
        Eigen::MatrixXd out(n, loop.dim());
        for (int i = 0; i < n; ++i)
            out.row(i) = g->samples().row(((i + k) % n + n) % n);
        return ManifoldLoop(loop.manifold(), GridLoop(std::move(out), g->interp()),
                            loop.smooth_certified());
    }
    Eigen::MatrixXd out(n, loop.dim());
    for (int i = 0; i < n; ++i)
        out.row(i) = loop.evaluate(loop.node_t(i) + s).transpose();
    return ManifoldLoop(loop.manifold(), GridLoop(std::move(out), Interp::CubicPeriodic),
                        loop.smooth_certified());
}

} // namespace loopspace
