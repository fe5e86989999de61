#include "loopspace/atlas.hpp"

#include <cmath>

namespace loopspace {

PullbackSection::PullbackSection(ManifoldLoop center, Eigen::MatrixXd vectors)
    : center_(std::move(center)), vectors_(std::move(vectors)) {
    if (vectors_.rows() != center_.nodes() || vectors_.cols() != center_.dim())
        throw DimensionMismatch("pullback section: sample shape does not match center");
    const EmbeddedManifold& M = center_.manifold();
    for (int i = 0; i < nodes(); ++i) {
        if (!M.is_tangent(center_.at_node(i), vector_at(i)))
            throw TangencyViolation("pullback section: sample " + std::to_string(i) +
                                    " is not tangent along the center");
    }
}

PullbackSection PullbackSection::zero(const ManifoldLoop& center) {
    return {center, Eigen::MatrixXd::Zero(center.nodes(), center.dim())};
}

TangentVector PullbackSection::tangent_at(int i) const {
    return {center_.at_node(i), vector_at(i)};
}

PullbackSection PullbackSection::operator+(const PullbackSection& other) const {
    if (nodes() != other.nodes()) throw GridMismatch("section addition");
    return {center_, vectors_ + other.vectors_};
}

PullbackSection PullbackSection::operator-(const PullbackSection& other) const {
    if (nodes() != other.nodes()) throw GridMismatch("section subtraction");
    return {center_, vectors_ - other.vectors_};
}

PullbackSection PullbackSection::operator*(double c) const {
    return {center_, vectors_ * c};
}

bool same_center(const ManifoldLoop& a, const ManifoldLoop& b, double tol) {
    if (a.nodes() != b.nodes() || a.dim() != b.dim()) return false;
    for (int i = 0; i < a.nodes(); ++i)
        if ((a.at_node(i) - b.at_node(i)).norm() > tol) return false;
    return true;
}

Chart::Chart(ManifoldLoop center) : center_(std::move(center)) {
    if (!center_.smooth_certified())
        throw InvalidLoop(
            "chart: centers must be smooth loops; mollify the anchor first");
}

void Chart::check_compatible(const ManifoldLoop& beta) const {
    if (beta.nodes() != center_.nodes())
        throw GridMismatch("chart: loop sampled at " + std::to_string(beta.nodes()) +
                           " nodes, chart at " + std::to_string(center_.nodes()));
    if (beta.manifold().kind() != manifold().kind() || beta.dim() != center_.dim())
        throw GridMismatch("chart: loop lives on a different manifold");
}

bool Chart::contains(const ManifoldLoop& beta) const {
    check_compatible(beta);
    const EmbeddedManifold& M = manifold();
    for (int i = 0; i < nodes(); ++i)
        if (!M.diagonal_nbhd_contains(center_.at_node(i), beta.at_node(i)))
            return false;
    return true;
}

PullbackSection Chart::inverse(const ManifoldLoop& beta) const {
    check_compatible(beta);
    const EmbeddedManifold& M = manifold();
    Eigen::MatrixXd vecs(nodes(), center_.dim());
    for (int i = 0; i < nodes(); ++i)
        vecs.row(i) = M.local_add_inverse(center_.at_node(i), beta.at_node(i)).transpose();
    return {center_, std::move(vecs)};
}

ManifoldLoop Chart::forward(const PullbackSection& section) const {
    if (section.nodes() != nodes() ||
        !same_center(section.center(), center_, manifold().tol().tangent * 10))
        throw GridMismatch("chart: section is anchored along a different center");
    const EmbeddedManifold& M = manifold();
    Eigen::MatrixXd out(nodes(), center_.dim());
    for (int i = 0; i < nodes(); ++i)
        out.row(i) = M.local_add(center_.at_node(i), section.vector_at(i)).transpose();
    return ManifoldLoop(M, GridLoop(std::move(out), Interp::CubicPeriodic));
}

Chart find_chart_center(const ManifoldLoop& beta, const MollifierParams& params) {
    return Chart(mollify_to_manifold(beta, params));
}

Chart find_chart_center(const ManifoldLoop& beta) {
    return find_chart_center(beta, MollifierParams::for_manifold(beta.manifold()));
}

TransitionData::TransitionData(Chart first, Chart second)
    : first_(std::move(first)), second_(std::move(second)) {
    if (first_.manifold().kind() != second_.manifold().kind() ||
        first_.nodes() != second_.nodes())
        throw GridMismatch("transition: charts are not over the same data");
}

bool TransitionData::in_domain(double t, const Vec& v) const {
    const EmbeddedManifold& M = first_.manifold();
    const Vec image = M.local_add(first_.center().evaluate(t), v);
    return M.diagonal_nbhd_contains(second_.center().evaluate(t), image);
}

bool TransitionData::in_domain_reverse(double t, const Vec& v) const {
    const EmbeddedManifold& M = first_.manifold();
    const Vec image = M.local_add(second_.center().evaluate(t), v);
    return M.diagonal_nbhd_contains(first_.center().evaluate(t), image);
}

Vec TransitionData::pointwise(double t, const Vec& v) const {
    const EmbeddedManifold& M = first_.manifold();
    const Vec image = M.local_add(first_.center().evaluate(t), v);
    const Vec target = second_.center().evaluate(t);
    if (!M.diagonal_nbhd_contains(target, image))
        throw OutsideW12("transition: (t, v) leaves W_12 at t = " + std::to_string(t));
    return M.local_add_inverse(target, image);
}

Vec TransitionData::pointwise_reverse(double t, const Vec& v) const {
    const EmbeddedManifold& M = first_.manifold();
    const Vec image = M.local_add(second_.center().evaluate(t), v);
    const Vec target = first_.center().evaluate(t);
    if (!M.diagonal_nbhd_contains(target, image))
        throw OutsideW12("transition: (t, v) leaves W_21 at t = " + std::to_string(t));
    return M.local_add_inverse(target, image);
}

PullbackSection TransitionData::apply(const PullbackSection& section) const {
    if (!same_center(section.center(), first_.center(),
                     first_.manifold().tol().tangent * 10))
        throw GridMismatch("transition: section is not anchored along the first center");
    Eigen::MatrixXd out(section.nodes(), section.center().dim());
    for (int i = 0; i < section.nodes(); ++i)
        out.row(i) = pointwise(section.center().node_t(i), section.vector_at(i)).transpose();
    return {second_.center(), std::move(out)};
}

PullbackSection TransitionData::apply_reverse(const PullbackSection& section) const {
    if (!same_center(section.center(), second_.center(),
                     first_.manifold().tol().tangent * 10))
        throw GridMismatch("transition: section is not anchored along the second center");
    Eigen::MatrixXd out(section.nodes(), section.center().dim());
    for (int i = 0; i < section.nodes(); ++i)
        out.row(i) =
            pointwise_reverse(section.center().node_t(i), section.vector_at(i)).transpose();
    return {first_.center(), std::move(out)};
}

namespace {

double section_gap(const PullbackSection& a, const PullbackSection& b) {
    return (a.vectors() - b.vectors()).rowwise().norm().maxCoeff();
}

} // namespace

SmoothnessReport smoothness_probe(
    const std::function<PullbackSection(const PullbackSection&)>& map,
    const PullbackSection& gamma, const PullbackSection& direction, double h0) {
    auto at = [&](double h) {
        try {
            return map(gamma + direction * h);
        } catch (const OutsideW12& e) {
            throw DomainExit(e.what());
        } catch (const PairOutsideV& e) {
            throw DomainExit(e.what());
        }
    };

    SmoothnessReport rep{};
    std::vector<PullbackSection> quotients;
    std::array<double, 3> second{};
    const PullbackSection base = at(0.0);
    for (int level = 0; level < 3; ++level) {
        const double h = h0 / (1 << level);
        const PullbackSection plus = at(h), minus = at(-h);
        quotients.push_back((plus - minus) * (0.5 / h));
        second[level] = (plus + minus - base * 2.0).sup_norm() / (h * h);
    }
    rep.first_derivative_norm = quotients[2].sup_norm();
    rep.second_derivative_norm = second[2];

    const double d01 = section_gap(quotients[0], quotients[1]);
    const double d12 = section_gap(quotients[1], quotients[2]);
    const double noise = 1e-12 * (1.0 + rep.first_derivative_norm);
    if (d01 <= noise && d12 <= noise) {
        rep.linear_exact = rep.second_derivative_norm <= 1e-8;
        rep.order_estimate = std::numeric_limits<double>::infinity();
        rep.second_order = true;
        return rep;
    }
    rep.order_estimate = std::log2(d01 / std::max(d12, 1e-300));
    rep.linear_exact = false;
    rep.second_order = rep.order_estimate >= 1.8;
    return rep;
}

namespace {

Eigen::MatrixXd initial_frame(const EmbeddedManifold& M, const Vec& point) {
    const Eigen::MatrixXd P = M.tangent_projector(point);
    // Columns of the projector span the tangent space; orthonormalise.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(P, Eigen::ComputeThinU);
    Eigen::MatrixXd frame(M.ambient_dim(), M.dim());
    int col = 0;
    for (int i = 0; i < svd.singularValues().size() && col < M.dim(); ++i)
        if (svd.singularValues()[i] > 0.5) frame.col(col++) = svd.matrixU().col(i);
    if (col != M.dim())
        throw HolonomyCorrectionFailure("frame_along: degenerate tangent projector");
    return frame;
}

Eigen::Matrix2d rot2(double theta) {
    Eigen::Matrix2d R;
    R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return R;
}

} // namespace

MovingFrame::MovingFrame(ManifoldLoop center, std::vector<Eigen::MatrixXd> frames,
                         double holonomy_angle)
    : center_(std::move(center)), frames_(std::move(frames)),
      holonomy_angle_(holonomy_angle) {}

double MovingFrame::orthonormality_defect() const {
    double worst = 0.0;
    const int k = rank();
    for (const auto& F : frames_) {
        worst = std::max(worst,
                         (F.transpose() * F - Eigen::MatrixXd::Identity(k, k))
                             .cwiseAbs()
                             .maxCoeff());
    }
    return worst;
}

MovingFrame frame_along(const ManifoldLoop& alpha) {
    if (!alpha.smooth_certified())
        throw HolonomyCorrectionFailure("frame_along: center must be a smooth loop");
    const EmbeddedManifold& M = alpha.manifold();
    const int n = alpha.nodes();
    const int k = M.dim();

    std::vector<Eigen::MatrixXd> frames(n + 1);
    frames[0] = initial_frame(M, alpha.at_node(0));
    for (int i = 0; i < n; ++i) {
        const Vec from = alpha.at_node(i);
        const Vec to = alpha.at_node(i + 1);
        const Vec p = M.local_add_inverse(from, to);
        Eigen::MatrixXd next(M.ambient_dim(), k);
        for (int c = 0; c < k; ++c)
            next.col(c) = M.parallel_transport(from, p, frames[i].col(c));
        frames[i + 1] = std::move(next);
    }

    // Closure defect expressed in the initial frame.
    const Eigen::MatrixXd H = frames[0].transpose() * frames[n];
    const double ortho =
        (H.transpose() * H - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
    if (ortho > 1e-8 || H.determinant() < 0.0)
        throw HolonomyCorrectionFailure(
            "frame_along: closure is not a rotation (defect " + std::to_string(ortho) + ")");

    double theta = 0.0;
    if (k == 2) theta = std::atan2(H(1, 0), H(0, 0));
    // k == 1: det > 0 forces H = +1, nothing to correct.
    // Flat cases (euclidean, torus) close with theta == 0 on their own.

    std::vector<Eigen::MatrixXd> corrected(n);
    for (int i = 0; i < n; ++i) {
        if (k == 2) {
            const double t = static_cast<double>(i) / n;
            corrected[i] = frames[i] * rot2(-t * theta);
        } else {
            corrected[i] = frames[i];
        }
    }
    return MovingFrame(alpha, std::move(corrected), theta);
}

std::vector<GridLoop> section_to_coords(const MovingFrame& frame,
                                        const PullbackSection& section) {
    if (!same_center(frame.center(), section.center(),
                     frame.center().manifold().tol().tangent * 10))
        throw FrameMismatch("section_to_coords: frame and section have different centers");
    const int n = frame.nodes();
    std::vector<GridLoop> out;
    out.reserve(frame.rank());
    for (int c = 0; c < frame.rank(); ++c) {
        Eigen::MatrixXd samples(n, 1);
        for (int i = 0; i < n; ++i)
            samples(i, 0) = frame.frame_at(i).col(c).dot(section.vector_at(i));
        out.emplace_back(std::move(samples), Interp::Linear);
    }
    return out;
}

PullbackSection coords_to_section(const MovingFrame& frame,
                                  const std::vector<GridLoop>& coords) {
    if (static_cast<int>(coords.size()) != frame.rank())
        throw FrameMismatch("coords_to_section: expected " + std::to_string(frame.rank()) +
                            " coordinate loops");
    const int n = frame.nodes();
    for (const auto& c : coords)
        if (c.size() != n || c.dim() != 1)
            throw FrameMismatch("coords_to_section: coordinate loops must be scalar at " +
                                std::to_string(n) + " nodes");
    Eigen::MatrixXd vecs = Eigen::MatrixXd::Zero(n, frame.center().dim());
    for (int i = 0; i < n; ++i) {
        Vec v = Vec::Zero(frame.center().dim());
        for (int c = 0; c < frame.rank(); ++c)
            v += coords[c].samples()(i, 0) * frame.frame_at(i).col(c);
        vecs.row(i) = v.transpose();
    }
    return {frame.center(), std::move(vecs)};
}

Vec evaluate_at_zero(const Loop& loop) { return evaluate(loop, 0.0); }

Vec evaluate_at_zero(const ManifoldLoop& loop) { return loop.evaluate(0.0); }

} // namespace loopspace
