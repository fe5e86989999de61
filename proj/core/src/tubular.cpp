#include "loopspace/tubular.hpp"

#include <cmath>

namespace loopspace {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

inline Eigen::Vector2d rot2v(const Eigen::Vector2d& u, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * u.x() - s * u.y(), s * u.x() + c * u.y()};
}

inline double signed_angle2(const Eigen::Vector2d& u, const Eigen::Vector2d& q) {
    return std::atan2(u.x() * q.y() - u.y() * q.x(), u.dot(q));
}

/// Radial chart stretching the geodesic ball of radius R onto all of R^k:
/// f(r) = r / (1 - (r/R)^2), a smooth odd diffeomorphism [0,R) -> [0,inf).
double stretch(double r, double R) {
    const double q = r / R;
    return r / (1.0 - q * q);
}

double stretch_inverse(double rho, double R) {
    if (rho == 0.0) return 0.0;
    return 2.0 * rho / (1.0 + std::sqrt(1.0 + 4.0 * rho * rho / (R * R)));
}

/// Periodic bump supported on an arc of the parameter circle.
double arc_bump(const Arc& arc, double t) {
    if (!arc.contains(t)) return 0.0;
    const double center = 0.5 * (arc.lo + arc.hi);
    const double half = 0.5 * (arc.hi - arc.lo);
    double d = t - center;
    d -= std::round(d); // nearest periodic representative
    const double u = d / half;
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - u * u));
}

Eigen::MatrixXd orthonormal_tangent_basis(const EmbeddedManifold& M, const Vec& x) {
    const Eigen::MatrixXd P = M.tangent_projector(x);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(P, Eigen::ComputeThinU);
    Eigen::MatrixXd frame(M.ambient_dim(), M.dim());
    int col = 0;
    for (int i = 0; i < svd.singularValues().size() && col < M.dim(); ++i)
        if (svd.singularValues()[i] > 0.5) frame.col(col++) = svd.matrixU().col(i);
    if (col != M.dim())
        throw PartitionDefect("tubular setup: degenerate tangent space at the anchor");
    return frame;
}

} // namespace

SectionField::SectionField(std::vector<BundleChart> charts, double v_param, Vec v_fiber)
    : charts_(std::move(charts)), v_param_(v_param), v_fiber_(std::move(v_fiber)) {
    if (charts_.empty()) throw PartitionDefect("section field: empty chart family");
    const double defect = partition_defect(charts_);
    if (defect > 1e-10)
        throw PartitionDefect("section field: sum rho^2 deviates from 1 by " +
                              std::to_string(defect));
    bool anchored = false;
    for (const auto& c : charts_) anchored = anchored || c.domain.contains(v_param_);
    if (!anchored)
        throw PartitionDefect("section field: the anchor parameter is not covered");
}

double SectionField::partition_defect(const std::vector<BundleChart>& charts,
                                      int samples) {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / samples;
        double sum = 0.0;
        for (const auto& c : charts) {
            const double r = c.domain.contains(t) ? c.rho(t) : 0.0;
            sum += r * r;
        }
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
}

Vec SectionField::eval(double param) const {
    Vec out = Vec::Zero(rank());
    for (const auto& chart : charts_) {
        if (!chart.domain.contains(param) || !chart.domain.contains(v_param_)) continue;
        const double weight = chart.rho(v_param_) * chart.rho(param);
        if (weight == 0.0) continue;
        const Eigen::MatrixXd Fx = chart.frame(param);
        const Eigen::MatrixXd Fv = chart.frame(v_param_);
        out += weight * (Fx * Fv.inverse() * v_fiber_);
    }
    return out;
}

VerticalFlow::VerticalFlow(SectionField section, int steps)
    : section_(std::move(section)), steps_(steps) {
    if (steps_ < 1) throw OdeStepRejected("vertical flow: steps < 1");
}

Vec VerticalFlow::flow(double base_param, const Vec& fiber, bool inverse) const {
    const Vec s_here = section_.eval(base_param);
    const double denom = 1.0 + section_.anchor_fiber().squaredNorm();
    const double sign = inverse ? 1.0 : -1.0;
    auto field = [&](const Vec& w) -> Vec {
        return sign * plateau(w.squaredNorm() / denom) * s_here;
    };

    const double h = 1.0 / steps_;
    Vec w = fiber;
    for (int i = 0; i < steps_; ++i) {
        const Vec k1 = field(w);
        const Vec k2 = field(w + 0.5 * h * k1);
        const Vec k3 = field(w + 0.5 * h * k2);
        const Vec k4 = field(w + h * k3);
        w += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!w.allFinite()) throw OdeStepRejected("vertical flow: state diverged");
    }
    return w;
}

TubularSetup TubularSetup::point(EmbeddedManifold M, Vec x0, double u_radius) {
    if (!(u_radius > 0.0) ||
        (M.compact() && u_radius >= M.safety() * M.injectivity_radius()))
        throw ConfigError("tubular setup: u_radius must fit inside the log domain");
    M.require_on_manifold(x0, "tubular setup");
    TubularSetup s;
    s.kind_ = Kind::Point;
    s.M_ = std::move(M);
    s.frame0_ = orthonormal_tangent_basis(s.M_, x0);
    s.x0_ = std::move(x0);
    s.rank_ = s.M_.dim();
    s.u_radius_ = u_radius;
    return s;
}

TubularSetup TubularSetup::torus_subcircle(Vec q0, double u_radius) {
    if (!(u_radius > 0.0 && u_radius < M_PI))
        throw ConfigError("tubular setup: sub-circle radius must lie in (0, pi)");
    if (q0.size() != 2 || std::abs(q0.norm() - 1.0) > 1e-10)
        throw NotOnManifold("tubular setup: q0 must lie on the unit circle");
    TubularSetup s;
    s.kind_ = Kind::TorusSubcircle;
    s.M_ = EmbeddedManifold::flat_torus2();
    s.q0_ = std::move(q0);
    s.rank_ = 1;
    s.u_radius_ = u_radius;
    return s;
}

bool TubularSetup::in_tube(const Vec& x) const {
    if (!M_.on_manifold(x)) return false;
    if (kind_ == Kind::Point)
        return M_.geodesic_distance(x0_, x) < u_radius_;
    return std::abs(signed_angle2(q0_, x.tail<2>())) < u_radius_;
}

double TubularSetup::base_param(const Vec& x) const {
    if (kind_ == Kind::Point) return 0.0;
    const double angle = std::atan2(x[1], x[0]);
    const double t = angle / kTwoPi;
    return t - std::floor(t);
}

Vec TubularSetup::normal_coords(const Vec& x) const {
    if (!in_tube(x)) throw BasepointOutsideU("normal_coords: point outside the tube");
    if (kind_ == Kind::Point) {
        const Vec w = M_.local_add_inverse(x0_, x);
        Vec c = frame0_.transpose() * w;
        const double r = c.norm();
        if (r == 0.0) return c;
        return (stretch(r, u_radius_) / r) * c;
    }
    Vec c(1);
    c[0] = stretch(signed_angle2(q0_, x.tail<2>()), u_radius_);
    return c;
}

Vec TubularSetup::from_normal(double base_param, const Vec& fiber) const {
    if (kind_ == Kind::Point) {
        const double rho = fiber.norm();
        if (rho == 0.0) return x0_;
        const double r = stretch_inverse(rho, u_radius_);
        return M_.local_add(x0_, frame0_ * ((r / rho) * fiber));
    }
    Vec x(4);
    const double angle = kTwoPi * base_param;
    x.head<2>() = Eigen::Vector2d(std::cos(angle), std::sin(angle));
    x.tail<2>() = rot2v(q0_, stretch_inverse(fiber[0], u_radius_));
    return x;
}

std::vector<BundleChart> TubularSetup::default_partition() const {
    if (kind_ == Kind::Point) {
        const int k = rank_;
        return {BundleChart{Arc{-0.5, 1.5},
                            [k](double) { return Eigen::MatrixXd::Identity(k, k); },
                            [](double) { return 1.0; }}};
    }
    // Two genuinely different trivialisations of the (trivialisable) normal
    // bundle: the second chart flips the fiber orientation.
    const Arc a1{-0.05, 0.55}, a2{0.45, 1.05};
    auto rho1 = [a1, a2](double t) {
        const double b1 = arc_bump(a1, t), b2 = arc_bump(a2, t);
        return b1 / std::sqrt(b1 * b1 + b2 * b2);
    };
    auto rho2 = [a1, a2](double t) {
        const double b1 = arc_bump(a1, t), b2 = arc_bump(a2, t);
        return b2 / std::sqrt(b1 * b1 + b2 * b2);
    };
    return {BundleChart{a1, [](double) { return Eigen::MatrixXd::Identity(1, 1); }, rho1},
            BundleChart{a2, [](double) { return -Eigen::MatrixXd::Identity(1, 1); }, rho2}};
}

namespace {

ManifoldLoop map_loop_nodes(const TubularSetup& setup, const ManifoldLoop& loop,
                            const VerticalFlow& flow, bool inverse) {
    Eigen::MatrixXd out(loop.nodes(), loop.dim());
    for (int i = 0; i < loop.nodes(); ++i) {
        const Vec x = loop.at_node(i);
        if (!setup.in_tube(x)) {
            out.row(i) = x.transpose();
            continue;
        }
        const double p = setup.base_param(x);
        const Vec w = setup.normal_coords(x);
        const Vec moved = flow.flow(p, w, inverse);
        out.row(i) = setup.from_normal(p, moved).transpose();
    }
    return ManifoldLoop(setup.manifold(), GridLoop(std::move(out), Interp::CubicPeriodic),
                        loop.smooth_certified());
}

} // namespace

BasedTrivialization based_trivialize(const TubularSetup& setup, const ManifoldLoop& alpha) {
    const Vec start = alpha.at_node(0);
    if (!setup.in_tube(start))
        throw BasepointOutsideU("based_trivialize: alpha(0) is outside the tube");
    const double v_param = setup.base_param(start);
    const Vec v_fiber = setup.normal_coords(start);

    VerticalFlow flow(SectionField(setup.default_partition(), v_param, v_fiber));
    ManifoldLoop fiber_loop = map_loop_nodes(setup, alpha, flow, /*inverse=*/false);
    return {std::move(fiber_loop), v_fiber, v_param};
}

ManifoldLoop based_trivialize_inverse(const TubularSetup& setup, const ManifoldLoop& beta,
                                      double base_param, const Vec& normal) {
    VerticalFlow flow(SectionField(setup.default_partition(), base_param, normal));
    return map_loop_nodes(setup, beta, flow, /*inverse=*/true);
}

} // namespace loopspace
