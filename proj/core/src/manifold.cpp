#include "loopspace/manifold.hpp"

#include <cmath>
#include <limits>

namespace loopspace {

namespace {

inline Eigen::Vector2d perp(const Eigen::Vector2d& u) {
    return {-u.y(), u.x()};
}

inline Eigen::Vector2d rot(const Eigen::Vector2d& u, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * u.x() - s * u.y(), s * u.x() + c * u.y()};
}

inline double signed_angle(const Eigen::Vector2d& u, const Eigen::Vector2d& q) {
    return std::atan2(u.x() * q.y() - u.y() * q.x(), u.dot(q));
}

constexpr double kIdentityResidual = 1e-14;

} // namespace

EmbeddedManifold::EmbeddedManifold(ManifoldKind kind, int dim, int ambient,
                                   double r_inj, double eps_tub)
    : kind_(kind), dim_(dim), ambient_(ambient), r_inj_(r_inj), eps_tub_(eps_tub) {}

EmbeddedManifold EmbeddedManifold::euclidean(int n) {
    if (n < 1) throw ConfigError("euclidean dimension must be >= 1");
    const double inf = std::numeric_limits<double>::infinity();
    return {ManifoldKind::Euclidean, n, n, inf, inf};
}

EmbeddedManifold EmbeddedManifold::circle() {
    return {ManifoldKind::Circle, 1, 2, M_PI, 1.0};
}

EmbeddedManifold EmbeddedManifold::sphere2() {
    return {ManifoldKind::Sphere2, 2, 3, M_PI, 1.0};
}

EmbeddedManifold EmbeddedManifold::flat_torus2() {
    return {ManifoldKind::FlatTorus2, 2, 4, M_PI, 1.0};
}

EmbeddedManifold EmbeddedManifold::parse(std::string_view spec) {
    if (spec == "circle") return circle();
    if (spec == "sphere2") return sphere2();
    if (spec == "flat-torus2" || spec == "flat_torus2") return flat_torus2();
    if (spec.rfind("euclidean:", 0) == 0) {
        const auto digits = spec.substr(10);
        int n = 0;
        for (char c : digits) {
            if (c < '0' || c > '9') throw ConfigError("bad manifold spec: " + std::string(spec));
            n = 10 * n + (c - '0');
        }
        return euclidean(n);
    }
    throw ConfigError("unknown manifold spec: " + std::string(spec) +
                      " (expected euclidean:<n>, circle, sphere2, flat-torus2)");
}

std::string EmbeddedManifold::spec_string() const {
    switch (kind_) {
        case ManifoldKind::Euclidean: return "euclidean:" + std::to_string(ambient_);
        case ManifoldKind::Circle: return "circle";
        case ManifoldKind::Sphere2: return "sphere2";
        case ManifoldKind::FlatTorus2: return "flat-torus2";
    }
    return {};
}

void EmbeddedManifold::set_safety(double s) {
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("safety factor must lie in (0,1)");
    safety_ = s;
}

double EmbeddedManifold::constraint_residual(const Vec& x) const {
    switch (kind_) {
        case ManifoldKind::Euclidean:
            return 0.0;
        case ManifoldKind::Circle:
        case ManifoldKind::Sphere2:
            return std::abs(x.norm() - 1.0);
        case ManifoldKind::FlatTorus2:
            return std::max(std::abs(x.head<2>().norm() - 1.0),
                            std::abs(x.tail<2>().norm() - 1.0));
    }
    return 0.0;
}

bool EmbeddedManifold::on_manifold(const Vec& x) const {
    if (x.size() != ambient_ || !x.allFinite()) return false;
    return constraint_residual(x) <= tol_.tangent;
}

void EmbeddedManifold::require_on_manifold(const Vec& x, const char* who) const {
    if (!on_manifold(x))
        throw NotOnManifold(std::string(who) + ": point is not on " + spec_string());
}

Vec EmbeddedManifold::project(const Vec& x) const {
    if (x.size() != ambient_ || !x.allFinite())
        throw OutsideTubularNeighbourhood("project: bad ambient point");
    if (kind_ == ManifoldKind::Euclidean) return x;
    if (constraint_residual(x) <= kIdentityResidual) return x;

    // The radial retraction degenerates only on the singular fibers where a
    // block vanishes; everything else projects.
    switch (kind_) {
        case ManifoldKind::Circle:
        case ManifoldKind::Sphere2: {
            const double r = x.norm();
            if (r <= 1e-9)
                throw OutsideTubularNeighbourhood(
                    "project: point sits on the singular fiber of the retraction");
            return x / r;
        }
        case ManifoldKind::FlatTorus2: {
            const double r1 = x.head<2>().norm();
            const double r2 = x.tail<2>().norm();
            if (r1 <= 1e-9 || r2 <= 1e-9)
                throw OutsideTubularNeighbourhood(
                    "project: point sits on the singular fiber of the retraction");
            Vec y(4);
            y.head<2>() = x.head<2>() / r1;
            y.tail<2>() = x.tail<2>() / r2;
            return y;
        }
        default:
            return x;
    }
}

Mat EmbeddedManifold::tangent_projector(const Vec& base) const {
    require_on_manifold(base, "tangent_projector");
    Mat P = Mat::Identity(ambient_, ambient_);
    switch (kind_) {
        case ManifoldKind::Euclidean:
            break;
        case ManifoldKind::Circle:
        case ManifoldKind::Sphere2:
            P -= base * base.transpose();
            break;
        case ManifoldKind::FlatTorus2:
            P.block<2, 2>(0, 0) -= base.head<2>() * base.head<2>().transpose();
            P.block<2, 2>(2, 2) -= base.tail<2>() * base.tail<2>().transpose();
            break;
    }
    return P;
}

Vec EmbeddedManifold::tangent_project(const Vec& base, const Vec& w) const {
    require_on_manifold(base, "tangent_project");
    if (w.size() != ambient_) throw DimensionMismatch("tangent_project: vector size");
    switch (kind_) {
        case ManifoldKind::Euclidean:
            return w;
        case ManifoldKind::Circle:
        case ManifoldKind::Sphere2:
            return w - w.dot(base) * base;
        case ManifoldKind::FlatTorus2: {
            Vec v = w;
            v.head<2>() -= w.head<2>().dot(base.head<2>()) * base.head<2>();
            v.tail<2>() -= w.tail<2>().dot(base.tail<2>()) * base.tail<2>();
            return v;
        }
    }
    return w;
}

bool EmbeddedManifold::is_tangent(const Vec& base, const Vec& v) const {
    if (v.size() != ambient_ || !v.allFinite()) return false;
    const Vec proj = tangent_project(base, v);
    return (v - proj).norm() <= tol_.tangent * (1.0 + v.norm());
}

Vec EmbeddedManifold::local_add(const Vec& base, const Vec& v) const {
    require_on_manifold(base, "local_add");
    if (!is_tangent(base, v))
        throw TangencyViolation("local_add: velocity not tangent at base");

    switch (kind_) {
        case ManifoldKind::Euclidean:
            return base + v;
        case ManifoldKind::Circle: {
            const double theta = v.dot(Vec(perp(base.head<2>())));
            if (theta == 0.0) return base;
            return rot(base.head<2>(), theta);
        }
        case ManifoldKind::Sphere2: {
            const double theta = v.norm();
            if (theta < 1e-300) return base;
            return std::cos(theta) * base + std::sin(theta) * (v / theta);
        }
        case ManifoldKind::FlatTorus2: {
            Vec out(4);
            const Eigen::Vector2d b1 = base.head<2>(), b2 = base.tail<2>();
            const double t1 = v.head<2>().dot(perp(b1));
            const double t2 = v.tail<2>().dot(perp(b2));
            out.head<2>() = (t1 == 0.0) ? b1 : rot(b1, t1);
            out.tail<2>() = (t2 == 0.0) ? b2 : rot(b2, t2);
            return out;
        }
    }
    return base;
}

Vec EmbeddedManifold::local_add_inverse(const Vec& base, const Vec& q) const {
    require_on_manifold(base, "local_add_inverse");
    require_on_manifold(q, "local_add_inverse");
    if (!diagonal_nbhd_contains(base, q))
        throw PairOutsideV("local_add_inverse: pair not in the diagonal neighbourhood");
    if (base == q) return Vec::Zero(ambient_);

    switch (kind_) {
        case ManifoldKind::Euclidean:
            return q - base;
        case ManifoldKind::Circle: {
            const double theta = signed_angle(base.head<2>(), q.head<2>());
            return theta * Vec(perp(base.head<2>()));
        }
        case ManifoldKind::Sphere2: {
            const double c = base.dot(q);
            Vec w = q - c * base;
            const double s = w.norm();
            if (s < 1e-300) return Vec::Zero(3);
            return std::atan2(s, c) * (w / s);
        }
        case ManifoldKind::FlatTorus2: {
            Vec v(4);
            const Eigen::Vector2d b1 = base.head<2>(), b2 = base.tail<2>();
            v.head<2>() = signed_angle(b1, q.head<2>()) * perp(b1);
            v.tail<2>() = signed_angle(b2, q.tail<2>()) * perp(b2);
            return v;
        }
    }
    return Vec::Zero(ambient_);
}

bool EmbeddedManifold::diagonal_nbhd_contains(const Vec& u, const Vec& q) const {
    require_on_manifold(u, "diagonal_nbhd_contains");
    require_on_manifold(q, "diagonal_nbhd_contains");
    if (kind_ == ManifoldKind::Euclidean) return true;
    return geodesic_distance(u, q) < safety_ * r_inj_;
}

double EmbeddedManifold::geodesic_distance(const Vec& u, const Vec& q) const {
    switch (kind_) {
        case ManifoldKind::Euclidean:
            return (q - u).norm();
        case ManifoldKind::Circle:
            return std::abs(signed_angle(u.head<2>(), q.head<2>()));
        case ManifoldKind::Sphere2: {
            const double c = u.dot(q);
            const Eigen::Vector3d a = u.head<3>(), b = q.head<3>();
            return std::atan2(a.cross(b).norm(), c);
        }
        case ManifoldKind::FlatTorus2: {
            const double t1 = signed_angle(u.head<2>(), q.head<2>());
            const double t2 = signed_angle(u.tail<2>(), q.tail<2>());
            return std::hypot(t1, t2);
        }
    }
    return 0.0;
}

std::pair<Vec, Vec> EmbeddedManifold::geodesic_state(const Vec& base, const Vec& p,
                                                     double t) const {
    switch (kind_) {
        case ManifoldKind::Euclidean:
            return {base + t * p, p};
        case ManifoldKind::Circle: {
            const double theta = p.dot(Vec(perp(base.head<2>())));
            const Eigen::Vector2d c = rot(base.head<2>(), t * theta);
            return {Vec(c), Vec(theta * perp(c))};
        }
        case ManifoldKind::Sphere2: {
            const double theta = p.norm();
            if (theta < 1e-300) return {base, Vec::Zero(3)};
            const Vec e = p / theta;
            const Vec c = std::cos(t * theta) * base + std::sin(t * theta) * e;
            const Vec vel = theta * (-std::sin(t * theta) * base + std::cos(t * theta) * e);
            return {c, vel};
        }
        case ManifoldKind::FlatTorus2: {
            const Eigen::Vector2d b1 = base.head<2>(), b2 = base.tail<2>();
            const double t1 = p.head<2>().dot(perp(b1));
            const double t2 = p.tail<2>().dot(perp(b2));
            const Eigen::Vector2d c1 = rot(b1, t * t1), c2 = rot(b2, t * t2);
            Vec c(4), vel(4);
            c.head<2>() = c1;
            c.tail<2>() = c2;
            vel.head<2>() = t1 * perp(c1);
            vel.tail<2>() = t2 * perp(c2);
            return {c, vel};
        }
    }
    return {base, p};
}

Vec EmbeddedManifold::parallel_transport(const Vec& base, const Vec& p,
                                         const Vec& w) const {
    require_on_manifold(base, "parallel_transport");
    if (!is_tangent(base, p) || !is_tangent(base, w))
        throw TangencyViolation("parallel_transport: inputs not tangent at base");

    switch (kind_) {
        case ManifoldKind::Euclidean:
            return w;
        case ManifoldKind::Circle: {
            const double c = w.dot(Vec(perp(base.head<2>())));
            const Vec end = local_add(base, p);
            return c * Vec(perp(end.head<2>()));
        }
        case ManifoldKind::Sphere2: {
            const double theta = p.norm();
            if (theta < 1e-300) return w;
            const Vec e = p / theta;
            const double a = w.dot(e);
            const Vec w_perp = w - a * e;
            const Vec e_end = std::cos(theta) * e - std::sin(theta) * base;
            return a * e_end + w_perp;
        }
        case ManifoldKind::FlatTorus2: {
            const Eigen::Vector2d b1 = base.head<2>(), b2 = base.tail<2>();
            const double c1 = w.head<2>().dot(perp(b1));
            const double c2 = w.tail<2>().dot(perp(b2));
            const Vec end = local_add(base, p);
            Vec out(4);
            out.head<2>() = c1 * perp(end.head<2>());
            out.tail<2>() = c2 * perp(end.tail<2>());
            return out;
        }
    }
    return w;
}

Vec EmbeddedManifold::parallel_transport_inverse(const Vec& base, const Vec& p,
                                                 const Vec& w) const {
    const auto [end, vel] = geodesic_state(base, p, 1.0);
    // Transport w backwards along the reversed geodesic.
    return parallel_transport(end, -vel, w);
}

Mat EmbeddedManifold::projector_derivative(const Vec& x, const Vec& xdot) const {
    Mat D = Mat::Zero(ambient_, ambient_);
    switch (kind_) {
        case ManifoldKind::Euclidean:
            break;
        case ManifoldKind::Circle:
        case ManifoldKind::Sphere2:
            D = -(xdot * x.transpose() + x * xdot.transpose());
            break;
        case ManifoldKind::FlatTorus2: {
            const Eigen::Vector2d x1 = x.head<2>(), x2 = x.tail<2>();
            const Eigen::Vector2d d1 = xdot.head<2>(), d2 = xdot.tail<2>();
            D.block<2, 2>(0, 0) = -(d1 * x1.transpose() + x1 * d1.transpose());
            D.block<2, 2>(2, 2) = -(d2 * x2.transpose() + x2 * d2.transpose());
            break;
        }
    }
    return D;
}

Vec EmbeddedManifold::parallel_transport_rk4(const Vec& base, const Vec& p,
                                             const Vec& w, int steps) const {
    require_on_manifold(base, "parallel_transport_rk4");
    if (!is_tangent(base, p) || !is_tangent(base, w))
        throw TangencyViolation("parallel_transport_rk4: inputs not tangent at base");
    if (steps < 1) throw OdeStepRejected("parallel_transport_rk4: steps < 1");

    const double h = 1.0 / steps;
    Vec y = w;
    auto field = [&](double t, const Vec& z) -> Vec {
        const auto [c, cdot] = geodesic_state(base, p, t);
        return projector_derivative(c, cdot) * z;
    };
    for (int i = 0; i < steps; ++i) {
        const double t = i * h;
        const Vec k1 = field(t, y);
        const Vec k2 = field(t + 0.5 * h, y + 0.5 * h * k1);
        const Vec k3 = field(t + 0.5 * h, y + 0.5 * h * k2);
        const Vec k4 = field(t + h, y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!y.allFinite()) throw OdeStepRejected("parallel_transport_rk4: diverged");
    }
    return y;
}

Vec EmbeddedManifold::random_point(std::mt19937_64& rng) const {
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto draw = [&](int n) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = gauss(rng);
        return v;
    };
    switch (kind_) {
        case ManifoldKind::Euclidean:
            return draw(ambient_);
        case ManifoldKind::Circle:
        case ManifoldKind::Sphere2: {
            Vec v = draw(ambient_);
            while (v.norm() < 1e-6) v = draw(ambient_);
            return Vec(v / v.norm());
        }
        case ManifoldKind::FlatTorus2: {
            Vec v(4);
            Vec a = draw(2), b = draw(2);
            while (a.norm() < 1e-6) a = draw(2);
            while (b.norm() < 1e-6) b = draw(2);
            v.head<2>() = a / a.norm();
            v.tail<2>() = b / b.norm();
            return v;
        }
    }
    return draw(ambient_);
}

Vec EmbeddedManifold::random_tangent(const Vec& base, std::mt19937_64& rng) const {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec w(ambient_);
    for (int i = 0; i < ambient_; ++i) w[i] = gauss(rng);
    return tangent_project(base, w);
}

VectorBundleDescriptor VectorBundleDescriptor::tangent(EmbeddedManifold M) {
    const int rank = M.dim();
    return {std::move(M), BundleKind::Tangent, rank, ConnectionKind::LeviCivita};
}

VectorBundleDescriptor VectorBundleDescriptor::trivial(EmbeddedManifold M, int rank) {
    if (rank < 1) throw ConfigError("bundle rank must be >= 1");
    return {std::move(M), BundleKind::Trivial, rank, ConnectionKind::Flat};
}

void VectorBundleDescriptor::require_in_fiber(const Vec& u, const Vec& f,
                                              const char* who) const {
    if (kind == BundleKind::Tangent) {
        if (!base.is_tangent(u, f))
            throw FiberMismatch(std::string(who) + ": vector not tangent at base point");
    } else {
        if (f.size() != rank || !f.allFinite())
            throw FiberMismatch(std::string(who) + ": fiber vector has wrong size");
    }
}

Vec VectorBundleDescriptor::transport(const Vec& u, const Vec& p, const Vec& f) const {
    if (kind == BundleKind::Tangent && connection == ConnectionKind::LeviCivita)
        return base.parallel_transport(u, p, f);
    return f;
}

Vec VectorBundleDescriptor::transport_inverse(const Vec& u, const Vec& p,
                                              const Vec& f) const {
    if (kind == BundleKind::Tangent && connection == ConnectionKind::LeviCivita)
        return base.parallel_transport_inverse(u, p, f);
    return f;
}

BundlePoint bundle_local_add(const VectorBundleDescriptor& B, const Vec& u,
                             const Vec& p, const Vec& v, const Vec& w) {
    B.base.require_on_manifold(u, "bundle_local_add");
    if (!B.base.is_tangent(u, p))
        throw TangencyViolation("bundle_local_add: p not tangent at u");
    B.require_in_fiber(u, v, "bundle_local_add");
    B.require_in_fiber(u, w, "bundle_local_add");

    const Vec x = B.base.local_add(u, p);
    if (!B.base.diagonal_nbhd_contains(u, x))
        throw PairOutsideV("bundle_local_add: (u, eta(p)) leaves V");
    return {x, B.transport(u, p, v + w)};
}

BundleTangent bundle_local_add_inverse(const VectorBundleDescriptor& B,
                                       const BundlePoint& anchor,
                                       const BundlePoint& target) {
    B.base.require_on_manifold(anchor.base, "bundle_local_add_inverse");
    B.base.require_on_manifold(target.base, "bundle_local_add_inverse");
    B.require_in_fiber(anchor.base, anchor.fiber, "bundle_local_add_inverse");
    B.require_in_fiber(target.base, target.fiber, "bundle_local_add_inverse");

    const Vec p = B.base.local_add_inverse(anchor.base, target.base);
    const Vec pulled = B.transport_inverse(anchor.base, p, target.fiber);
    return {anchor.base, p, anchor.fiber, pulled - anchor.fiber};
}

} // namespace loopspace
