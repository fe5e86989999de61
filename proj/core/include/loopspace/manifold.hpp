#pragma once

#include <random>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

#include "loopspace/errors.hpp"

namespace loopspace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Numerical tolerances shared by the geometric kernels.  All configurable;
/// the defaults are what the test suites pin against.
struct Tolerances {
    double tangent = 1e-10;  ///< tangency / on-manifold residual
    double geodesic = 1e-9;  ///< exp/log roundtrip residual
    double ode = 1e-6;       ///< RK4 transport and flow residual
    double glue = 1e-9;      ///< overlap agreement when patching loops
};

enum class ManifoldKind { Euclidean, Circle, Sphere2, FlatTorus2 };

/// A tangent vector anchored at a point of an embedded manifold.
struct TangentVector {
    Vec base;
    Vec vec;
};

/// Finite-dimensional manifold embedded in R^n with closed-form retraction,
/// tangent projector, geodesic local addition and parallel transport.
///
/// Supported instances: euclidean(n), the unit circle in R^2, the unit
/// sphere in R^3, and the flat torus (product of two unit circles) in R^4.
/// The flat torus is used instead of the donut torus so that geodesics,
/// log maps and transport all stay closed-form.
class EmbeddedManifold {
public:
    static EmbeddedManifold euclidean(int n);
    static EmbeddedManifold circle();
    static EmbeddedManifold sphere2();
    static EmbeddedManifold flat_torus2();

    /// Parses a CLI spec string: "euclidean:<n>", "circle", "sphere2",
    /// "flat-torus2".
    static EmbeddedManifold parse(std::string_view spec);

    ManifoldKind kind() const { return kind_; }
    int dim() const { return dim_; }
    int ambient_dim() const { return ambient_; }
    bool compact() const { return kind_ != ManifoldKind::Euclidean; }
    std::string spec_string() const;

    /// Injectivity-radius bound (geodesic length).
    double injectivity_radius() const { return r_inj_; }
    /// Ambient distance from the manifold to the singular set of the
    /// retraction (where a radial block collapses).
    double tube_radius() const { return eps_tub_; }
    /// Factor in (0,1) shrinking the admissible diagonal neighbourhood V.
    double safety() const { return safety_; }
    void set_safety(double s);

    const Tolerances& tol() const { return tol_; }
    Tolerances& tol() { return tol_; }

    /// Distance-to-manifold proxy: zero iff the point satisfies the defining
    /// constraints.  For the round manifolds this is | |x| - 1 | blockwise.
    double constraint_residual(const Vec& x) const;
    bool on_manifold(const Vec& x) const;
    void require_on_manifold(const Vec& x, const char* who) const;

    /// Tubular retraction p : U -> M, the identity on M.
    /// Throws OutsideTubularNeighbourhood when x is too far from M.
    Vec project(const Vec& x) const;

    /// Orthogonal projection of an ambient vector onto T_base M.
    Vec tangent_project(const Vec& base, const Vec& w) const;
    Mat tangent_projector(const Vec& base) const;
    bool is_tangent(const Vec& base, const Vec& v) const;

    /// Geodesic local addition eta: maps a tangent vector at `base` to the
    /// endpoint of the unit-time geodesic with initial velocity v.
    /// eta(0_u) = u exactly.
    Vec local_add(const Vec& base, const Vec& v) const;
    Vec local_add(const TangentVector& v) const { return local_add(v.base, v.vec); }

    /// Inverse of (pi x eta) restricted to the diagonal neighbourhood V:
    /// the tangent vector at `base` whose local addition reaches q.
    Vec local_add_inverse(const Vec& base, const Vec& q) const;

    /// Membership test for the diagonal neighbourhood V, modelled as
    /// { (u,q) : d_geo(u,q) < safety * r_inj }.
    bool diagonal_nbhd_contains(const Vec& u, const Vec& q) const;

    double geodesic_distance(const Vec& u, const Vec& q) const;

    /// Point and velocity of the geodesic t -> eta(t p) at parameter t.
    std::pair<Vec, Vec> geodesic_state(const Vec& base, const Vec& p, double t) const;

    /// Levi-Civita parallel transport of w from `base` to eta(p) along the
    /// geodesic t -> eta(t p).  Closed form for all built-in manifolds.
    Vec parallel_transport(const Vec& base, const Vec& p, const Vec& w) const;

    /// Transport of w backwards along the same geodesic, from eta(p) to base.
    Vec parallel_transport_inverse(const Vec& base, const Vec& p, const Vec& w) const;

    /// Generic RK4 fallback for transport, integrating w' = dP(c,c') w along
    /// the geodesic.  Cross-checked against the closed forms in the tests.
    Vec parallel_transport_rk4(const Vec& base, const Vec& p, const Vec& w,
                               int steps = 64) const;

    /// Uniform-ish random on-manifold point / unit-scaled tangent, seeded.
    Vec random_point(std::mt19937_64& rng) const;
    Vec random_tangent(const Vec& base, std::mt19937_64& rng) const;

private:
    EmbeddedManifold(ManifoldKind kind, int dim, int ambient, double r_inj,
                     double eps_tub);

    // Directional derivative of the tangent projector at x along xdot.
    Mat projector_derivative(const Vec& x, const Vec& xdot) const;

    ManifoldKind kind_;
    int dim_;
    int ambient_;
    double r_inj_;
    double eps_tub_;
    double safety_ = 0.9;
    Tolerances tol_;
};

enum class BundleKind { Tangent, Trivial };
enum class ConnectionKind { LeviCivita, Flat };

/// Descriptor of a vector bundle over an embedded manifold.  Tangent bundles
/// carry the Levi-Civita connection of the embedding, trivial bundles the
/// flat one.
struct VectorBundleDescriptor {
    EmbeddedManifold base;
    BundleKind kind;
    int rank;
    ConnectionKind connection;

    static VectorBundleDescriptor tangent(EmbeddedManifold M);
    static VectorBundleDescriptor trivial(EmbeddedManifold M, int rank);

    /// Fiber transport from u to local_add(u,p) along the geodesic.
    Vec transport(const Vec& u, const Vec& p, const Vec& f) const;
    Vec transport_inverse(const Vec& u, const Vec& p, const Vec& f) const;
    void require_in_fiber(const Vec& u, const Vec& f, const char* who) const;
};

/// A point of the total space of a bundle: base point plus fiber vector.
struct BundlePoint {
    Vec base;
    Vec fiber;
};

/// A tangent of the total space in connection coordinates (u, p, v, w):
/// u base point, p horizontal (tangent at u), v the anchored fiber vector,
/// w the vertical component.
struct BundleTangent {
    Vec u, p, v, w;
};

/// Induced local addition on the total space:
///   (u,p,v,w) -> (eta(p), P(u,eta(p))(v + w)).
BundlePoint bundle_local_add(const VectorBundleDescriptor& B, const Vec& u,
                             const Vec& p, const Vec& v, const Vec& w);

/// Explicit inverse: given the anchored point (u,v) and target (x,w'),
/// recovers (u, p, v, w) with bundle_local_add(B,u,p,v,w) = (x,w').
BundleTangent bundle_local_add_inverse(const VectorBundleDescriptor& B,
                                       const BundlePoint& anchor,
                                       const BundlePoint& target);

} // namespace loopspace
