#pragma once

#include <functional>
#include <vector>

#include "loopspace/atlas.hpp"
#include "loopspace/manifold_loop.hpp"

namespace loopspace {

/// One trivialising patch of a bundle over a parameterised base: an open
/// arc of the parameter circle, a frame field on it (fiber chart coords ->
/// reference coords), and a bump rho whose squares sum to one over the cover.
struct BundleChart {
    Arc domain;
    std::function<Eigen::MatrixXd(double)> frame; // rank x rank, invertible
    std::function<double(double)> rho;
};

/// The compactly supported section s(v) built from a squared partition of
/// unity:  s(v)(x) = sum_l rho_l(pi(v)) rho_l(x) F_l(x) F_l(pi(v))^{-1} v.
/// Evaluating at the base point of v returns v itself.
class SectionField {
public:
    SectionField(std::vector<BundleChart> charts, double v_param, Vec v_fiber);

    int rank() const { return static_cast<int>(v_fiber_.size()); }
    double anchor_param() const { return v_param_; }
    const Vec& anchor_fiber() const { return v_fiber_; }

    Vec eval(double param) const;

    /// Max deviation of sum rho^2 from 1 over sampled parameters.
    static double partition_defect(const std::vector<BundleChart>& charts,
                                   int samples = 512);

private:
    std::vector<BundleChart> charts_;
    double v_param_;
    Vec v_fiber_;
};

/// Time-one flow of the vertical field
///   X_v(u) = -tau(|u|^2 / (1 + |v|^2)) s(v)(pi(u)),
/// integrated fiberwise by RK4.  Fibers are preserved exactly; points with
/// |u|^2 >= 2 (1 + |v|^2) sit outside the support and stay fixed.
class VerticalFlow {
public:
    VerticalFlow(SectionField section, int steps = 64);

    /// Flows a fiber vector over the given base parameter; inverse = flow of
    /// the negated field.
    Vec flow(double base_param, const Vec& fiber, bool inverse = false) const;

    const SectionField& section() const { return section_; }

private:
    SectionField section_;
    int steps_;
};

/// Desk-scale tubular data for a submanifold P of M:
///  - P a single point x0 (normal bundle = T_{x0} M), or
///  - P the first circle factor of the flat torus (rank-one normal bundle).
class TubularSetup {
public:
    static TubularSetup point(EmbeddedManifold M, Vec x0, double u_radius = 0.9);
    static TubularSetup torus_subcircle(Vec q0, double u_radius = 0.9);

    const EmbeddedManifold& manifold() const { return M_; }
    int rank() const { return rank_; }
    double u_radius() const { return u_radius_; }

    bool in_tube(const Vec& x) const;
    /// Base parameter of the retraction of x onto P (0 for a point P).
    double base_param(const Vec& x) const;
    /// phi: fiber coordinates of x over its retraction.
    Vec normal_coords(const Vec& x) const;
    /// phi^{-1} over a base parameter.
    Vec from_normal(double base_param, const Vec& fiber) const;

    /// Squared partition of unity subordinate to a cover of P: a single
    /// full-circle chart for a point, a genuine two-chart cover for the
    /// sub-circle case.
    std::vector<BundleChart> default_partition() const;

private:
    TubularSetup() : M_(EmbeddedManifold::euclidean(1)) {}

    enum class Kind { Point, TorusSubcircle } kind_ = Kind::Point;
    EmbeddedManifold M_;
    Vec x0_;
    Eigen::MatrixXd frame0_; // ambient x rank, for the point case
    Vec q0_;                 // fixed second-circle point, sub-circle case
    int rank_ = 0;
    double u_radius_ = 0.0;
};

/// alpha -> (Psi_{alpha(0)}(alpha), phi(alpha(0))): moves the basepoint onto
/// P by a compactly supported vertical flow; everything outside the tube is
/// untouched.
struct BasedTrivialization {
    ManifoldLoop fiber_loop; ///< based loop: e_0 lands on P
    Vec normal;              ///< phi(alpha(0))
    double base_param;       ///< retraction parameter of alpha(0)
};

BasedTrivialization based_trivialize(const TubularSetup& setup, const ManifoldLoop& alpha);
ManifoldLoop based_trivialize_inverse(const TubularSetup& setup, const ManifoldLoop& beta,
                                      double base_param, const Vec& normal);

} // namespace loopspace
