#pragma once

#include <functional>
#include <vector>

#include "loopspace/manifold_loop.hpp"
#include "loopspace/smoothing.hpp"

namespace loopspace {

/// A sampled section of the pullback bundle along a smooth center loop:
/// one tangent vector at alpha(t_i) per node.
class PullbackSection {
public:
    PullbackSection(ManifoldLoop center, Eigen::MatrixXd vectors);
    static PullbackSection zero(const ManifoldLoop& center);

    const ManifoldLoop& center() const { return center_; }
    int nodes() const { return static_cast<int>(vectors_.rows()); }
    const Eigen::MatrixXd& vectors() const { return vectors_; }
    Vec vector_at(int i) const { return vectors_.row(i).transpose(); }
    TangentVector tangent_at(int i) const;

    double sup_norm() const { return vectors_.rowwise().norm().maxCoeff(); }

    PullbackSection operator+(const PullbackSection& other) const;
    PullbackSection operator-(const PullbackSection& other) const;
    PullbackSection operator*(double c) const;

private:
    ManifoldLoop center_;
    Eigen::MatrixXd vectors_; // nodes x ambient
};

bool same_center(const ManifoldLoop& a, const ManifoldLoop& b, double tol);

/// Chart of the loop space anchored at a smooth center alpha:
/// forward = samplewise local addition, inverse = samplewise log map.
/// Arbitrary (non-smooth-certified) centers are rejected.
class Chart {
public:
    explicit Chart(ManifoldLoop center);

    const ManifoldLoop& center() const { return center_; }
    const EmbeddedManifold& manifold() const { return center_.manifold(); }
    int nodes() const { return center_.nodes(); }

    bool contains(const ManifoldLoop& beta) const;
    PullbackSection inverse(const ManifoldLoop& beta) const;
    ManifoldLoop forward(const PullbackSection& section) const;

private:
    void check_compatible(const ManifoldLoop& beta) const;
    ManifoldLoop center_;
};

/// Chart whose center is the mollification of beta; by the closeness
/// certificate it contains beta.
Chart find_chart_center(const ManifoldLoop& beta, const MollifierParams& params);
Chart find_chart_center(const ManifoldLoop& beta);

/// A pair of charts over the same manifold with the pointwise transition
///   theta_1(t, v) = (pi x eta_2)^{-1}(alpha_2(t), eta_1(v)).
class TransitionData {
public:
    TransitionData(Chart first, Chart second);

    const Chart& first() const { return first_; }
    const Chart& second() const { return second_; }

    bool in_domain(double t, const Vec& v) const;          // W_12 membership
    bool in_domain_reverse(double t, const Vec& v) const;  // W_21 membership

    /// v tangent at alpha_1(t) -> tangent at alpha_2(t).
    Vec pointwise(double t, const Vec& v) const;
    Vec pointwise_reverse(double t, const Vec& v) const;

    PullbackSection apply(const PullbackSection& section) const;
    PullbackSection apply_reverse(const PullbackSection& section) const;

private:
    Chart first_, second_;
};

/// Finite-difference probe of a section-to-section map along the segment
/// gamma + h * direction, with derivative estimates at h, h/2, h/4.
struct SmoothnessReport {
    double first_derivative_norm;
    double second_derivative_norm;
    double order_estimate;     ///< log2 of successive difference ratios
    bool linear_exact;         ///< differences below noise: exactly affine
    bool second_order;         ///< order_estimate >= 1.8 or linear_exact
};

SmoothnessReport smoothness_probe(
    const std::function<PullbackSection(const PullbackSection&)>& map,
    const PullbackSection& gamma, const PullbackSection& direction, double h0 = 1e-2);

/// Orthonormal tangent frames along a smooth loop, periodic after holonomy
/// correction.  The correction spreads the closure rotation linearly in t.
class MovingFrame {
public:
    MovingFrame(ManifoldLoop center, std::vector<Eigen::MatrixXd> frames,
                double holonomy_angle);

    const ManifoldLoop& center() const { return center_; }
    int nodes() const { return static_cast<int>(frames_.size()); }
    int rank() const { return static_cast<int>(frames_.front().cols()); }
    const Eigen::MatrixXd& frame_at(int i) const { return frames_[i]; }
    /// Closure rotation angle accumulated by uncorrected transport.
    double holonomy_angle() const { return holonomy_angle_; }

    double orthonormality_defect() const;

private:
    ManifoldLoop center_;
    std::vector<Eigen::MatrixXd> frames_; // each ambient x rank
    double holonomy_angle_;
};

MovingFrame frame_along(const ManifoldLoop& alpha);

/// Frame coordinates of a section: k scalar loops, and back.
std::vector<GridLoop> section_to_coords(const MovingFrame& frame,
                                        const PullbackSection& section);
PullbackSection coords_to_section(const MovingFrame& frame,
                                  const std::vector<GridLoop>& coords);

/// gamma(0), the evaluation fibration over the manifold.
Vec evaluate_at_zero(const Loop& loop);
Vec evaluate_at_zero(const ManifoldLoop& loop);

} // namespace loopspace
