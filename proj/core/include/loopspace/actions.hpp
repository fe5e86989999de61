#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "loopspace/loops.hpp"
#include "loopspace/manifold_loop.hpp"

namespace loopspace {

/// Point of the rotation circle R/Z, reduced mod 1.
struct Rotation {
    double s;
    explicit Rotation(double value);
};

/// (R_s gamma)(t) = gamma(t + s).  Exact phase shift on fourier loops,
/// resampling (exact for node-aligned shifts) on grids.
FourierLoop rotate(const FourierLoop& loop, double s);
GridLoop rotate(const GridLoop& loop, double s);
Loop rotate(const Loop& loop, double s);

/// Orientation-preserving circle diffeomorphism psi(t) = t + d(t) with a
/// band-limited scalar displacement d; psi(t+1) = psi(t) + 1 by construction.
/// Construction certifies 1 + d'(t) >= c_min on a fine grid.
class CircleDiffeo {
public:
    explicit CircleDiffeo(FourierLoop displacement, double c_min = 0.05);
    static CircleDiffeo identity();
    static CircleDiffeo rotation_lift(double s);

    double apply(double t) const;
    double derivative(double t) const;
    /// Monotone inverse by bisection on the lift.
    double inverse(double y) const;

    const FourierLoop& displacement() const { return displacement_; }
    bool is_rigid_rotation() const; ///< displacement is constant

private:
    FourierLoop displacement_;
};

/// (gamma . psi)(t) = gamma(psi(t)); rigid rotations delegate to rotate().
Loop precompose(const Loop& loop, const CircleDiffeo& psi, int out_samples = 0);

/// | ||R_s gamma||_n - ||gamma||_n |, the value-level witness of the
/// rotation invariance of the seminorm balls.
double norm_invariance_residual(const Loop& loop, double s, int order);

/// Largest certified delta (capped at 1/4) with seminorm(R_t gamma - gamma,
/// order) < eps for all sampled |t| < delta.
double orbit_modulus(const Loop& loop, double eps, int order = 0);

/// The norm-2 defect witness: n with 1/n < delta, h = 1/(2n) and
/// gamma = cos(2 pi n t), for which (I - R_h) doubles the sup norm.
struct DiscontinuityWitness {
    int n;
    double h;
    FourierLoop loop;
    double achieved_ratio; ///< ||(I - R_h) gamma||_0 / ||gamma||_0
    double lower_bound;    ///< 2
};
DiscontinuityWitness discontinuity_witness(double delta);

/// Finite family of loops bounded in a target seminorm, standing in for a
/// bounded set B of the strong operator topology.
struct OperatorProbe {
    std::vector<Loop> members;
    int order = 0;
};

/// max over the probe of seminorm(T gamma)/seminorm(gamma): a certified
/// lower bound for the operator norm on the probe's ball.
double operator_norm_lower_bound(const std::function<Loop(const Loop&)>& op,
                                 const OperatorProbe& probe);

/// Difference-quotient analysis of the orbit map t -> R_t gamma at steps
/// h, h/2, h/4 per derivative order.
struct OrbitDerivativeProbe {
    int order;
    std::array<double, 3> quotient_norms; ///< sup norms of the FD quotients
    std::array<double, 2> successive_gaps;
    double order_estimate;
    bool convergent;
};
struct OrbitSmoothnessReport {
    std::vector<OrbitDerivativeProbe> per_order;
    bool smooth_compatible;
};
OrbitSmoothnessReport orbit_smoothness_probe(const Loop& loop, int max_order = 2,
                                             double h0 = 0.125);

enum class SpaceTag { C0, Lipschitz, Smooth };
SpaceTag parse_space_tag(std::string_view name);
std::string to_string(SpaceTag tag);

/// Verdict for one level of the continuity ladder of the rotation action.
struct LevelVerdict {
    std::string level;     // "i" .. "vii"
    std::string statement; // what the level asserts
    std::string status;    // verified-at-scale | refuted | not-testable
    double residual = 0.0;
    std::string note;
    std::optional<DiscontinuityWitness> witness;
};

struct ContinuityReport {
    SpaceTag space;
    int corpus_size = 0;
    std::vector<LevelVerdict> levels;
    std::string to_json_string(int indent = 2) const;
};

/// Aggregates the per-level checks over a loop corpus:
/// norm invariance for the topology levels, invariant-ball checks for
/// equicontinuity, orbit moduli for separate continuity, joint perturbation
/// sampling for joint continuity, and either a genuine refutation witness
/// (sup-norm spaces) or decaying operator probes (smooth space) for the
/// representation level.
ContinuityReport continuity_report(SpaceTag space, const std::vector<Loop>& corpus,
                                   double witness_delta = 0.3);

} // namespace loopspace
