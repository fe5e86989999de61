#pragma once

#include "loopspace/loops.hpp"
#include "loopspace/manifold.hpp"
#include "loopspace/manifold_loop.hpp"

namespace loopspace {

/// The standard bump: phi(t) = c * exp(-1/(1-t^2)) on (-1,1), zero outside,
/// with c fixed once so that the integral is 1.
class BumpFunction {
public:
    static const BumpFunction& standard();
    double value(double t) const;
    double derivative(double t) const;
    double normalization() const { return c_; }
    /// Quadrature check of the unit integral, for the certification suites.
    double integral(int panels = 20000) const;

private:
    BumpFunction();
    double c_;
};

/// Plateau cutoff: 1 on (-inf, 1], 0 on [2, inf), smooth and monotone
/// decreasing in between.
double plateau(double x);

/// Certified constants for a compact embedded manifold:
///   |x - y| < mu            implies (x,y) in V, and
///   |x - y| < eps_tube      implies y retracts with |x - p(y)| < mu.
struct ManifoldConstants {
    double mu;
    double eps_tube;
    int pairs_tested;
    int tube_points_tested;
};

ManifoldConstants manifold_constants(const EmbeddedManifold& M,
                                     int sample_pairs = 10000,
                                     std::uint64_t seed = 0x5eedbeef);

struct MollifierParams {
    double epsilon;
    double mu;
    double eps_tube;
    int quadrature; ///< 0 = auto (4N)

    static MollifierParams for_manifold(const EmbeddedManifold& M, int quadrature = 0);
};

/// Largest grid-resolvable oscillation threshold delta (capped at 1/4, with
/// a 0.5 safety factor) such that |s - t| < delta forces |gamma(s) - gamma(t)| < eps
/// on the sample grid.  Throws ResolutionTooCoarse when no delta >= 1/N works.
double delta_of(const GridLoop& loop, double eps);

/// Re-checks the defining inequality of delta on all sampled pairs.
bool delta_certificate(const GridLoop& loop, double eps, double delta);

/// Mollification R(gamma) = gamma * phi_delta with delta = delta_of(gamma, eps),
/// discretised as a normalised periodic convolution at quadrature resolution
/// Q (default 4N).  The result is a smooth grid loop with Q samples and
/// sup-distance below eps from the input.
GridLoop mollify(const GridLoop& loop, double eps, int quadrature = 0);

/// Same convolution with the scale delta pinned by the caller.
GridLoop mollify_fixed_delta(const GridLoop& loop, double delta, int quadrature = 0);

/// Spectral evaluation of the same discrete convolution (radix-2 FFT);
/// requires the quadrature resolution to be a power of two.
GridLoop mollify_fft(const GridLoop& loop, double delta, int quadrature = 0);

/// Continuous-in-t quadrature of (gamma * phi_delta^(k))(t); k = 0 or 1.
/// Used to check the derivative identity D(gamma * phi) = gamma * D phi
/// against finite differences.
double convolve_eval(const GridLoop& loop, int component, double delta, double t,
                     int kernel_derivative, int quadrature = 0);

/// max_t |FD_h[R gamma](t) - (gamma * D phi_delta)(t)| over probe points,
/// with a step chosen small enough for the kernel scale.
double derivative_identity_residual(const GridLoop& loop, double delta,
                                    int probes = 32, int quadrature = 0);

/// Sup of the trigonometric tail above `cutoff_degree` of a grid loop
/// (bounded by the dropped coefficient amplitudes).
double fourier_tail_sup(const GridLoop& loop, int cutoff_degree);

/// Based mollifier R_0(gamma) = R(gamma) - R(gamma)(0), run at eps/2 so the
/// recentred loop stays eps-close.  Requires gamma(0) = 0.
GridLoop mollify_based(const GridLoop& loop, double eps);

/// Manifold mollification R_M = p . R at eps = eps_tube; every output sample
/// lies on M and pairs with the input inside the diagonal neighbourhood V.
/// The output keeps the input's node resolution and carries the smooth
/// certificate.
ManifoldLoop mollify_to_manifold(const ManifoldLoop& loop, const MollifierParams& params);

/// H(gamma, s)(t) = eta(s * eta^{-1}(R_M(gamma)(t), gamma(t))): the straight-line
/// homotopy in the chart of the mollified center.  H(.,0) = center, H(.,1) = gamma.
ManifoldLoop homotopy_eval(const ManifoldLoop& loop, const ManifoldLoop& center, double s);

} // namespace loopspace
