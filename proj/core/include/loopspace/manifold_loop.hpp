#pragma once

#include "loopspace/loops.hpp"
#include "loopspace/manifold.hpp"

namespace loopspace {

/// A loop taking values in an embedded manifold.  Every stored sample (for
/// grids) resp. node value (for fourier representations) must satisfy the
/// manifold constraints within the tangency tolerance.
///
/// The `smooth` certificate marks loops that either are trigonometric
/// polynomials or were produced by the mollifier pipeline; chart centers
/// require it.
class ManifoldLoop {
public:
    /// `nodes` fixes the canonical sample resolution; 0 picks the grid size
    /// (grid reps) or a dense default (fourier reps).  Grid reps must match.
    ManifoldLoop(EmbeddedManifold manifold, Loop rep, bool smooth_certified = false,
                 int nodes = 0);

    const EmbeddedManifold& manifold() const { return manifold_; }
    const Loop& rep() const { return rep_; }
    bool smooth_certified() const { return smooth_; }

    int dim() const { return manifold_.ambient_dim(); }
    /// Number of canonical nodes t_i = i / nodes().
    int nodes() const { return nodes_; }
    double node_t(int i) const { return static_cast<double>(i) / nodes_; }
    Vec at_node(int i) const;

    /// Evaluates the representation and snaps the tiny interpolation drift
    /// back onto the manifold.
    Vec evaluate(double t) const;

    ManifoldLoop resampled(int n_samples) const;

private:
    EmbeddedManifold manifold_;
    Loop rep_;
    bool smooth_;
    int nodes_;
};

/// Rotates a manifold loop; node-aligned shifts are exact index rotations,
/// anything else is resampled and reprojected.
ManifoldLoop rotate_manifold_loop(const ManifoldLoop& loop, double s);

} // namespace loopspace
