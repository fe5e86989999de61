#pragma once

#include <complex>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "loopspace/errors.hpp"

namespace loopspace {

using Vec = Eigen::VectorXd;

enum class Interp { Linear, CubicPeriodic };

/// Periodic map S^1 -> R^n stored as N uniform samples gamma(i/N).
/// Periodicity is built in through index arithmetic mod N.
class GridLoop {
public:
    explicit GridLoop(Eigen::MatrixXd samples, Interp interp = Interp::Linear);
    static GridLoop constant(const Vec& value, int n_samples);

    int dim() const { return static_cast<int>(samples_.cols()); }
    int size() const { return static_cast<int>(samples_.rows()); }
    Interp interp() const { return interp_; }
    const Eigen::MatrixXd& samples() const { return samples_; }

    /// Sample with wrapped index.
    Vec sample(int i) const;
    Vec evaluate(double t) const;

    GridLoop with_interp(Interp interp) const { return GridLoop(samples_, interp); }

    GridLoop operator+(const GridLoop& other) const;
    GridLoop operator-(const GridLoop& other) const;
    GridLoop operator*(double c) const;

private:
    Eigen::MatrixXd samples_; // N x dim
    Interp interp_;
};

/// Real-valued trigonometric polynomial S^1 -> R^n of degree m, stored as
/// the nonnegative-frequency coefficients c_0..c_m per coordinate (the
/// negative ones are conjugates, which keeps the loop real by construction).
///
///   gamma_d(t) = Re(c_{0,d}) + sum_{k=1}^{m} 2 Re(c_{k,d} e^{2 pi i k t})
class FourierLoop {
public:
    explicit FourierLoop(Eigen::MatrixXcd coeffs); // (m+1) x dim
    static FourierLoop constant(const Vec& value);
    static FourierLoop zero(int dim, int degree);
    /// cos(2 pi k t) with the given amplitude, as a scalar loop.
    static FourierLoop cosine(int k, double amplitude = 1.0);
    static FourierLoop sine(int k, double amplitude = 1.0);

    int dim() const { return static_cast<int>(coeffs_.cols()); }
    int degree() const { return static_cast<int>(coeffs_.rows()) - 1; }
    const Eigen::MatrixXcd& coeffs() const { return coeffs_; }

    Vec evaluate(double t) const;
    FourierLoop derivative(int order = 1) const;

    FourierLoop operator+(const FourierLoop& other) const;
    FourierLoop operator-(const FourierLoop& other) const;
    FourierLoop operator*(double c) const;

private:
    Eigen::MatrixXcd coeffs_;
};

using Loop = std::variant<GridLoop, FourierLoop>;

Vec evaluate(const Loop& loop, double t);
int loop_dim(const Loop& loop);

enum class LoopClassTag { C0, Lipschitz, Smooth };

/// Representation-derived class: Fourier loops are the smooth ones,
/// cubic-interpolated grids stand in for Lipschitz loops and linear grids
/// for continuous ones.
LoopClassTag loop_class(const Loop& loop);

/// Membership respecting the inclusion chain Smooth <= Lipschitz <= C0.
bool member_of(const Loop& loop, LoopClassTag tag);

std::string to_string(LoopClassTag tag);

/// max over 0 <= j <= order of sup_t |gamma^(j)(t)|.  Derivatives are exact
/// Fourier differentiation and are only available on FourierLoop; grid
/// loops support order 0 (sampled sup norm).
double seminorm(const GridLoop& loop, int order);
double seminorm(const FourierLoop& loop, int order);
double seminorm(const Loop& loop, int order);

/// Resamples any loop onto N uniform nodes.
GridLoop to_grid(const Loop& loop, int n_samples, Interp interp = Interp::CubicPeriodic);

/// Exact trigonometric interpolation of the loop's samples.  Requires
/// N >= 2*degree + 2 when converting from a grid.
FourierLoop to_fourier(const Loop& loop, int degree);

struct FourierFit {
    FourierLoop loop;
    double node_residual_sup;  ///< sup over nodes of |fit - samples|
    double tail_energy_bound;  ///< sum of dropped coefficient amplitudes
};
FourierFit to_fourier_report(const GridLoop& loop, int degree);

/// Open arc of S^1, wrap-around allowed: (0.4, 1.1) covers the basepoint.
struct Arc {
    double lo, hi;
    bool contains(double t) const;
    double length() const { return hi - lo; }
};

/// Glues loops defined on an open cover of S^1 into one loop.  Each piece is
/// trusted only on its own arc; pieces must agree on overlaps within
/// tol_glue.  This is the finite-grid face of loop classes being local.
GridLoop locality_patch(const std::vector<Arc>& cover, const std::vector<Loop>& pieces,
                        int n_samples = 256, double tol_glue = 1e-9);

/// Descriptor of a smooth map U -> R^n used for post-composition.
struct SmoothMap {
    int domain_dim = 0;
    int codomain_dim = 0;
    std::function<Vec(const Vec&)> apply;
    std::function<bool(const Vec&)> in_domain; // null = everywhere
    std::string name;

    static SmoothMap identity(int n);
    static SmoothMap linear(const Eigen::MatrixXd& A);
    static SmoothMap coordinatewise(int n, std::function<double(double)> f,
                                    std::string name);
};

GridLoop postcompose(const GridLoop& loop, const SmoothMap& phi);

struct PostcomposeResult {
    FourierLoop loop;
    double truncation_residual; ///< sup-norm gap between samples and refit
};
/// Post-composition of a smooth loop: sample, apply, refit to the requested
/// degree; the truncation residual is reported rather than hidden.
PostcomposeResult postcompose(const FourierLoop& loop, const SmoothMap& phi,
                              int out_degree);

/// Canonical splitting of an R^n loop into n scalar loops, and its inverse.
std::vector<Loop> components(const Loop& loop);
Loop join(const std::vector<Loop>& comps);

} // namespace loopspace
