#include "loopspace/loops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace loopspace {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double wrap_unit(double t) {
    double u = t - std::floor(t);
    if (u >= 1.0) u -= 1.0; // guards against floor rounding at negative -0
    return u;
}

inline int wrap_index(int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
}

} // namespace

GridLoop::GridLoop(Eigen::MatrixXd samples, Interp interp)
    : samples_(std::move(samples)), interp_(interp) {
    if (samples_.rows() < 8)
        throw InvalidLoop("grid loop needs at least 8 samples, got " +
                          std::to_string(samples_.rows()));
    if (samples_.cols() < 1) throw InvalidLoop("grid loop needs dimension >= 1");
    if (!samples_.allFinite()) throw InvalidLoop("grid loop has non-finite samples");
}

GridLoop GridLoop::constant(const Vec& value, int n_samples) {
    Eigen::MatrixXd s(n_samples, value.size());
    s.rowwise() = value.transpose();
    return GridLoop(std::move(s));
}

Vec GridLoop::sample(int i) const {
    return samples_.row(wrap_index(i, size())).transpose();
}

Vec GridLoop::evaluate(double t) const {
    const int n = size();
    const double pos = wrap_unit(t) * n;
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) <= 1e-9)
        return sample(static_cast<int>(nearest));

    const int i = static_cast<int>(std::floor(pos));
    const double f = pos - i;
    if (interp_ == Interp::Linear) {
        return (1.0 - f) * sample(i) + f * sample(i + 1);
    }
    // Catmull-Rom, periodic.
    const Vec p0 = sample(i - 1), p1 = sample(i), p2 = sample(i + 1), p3 = sample(i + 2);
    return 0.5 * (2.0 * p1 + f * ((p2 - p0) +
                  f * ((2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) +
                  f * (3.0 * (p1 - p2) + p3 - p0))));
}

GridLoop GridLoop::operator+(const GridLoop& other) const {
    if (size() != other.size() || dim() != other.dim())
        throw DimensionMismatch("grid loop addition");
    return GridLoop(samples_ + other.samples_, interp_);
}

GridLoop GridLoop::operator-(const GridLoop& other) const {
    if (size() != other.size() || dim() != other.dim())
        throw DimensionMismatch("grid loop subtraction");
    return GridLoop(samples_ - other.samples_, interp_);
}

GridLoop GridLoop::operator*(double c) const { return GridLoop(samples_ * c, interp_); }

FourierLoop::FourierLoop(Eigen::MatrixXcd coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.rows() < 1 || coeffs_.cols() < 1)
        throw InvalidLoop("fourier loop needs degree >= 0 and dimension >= 1");
    if (!coeffs_.allFinite()) throw InvalidLoop("fourier loop has non-finite coefficients");
    // c_0 must be real for a real-valued loop.
    const double scale = 1.0 + coeffs_.cwiseAbs().maxCoeff();
    for (int d = 0; d < coeffs_.cols(); ++d) {
        if (std::abs(coeffs_(0, d).imag()) > 1e-12 * scale)
            throw InvalidLoop("fourier loop: c_0 has a non-trivial imaginary part");
        coeffs_(0, d) = std::complex<double>(coeffs_(0, d).real(), 0.0);
    }
}

FourierLoop FourierLoop::constant(const Vec& value) {
    Eigen::MatrixXcd c(1, value.size());
    for (int d = 0; d < value.size(); ++d) c(0, d) = value[d];
    return FourierLoop(std::move(c));
}

FourierLoop FourierLoop::zero(int dim, int degree) {
    return FourierLoop(Eigen::MatrixXcd::Zero(degree + 1, dim));
}

FourierLoop FourierLoop::cosine(int k, double amplitude) {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(k + 1, 1);
    if (k == 0)
        c(0, 0) = amplitude;
    else
        c(k, 0) = amplitude / 2.0;
    return FourierLoop(std::move(c));
}

FourierLoop FourierLoop::sine(int k, double amplitude) {
    if (k == 0) return zero(1, 0);
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(k + 1, 1);
    c(k, 0) = std::complex<double>(0.0, -amplitude / 2.0);
    return FourierLoop(std::move(c));
}

Vec FourierLoop::evaluate(double t) const {
    const int m = degree();
    Vec out(dim());
    for (int d = 0; d < dim(); ++d) out[d] = coeffs_(0, d).real();
    for (int k = 1; k <= m; ++k) {
        const auto phase = std::polar(1.0, kTwoPi * k * t);
        for (int d = 0; d < dim(); ++d)
            out[d] += 2.0 * (coeffs_(k, d) * phase).real();
    }
    return out;
}

FourierLoop FourierLoop::derivative(int order) const {
    Eigen::MatrixXcd c = coeffs_;
    for (int k = 0; k <= degree(); ++k) {
        std::complex<double> factor = 1.0;
        for (int j = 0; j < order; ++j) factor *= std::complex<double>(0.0, kTwoPi * k);
        c.row(k) *= factor;
    }
    return FourierLoop(std::move(c));
}

namespace {

Eigen::MatrixXcd padded(const Eigen::MatrixXcd& c, int degree) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(degree + 1, c.cols());
    out.topRows(c.rows()) = c;
    return out;
}

} // namespace

FourierLoop FourierLoop::operator+(const FourierLoop& other) const {
    if (dim() != other.dim()) throw DimensionMismatch("fourier loop addition");
    const int m = std::max(degree(), other.degree());
    return FourierLoop(padded(coeffs_, m) + padded(other.coeffs_, m));
}

FourierLoop FourierLoop::operator-(const FourierLoop& other) const {
    if (dim() != other.dim()) throw DimensionMismatch("fourier loop subtraction");
    const int m = std::max(degree(), other.degree());
    return FourierLoop(padded(coeffs_, m) - padded(other.coeffs_, m));
}

FourierLoop FourierLoop::operator*(double c) const { return FourierLoop(coeffs_ * c); }

Vec evaluate(const Loop& loop, double t) {
    return std::visit([&](const auto& l) { return l.evaluate(t); }, loop);
}

int loop_dim(const Loop& loop) {
    return std::visit([](const auto& l) { return l.dim(); }, loop);
}

LoopClassTag loop_class(const Loop& loop) {
    if (std::holds_alternative<FourierLoop>(loop)) return LoopClassTag::Smooth;
    return std::get<GridLoop>(loop).interp() == Interp::CubicPeriodic
               ? LoopClassTag::Lipschitz
               : LoopClassTag::C0;
}

bool member_of(const Loop& loop, LoopClassTag tag) {
    auto rank = [](LoopClassTag t) {
        switch (t) {
            case LoopClassTag::Smooth: return 2;
            case LoopClassTag::Lipschitz: return 1;
            case LoopClassTag::C0: return 0;
        }
        return 0;
    };
    return rank(loop_class(loop)) >= rank(tag);
}

std::string to_string(LoopClassTag tag) {
    switch (tag) {
        case LoopClassTag::C0: return "C0";
        case LoopClassTag::Lipschitz: return "Lipschitz";
        case LoopClassTag::Smooth: return "Smooth";
    }
    return {};
}

double seminorm(const GridLoop& loop, int order) {
    if (order < 0) throw DerivativeUnavailable("negative seminorm order");
    if (order > 0)
        throw DerivativeUnavailable(
            "grid loops carry no certified derivatives; use a fourier representation");
    return loop.samples().rowwise().norm().maxCoeff();
}

namespace {

/// sup_t |f(t)| for a trigonometric polynomial, via a dense scan of |f|^2
/// followed by ternary refinement around each local maximum.
double fourier_sup(const FourierLoop& f) {
    const int grid = std::max(1024, 32 * (f.degree() + 1));
    auto g = [&](double t) { return f.evaluate(t).squaredNorm(); };

    std::vector<double> vals(grid);
    for (int i = 0; i < grid; ++i) vals[i] = g(static_cast<double>(i) / grid);

    double best = *std::max_element(vals.begin(), vals.end());
    const double h = 1.0 / grid;
    for (int i = 0; i < grid; ++i) {
        const double prev = vals[(i + grid - 1) % grid];
        const double next = vals[(i + 1) % grid];
        if (vals[i] < prev || vals[i] < next) continue;
        if (vals[i] == prev && vals[i] == next) continue; // plateau interior
        double lo = (i - 1) * h, hi = (i + 1) * h;
        for (int iter = 0; iter < 80; ++iter) {
            const double a = lo + (hi - lo) / 3.0;
            const double b = hi - (hi - lo) / 3.0;
            if (g(a) < g(b))
                lo = a;
            else
                hi = b;
        }
        best = std::max(best, g(0.5 * (lo + hi)));
    }
    return std::sqrt(best);
}

} // namespace

double seminorm(const FourierLoop& loop, int order) {
    if (order < 0) throw DerivativeUnavailable("negative seminorm order");
    double best = 0.0;
    for (int j = 0; j <= order; ++j)
        best = std::max(best, fourier_sup(j == 0 ? loop : loop.derivative(j)));
    return best;
}

double seminorm(const Loop& loop, int order) {
    return std::visit([&](const auto& l) { return seminorm(l, order); }, loop);
}

GridLoop to_grid(const Loop& loop, int n_samples, Interp interp) {
    if (n_samples < 8) throw InsufficientResolution("to_grid: need at least 8 samples");
    Eigen::MatrixXd s(n_samples, loop_dim(loop));
    for (int i = 0; i < n_samples; ++i)
        s.row(i) = evaluate(loop, static_cast<double>(i) / n_samples).transpose();
    return GridLoop(std::move(s), interp);
}

namespace {

/// Direct DFT coefficient c_k = (1/N) sum_j gamma_j e^{-2 pi i k j / N}.
Eigen::MatrixXcd dft_coefficients(const Eigen::MatrixXd& samples, int max_degree) {
    const int n = static_cast<int>(samples.rows());
    const int dim = static_cast<int>(samples.cols());
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(max_degree + 1, dim);
    for (int k = 0; k <= max_degree; ++k) {
        for (int j = 0; j < n; ++j) {
            const int kj = static_cast<int>((static_cast<long long>(k) * j) % n);
            const auto w = std::polar(1.0, -kTwoPi * kj / n);
            for (int d = 0; d < dim; ++d) c(k, d) += samples(j, d) * w;
        }
    }
    c /= static_cast<double>(n);
    return c;
}

} // namespace

FourierLoop to_fourier(const Loop& loop, int degree) {
    if (degree < 0) throw InsufficientResolution("to_fourier: degree must be >= 0");
    if (const auto* f = std::get_if<FourierLoop>(&loop)) {
        Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(degree + 1, f->dim());
        const int keep = std::min(degree, f->degree());
        c.topRows(keep + 1) = f->coeffs().topRows(keep + 1);
        return FourierLoop(std::move(c));
    }
    const auto& g = std::get<GridLoop>(loop);
    if (g.size() < 2 * degree + 2)
        throw InsufficientResolution("to_fourier: need N >= 2*degree + 2, have N = " +
                                     std::to_string(g.size()));
    return FourierLoop(dft_coefficients(g.samples(), degree));
}

FourierFit to_fourier_report(const GridLoop& loop, int degree) {
    FourierLoop fit = to_fourier(Loop(loop), degree);
    const int n = loop.size();

    double resid = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / n;
        resid = std::max(resid, (fit.evaluate(t) - loop.sample(i)).norm());
    }

    const int full = n / 2;
    double tail = 0.0;
    if (full > degree) {
        const Eigen::MatrixXcd all = dft_coefficients(loop.samples(), full);
        for (int k = degree + 1; k <= full; ++k) tail += 2.0 * all.row(k).norm();
    }
    return {std::move(fit), resid, tail};
}

bool Arc::contains(double t) const {
    const double u = wrap_unit(t);
    for (double shift : {0.0, 1.0, -1.0}) {
        const double x = u + shift;
        if (x > lo && x < hi) return true;
    }
    return false;
}

GridLoop locality_patch(const std::vector<Arc>& cover, const std::vector<Loop>& pieces,
                        int n_samples, double tol_glue) {
    if (cover.size() != pieces.size() || cover.empty())
        throw DimensionMismatch("locality_patch: cover and pieces must pair up");
    const int dim = loop_dim(pieces.front());
    for (const auto& p : pieces)
        if (loop_dim(p) != dim) throw DimensionMismatch("locality_patch: mixed dimensions");

    Eigen::MatrixXd out(n_samples, dim);
    for (int i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i) / n_samples;
        Vec acc = Vec::Zero(dim);
        Vec first;
        int hits = 0;
        for (std::size_t a = 0; a < cover.size(); ++a) {
            if (!cover[a].contains(t)) continue;
            const Vec val = evaluate(pieces[a], t);
            if (hits == 0) first = val;
            else if ((val - first).norm() > tol_glue)
                throw OverlapMismatch("pieces disagree by " +
                                      std::to_string((val - first).norm()) + " at t = " +
                                      std::to_string(t));
            acc += val;
            ++hits;
        }
        if (hits == 0)
            throw CoverIncomplete("no arc covers t = " + std::to_string(t));
        out.row(i) = (acc / hits).transpose();
    }
    return GridLoop(std::move(out), Interp::Linear);
}

SmoothMap SmoothMap::identity(int n) {
    return {n, n, [](const Vec& x) { return x; }, nullptr, "identity"};
}

SmoothMap SmoothMap::linear(const Eigen::MatrixXd& A) {
    return {static_cast<int>(A.cols()), static_cast<int>(A.rows()),
            [A](const Vec& x) { return Vec(A * x); }, nullptr, "linear"};
}

SmoothMap SmoothMap::coordinatewise(int n, std::function<double(double)> f,
                                    std::string name) {
    return {n, n,
            [f = std::move(f)](const Vec& x) {
                Vec y(x.size());
                for (int i = 0; i < x.size(); ++i) y[i] = f(x[i]);
                return y;
            },
            nullptr, std::move(name)};
}

GridLoop postcompose(const GridLoop& loop, const SmoothMap& phi) {
    if (loop.dim() != phi.domain_dim)
        throw DimensionMismatch("postcompose: loop lives in R^" + std::to_string(loop.dim()) +
                                ", map expects R^" + std::to_string(phi.domain_dim));
    Eigen::MatrixXd out(loop.size(), phi.codomain_dim);
    for (int i = 0; i < loop.size(); ++i) {
        const Vec x = loop.sample(i);
        if (phi.in_domain && !phi.in_domain(x))
            throw DomainViolation("postcompose: sample " + std::to_string(i) +
                                  " leaves the domain of " + phi.name);
        out.row(i) = phi.apply(x).transpose();
    }
    return GridLoop(std::move(out), loop.interp());
}

PostcomposeResult postcompose(const FourierLoop& loop, const SmoothMap& phi,
                              int out_degree) {
    const int n = std::max({256, 4 * (loop.degree() + 1), 2 * out_degree + 2});
    GridLoop sampled = postcompose(to_grid(Loop(loop), n), phi);
    FourierFit fit = to_fourier_report(sampled, out_degree);
    return {std::move(fit.loop), fit.node_residual_sup};
}

std::vector<Loop> components(const Loop& loop) {
    std::vector<Loop> out;
    if (const auto* g = std::get_if<GridLoop>(&loop)) {
        for (int d = 0; d < g->dim(); ++d)
            out.emplace_back(GridLoop(g->samples().col(d), g->interp()));
    } else {
        const auto& f = std::get<FourierLoop>(loop);
        for (int d = 0; d < f.dim(); ++d)
            out.emplace_back(FourierLoop(f.coeffs().col(d)));
    }
    return out;
}

Loop join(const std::vector<Loop>& comps) {
    if (comps.empty()) throw DimensionMismatch("join: no components");
    if (std::holds_alternative<GridLoop>(comps.front())) {
        const auto& first = std::get<GridLoop>(comps.front());
        int dim = 0;
        for (const auto& c : comps) {
            const auto* g = std::get_if<GridLoop>(&c);
            if (!g || g->size() != first.size() || g->interp() != first.interp())
                throw DimensionMismatch("join: incompatible grid components");
            dim += g->dim();
        }
        Eigen::MatrixXd s(first.size(), dim);
        int col = 0;
        for (const auto& c : comps) {
            const auto& g = std::get<GridLoop>(c);
            s.middleCols(col, g.dim()) = g.samples();
            col += g.dim();
        }
        return GridLoop(std::move(s), first.interp());
    }
    const auto& first = std::get<FourierLoop>(comps.front());
    int dim = 0;
    for (const auto& c : comps) {
        const auto* f = std::get_if<FourierLoop>(&c);
        if (!f || f->degree() != first.degree())
            throw DimensionMismatch("join: incompatible fourier components");
        dim += f->dim();
    }
    Eigen::MatrixXcd coef(first.degree() + 1, dim);
    int col = 0;
    for (const auto& c : comps) {
        const auto& f = std::get<FourierLoop>(c);
        coef.middleCols(col, f.dim()) = f.coeffs();
        col += f.dim();
    }
    return FourierLoop(std::move(coef));
}

} // namespace loopspace
