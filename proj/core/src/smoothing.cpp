#include "loopspace/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace loopspace {

namespace {

double raw_bump(double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t * t));
}

} // namespace

BumpFunction::BumpFunction() {
    // Trapezoid over [-1,1]; all derivatives vanish at the endpoints, so
    // this converges faster than any power of the step.
    const int panels = 200000;
    double sum = 0.0;
    for (int i = 1; i < panels; ++i) sum += raw_bump(-1.0 + 2.0 * i / panels);
    c_ = 1.0 / (sum * 2.0 / panels);
}

const BumpFunction& BumpFunction::standard() {
    static const BumpFunction instance;
    return instance;
}

double BumpFunction::value(double t) const { return c_ * raw_bump(t); }

double BumpFunction::derivative(double t) const {
    if (std::abs(t) >= 1.0) return 0.0;
    const double d = 1.0 - t * t;
    return value(t) * (-2.0 * t / (d * d));
}

double BumpFunction::integral(int panels) const {
    double sum = 0.0;
    for (int i = 1; i < panels; ++i) sum += value(-1.0 + 2.0 * i / panels);
    return sum * 2.0 / panels;
}

double plateau(double x) {
    auto psi = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
    const double up = psi(2.0 - x);
    const double down = psi(x - 1.0);
    if (up == 0.0) return 0.0;
    if (down == 0.0) return 1.0;
    return up / (up + down);
}

ManifoldConstants manifold_constants(const EmbeddedManifold& M, int sample_pairs,
                                     std::uint64_t seed) {
    if (!M.compact())
        throw NoCompactness("manifold_constants: " + M.spec_string() +
                            " is not compact");

    // Closed-form candidates from the chord/arc relation c = 2 sin(theta/2).
    const double target = M.safety() * M.injectivity_radius();
    double mu = 0.0;
    switch (M.kind()) {
        case ManifoldKind::Circle:
        case ManifoldKind::Sphere2:
            mu = 2.0 * std::sin(0.5 * target);
            break;
        case ManifoldKind::FlatTorus2:
            // Per-block chords below mu keep each block angle below
            // 2 asin(mu/2); the geodesic distance is then at most sqrt(2)
            // times that.
            mu = 2.0 * std::sin(target / (2.0 * std::sqrt(2.0)));
            break;
        default:
            break;
    }
    // |x - p(y)| <= 2 |x - y| for the radial retractions, so just under mu/2
    // feeds the tube constant.
    const double eps_tube = std::min(0.99 * M.tube_radius(), 0.49 * mu);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto direction = [&](int n) {
        Vec d(n);
        do {
            for (int i = 0; i < n; ++i) d[i] = gauss(rng);
        } while (d.norm() < 1e-8);
        return Vec(d / d.norm());
    };

    int pair_hits = 0;
    for (int it = 0; it < sample_pairs; ++it) {
        const Vec x = M.random_point(rng);
        const Vec probe = x + (1.2 * mu * unif(rng)) * direction(M.ambient_dim());
        Vec y;
        try {
            y = M.project(probe);
        } catch (const OutsideTubularNeighbourhood&) {
            continue;
        }
        if ((x - y).norm() >= mu) continue;
        ++pair_hits;
        if (!M.diagonal_nbhd_contains(x, y))
            throw NoAdmissibleConstants("mu candidate failed the sampled certificate");
    }

    int tube_hits = 0;
    for (int it = 0; it < sample_pairs; ++it) {
        const Vec x = M.random_point(rng);
        const Vec y = x + (eps_tube * unif(rng)) * direction(M.ambient_dim());
        Vec p;
        try {
            p = M.project(y);
        } catch (const OutsideTubularNeighbourhood&) {
            throw NoAdmissibleConstants("eps_tube candidate leaves the tubular neighbourhood");
        }
        if ((x - p).norm() >= mu)
            throw NoAdmissibleConstants("retraction moved a tube point out of the mu ball");
        ++tube_hits;
    }

    if (pair_hits == 0)
        throw NoAdmissibleConstants("sampled search produced no admissible pairs");
    return {mu, eps_tube, pair_hits, tube_hits};
}

MollifierParams MollifierParams::for_manifold(const EmbeddedManifold& M, int quadrature) {
    if (!M.compact()) {
        const double inf = std::numeric_limits<double>::infinity();
        return {0.1, inf, inf, quadrature};
    }
    const ManifoldConstants c = manifold_constants(M);
    return {c.eps_tube, c.mu, c.eps_tube, quadrature};
}

namespace {

/// Sampled modulus of continuity at index offset k.
double modulus_at(const GridLoop& loop, int k) {
    const int n = loop.size();
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        worst = std::max(worst, (loop.sample(i + k) - loop.sample(i)).norm());
    return worst;
}

} // namespace

double delta_of(const GridLoop& loop, double eps) {
    if (!(eps > 0.0)) throw ResolutionTooCoarse("delta_of: eps must be positive");
    const int n = loop.size();
    int k_star = 0;
    for (int k = 1; k <= n / 2; ++k) {
        if (modulus_at(loop, k) < eps)
            k_star = k;
        else
            break;
    }
    if (k_star < 1)
        throw ResolutionTooCoarse("delta_of: the grid cannot resolve eps = " +
                                  std::to_string(eps));
    return std::min(0.25, 0.5 * (k_star + 1) / n);
}

bool delta_certificate(const GridLoop& loop, double eps, double delta) {
    if (!(eps > 0.0 && delta > 0.0)) return false;
    const int n = loop.size();
    for (int k = 1; k < delta * n; ++k)
        if (modulus_at(loop, k) >= eps) return false;
    return true;
}

namespace {

struct Kernel {
    std::vector<double> weights; // normalised, taps at offsets -D..D
    int taps;                    // D
};

Kernel make_kernel(double delta, int quadrature) {
    const auto& bump = BumpFunction::standard();
    const int taps = static_cast<int>(std::floor(delta * quadrature));
    Kernel k;
    k.taps = taps;
    k.weights.resize(2 * taps + 1);
    double sum = 0.0;
    for (int d = -taps; d <= taps; ++d) {
        const double w = bump.value(static_cast<double>(d) / (quadrature * delta));
        k.weights[d + taps] = w;
        sum += w;
    }
    for (double& w : k.weights) w /= sum;
    return k;
}

int resolve_quadrature(const GridLoop& loop, int quadrature) {
    const int n = loop.size();
    if (quadrature == 0) return 4 * n;
    if (quadrature < 4 * n)
        throw ConfigError("quadrature resolution must be at least 4N = " +
                          std::to_string(4 * n));
    // Round up to a multiple of N so the input nodes survive exactly.
    return ((quadrature + n - 1) / n) * n;
}

Eigen::MatrixXd upsample(const GridLoop& loop, int q) {
    Eigen::MatrixXd up(q, loop.dim());
    for (int i = 0; i < q; ++i)
        up.row(i) = loop.evaluate(static_cast<double>(i) / q).transpose();
    return up;
}

} // namespace

GridLoop mollify_fixed_delta(const GridLoop& loop, double delta, int quadrature) {
    if (!(delta > 0.0 && delta <= 0.25))
        throw ResolutionTooCoarse("mollify: delta must lie in (0, 1/4]");
    const int q = resolve_quadrature(loop, quadrature);
    const Kernel kernel = make_kernel(delta, q);
    if (kernel.taps < 1)
        throw ResolutionTooCoarse("mollify: kernel support below the quadrature step");

    const Eigen::MatrixXd up = upsample(loop, q);
    Eigen::MatrixXd out(q, loop.dim());
    // Difference form: the weighted average is applied to deviations from
    // the target node, so constant loops pass through bitwise unchanged.
    for (int j = 0; j < q; ++j) {
        Eigen::RowVectorXd acc = up.row(j);
        for (int d = -kernel.taps; d <= kernel.taps; ++d) {
            const int idx = ((j - d) % q + q) % q;
            acc += kernel.weights[d + kernel.taps] * (up.row(idx) - up.row(j));
        }
        out.row(j) = acc;
    }
    return GridLoop(std::move(out), Interp::CubicPeriodic);
}

GridLoop mollify(const GridLoop& loop, double eps, int quadrature) {
    return mollify_fixed_delta(loop, delta_of(loop, eps), quadrature);
}

namespace {

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const int n = static_cast<int>(a.size());
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * M_PI / len;
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (int i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (int j = 0; j < len / 2; ++j) {
                const auto u = a[i + j];
                const auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= n;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

GridLoop mollify_fft(const GridLoop& loop, double delta, int quadrature) {
    const int q = resolve_quadrature(loop, quadrature);
    if (!is_power_of_two(q))
        throw ConfigError("mollify_fft: quadrature resolution must be a power of two");
    const Kernel kernel = make_kernel(delta, q);

    const Eigen::MatrixXd up = upsample(loop, q);
    std::vector<std::complex<double>> kseq(q, 0.0);
    for (int d = -kernel.taps; d <= kernel.taps; ++d)
        kseq[(d % q + q) % q] += kernel.weights[d + kernel.taps];
    fft_inplace(kseq, false);

    Eigen::MatrixXd out(q, loop.dim());
    std::vector<std::complex<double>> sig(q);
    for (int c = 0; c < loop.dim(); ++c) {
        for (int i = 0; i < q; ++i) sig[i] = up(i, c);
        fft_inplace(sig, false);
        for (int i = 0; i < q; ++i) sig[i] *= kseq[i];
        fft_inplace(sig, true);
        for (int i = 0; i < q; ++i) out(i, c) = sig[i].real();
    }
    return GridLoop(std::move(out), Interp::CubicPeriodic);
}

double convolve_eval(const GridLoop& loop, int component, double delta, double t,
                     int kernel_derivative, int quadrature) {
    const int q = resolve_quadrature(loop, quadrature);
    const auto& bump = BumpFunction::standard();
    const double step = 1.0 / q;
    // Quadrature nodes within the kernel support around t.
    const int lo = static_cast<int>(std::ceil((t - delta) * q));
    const int hi = static_cast<int>(std::floor((t + delta) * q));
    double acc = 0.0;
    for (int s = lo; s <= hi; ++s) {
        const double ts = s * step;
        const double u = (t - ts) / delta;
        const double k = kernel_derivative == 0 ? bump.value(u) / delta
                                                : bump.derivative(u) / (delta * delta);
        acc += loop.evaluate(ts)[component] * k;
    }
    return acc * step;
}

double derivative_identity_residual(const GridLoop& loop, double delta, int probes,
                                    int quadrature) {
    const double scale = std::sqrt(std::max(1.0, seminorm(loop, 0)));
    const double h = std::clamp(3e-4 * std::pow(delta, 1.5) / scale, 1e-9, 1e-6);
    double worst = 0.0;
    for (int p = 0; p < probes; ++p) {
        const double t = (p + 0.37) / probes;
        for (int c = 0; c < loop.dim(); ++c) {
            const double fd = (convolve_eval(loop, c, delta, t + h, 0, quadrature) -
                               convolve_eval(loop, c, delta, t - h, 0, quadrature)) /
                              (2.0 * h);
            const double exact = convolve_eval(loop, c, delta, t, 1, quadrature);
            worst = std::max(worst, std::abs(fd - exact));
        }
    }
    return worst;
}

double fourier_tail_sup(const GridLoop& loop, int cutoff_degree) {
    const int n = loop.size();
    const int top = n / 2;
    double tail = 0.0;
    for (int k = cutoff_degree + 1; k <= top; ++k) {
        Eigen::VectorXcd coeff = Eigen::VectorXcd::Zero(loop.dim());
        for (int j = 0; j < n; ++j) {
            const int kj = static_cast<int>((static_cast<long long>(k) * j) % n);
            const auto w = std::polar(1.0, -2.0 * M_PI * kj / n);
            coeff += loop.sample(j) * w;
        }
        tail += 2.0 * coeff.norm() / n;
    }
    return tail;
}

GridLoop mollify_based(const GridLoop& loop, double eps) {
    if (loop.sample(0).norm() > 1e-9)
        throw NotBased("mollify_based: gamma(0) = " + std::to_string(loop.sample(0).norm()) +
                       " is not the origin");
    GridLoop smooth = mollify(loop, 0.5 * eps);
    Eigen::MatrixXd shifted = smooth.samples();
    shifted.rowwise() -= smooth.samples().row(0);
    return GridLoop(std::move(shifted), Interp::CubicPeriodic);
}

ManifoldLoop mollify_to_manifold(const ManifoldLoop& loop, const MollifierParams& params) {
    const EmbeddedManifold& M = loop.manifold();
    if (M.compact() && !(params.epsilon > 0.0 && params.epsilon <= params.eps_tube))
        throw ConfigError("mollify_to_manifold: need 0 < eps <= eps_tube");

    const int n = loop.nodes();
    GridLoop flat = std::holds_alternative<GridLoop>(loop.rep())
                        ? std::get<GridLoop>(loop.rep())
                        : to_grid(loop.rep(), n);
    const GridLoop smooth = mollify(flat, params.epsilon, params.quadrature);

    const int stride = smooth.size() / n;
    Eigen::MatrixXd out(n, loop.dim());
    for (int i = 0; i < n; ++i)
        out.row(i) = M.project(smooth.sample(i * stride)).transpose();

    ManifoldLoop result(M, GridLoop(out, Interp::CubicPeriodic), /*smooth_certified=*/true);
    for (int i = 0; i < n; ++i) {
        if (!M.diagonal_nbhd_contains(loop.at_node(i), result.at_node(i)))
            throw PairOutsideV("mollify_to_manifold: node " + std::to_string(i) +
                               " leaves the diagonal neighbourhood");
    }
    return result;
}

ManifoldLoop homotopy_eval(const ManifoldLoop& loop, const ManifoldLoop& center, double s) {
    if (loop.nodes() != center.nodes())
        throw GridMismatch("homotopy_eval: node counts differ");
    const EmbeddedManifold& M = loop.manifold();
    Eigen::MatrixXd out(loop.nodes(), loop.dim());
    for (int i = 0; i < loop.nodes(); ++i) {
        const Vec c = center.at_node(i);
        const Vec v = M.local_add_inverse(c, loop.at_node(i));
        out.row(i) = M.local_add(c, s * v).transpose();
    }
    return ManifoldLoop(M, GridLoop(std::move(out), Interp::CubicPeriodic));
}

} // namespace loopspace
