#include "specrank/lanczos.hpp"

#include "specrank/error.hpp"
#include "specrank/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace specrank {

LanczosResult lanczos(const LinearOperator& op, std::span<const double> v1, std::size_t m,
                      LanczosOptions options) {
    const std::size_t n = op.dimension();
    if (m == 0) throw InvalidArgument("lanczos: step count must be at least 1");
    if (m > n)
        throw InvalidArgument("lanczos: " + std::to_string(m) +
                              " steps exceed the Krylov dimension bound n = " + std::to_string(n));
    if (v1.size() != n) throw DimensionError(n, v1.size(), "lanczos start vector");
    if (std::abs(norm2(v1) - 1.0) > 1e-8) throw InvalidArgument("lanczos: start vector must have unit norm");

    const bool keep = options.reorthogonalize || options.keep_basis;
    LanczosResult result;
    auto& alpha = result.tridiagonal.alpha;
    auto& beta = result.tridiagonal.beta;
    alpha.reserve(m);
    beta.reserve(m);

    std::vector<Vector> basis;
    if (keep) basis.reserve(m);
    Vector v(v1.begin(), v1.end());
    Vector v_prev(n, 0.0);
    Vector w(n);
    double beta_prev = 0.0;
    double norm_est = 0.0;

    for (std::size_t j = 0; j < m; ++j) {
        op.apply(v, w);
        const double a = dot(w, v);
        for (std::size_t i = 0; i < n; ++i) w[i] -= a * v[i] + beta_prev * v_prev[i];
        alpha.push_back(a);
        if (keep) basis.push_back(v);

        if (options.reorthogonalize) {
            // Classical Gram-Schmidt, applied twice.
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& q : basis) {
                    const double h = dot(w, q);
                    for (std::size_t i = 0; i < n; ++i) w[i] -= h * q[i];
                }
            }
        }
        if (j + 1 == m) break;

        const double b = norm2(w);
        norm_est = std::max(norm_est, std::sqrt(a * a + b * b + beta_prev * beta_prev));
        if (b <= 1e-12 * norm_est) {
            result.breakdown = true;
            break;
        }
        beta.push_back(b);
        v_prev.swap(v);
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / b;
        beta_prev = b;
    }
    if (options.keep_basis) result.basis = std::move(basis);
    return result;
}

RitzSpectrum tridiag_eigen(const TridiagonalMatrix& t) {
    const std::size_t m = t.alpha.size();
    if (m == 0) throw InvalidArgument("tridiag_eigen: empty matrix");
    if (t.beta.size() + 1 != m)
        throw DimensionError(m - 1, t.beta.size(), "tridiag_eigen off-diagonal");

    std::vector<double> d = t.alpha;
    std::vector<double> e(m, 0.0);
    std::copy(t.beta.begin(), t.beta.end(), e.begin());
    std::vector<double> z(m, 0.0);  // first row of the eigenvector matrix
    z[0] = 1.0;

    const std::size_t budget = 30 * m;
    std::size_t sweeps = 0;
    const auto sm = static_cast<std::ptrdiff_t>(m);
    for (std::ptrdiff_t l = 0; l < sm; ++l) {
        std::ptrdiff_t k;
        do {
            for (k = l; k < sm - 1; ++k) {
                const double dd = std::abs(d[k]) + std::abs(d[k + 1]);
                if (std::abs(e[k]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (k == l) break;
            if (++sweeps > budget)
                throw ConvergenceError("tridiag_eigen: no convergence after " + std::to_string(budget) +
                                       " QL sweeps");

            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[k] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            std::ptrdiff_t i;
            for (i = k - 1; i >= l; --i) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[k] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if (r == 0.0 && i >= l) continue;
            d[l] -= p;
            e[l] = g;
            e[k] = 0.0;
        } while (true);
    }

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    RitzSpectrum out;
    out.theta.reserve(m);
    out.tau_sq.reserve(m);
    for (std::size_t idx : order) {
        out.theta.push_back(d[idx]);
        out.tau_sq.push_back(z[idx] * z[idx]);
    }
    return out;
}

SpectrumBounds spectrum_bounds(const LinearOperator& op, BoundsOptions options) {
    if (options.steps < 2) throw InvalidArgument("spectrum_bounds: at least 2 Lanczos steps required");
    if (options.safety < 0.0) throw InvalidArgument("spectrum_bounds: safety margin must be >= 0");

    const std::size_t n = op.dimension();
    StreamRng rng(options.seed, 0xb0b0);
    Vector v(n);
    for (auto& x : v) x = rng.normal();
    const double nrm = norm2(v);
    for (auto& x : v) x /= nrm;

    const std::size_t steps = std::min(options.steps, n);
    const LanczosResult run = lanczos(op, v, steps, {.reorthogonalize = steps <= kReorthogonalizeUpTo});

    SpectrumBounds out{};
    if (run.tridiagonal.size() < 2 && n > 1) {
        const auto g = op.gershgorin_bounds();
        if (!g)
            throw ConvergenceError(
                "spectrum_bounds: Lanczos broke down after one step and no Gershgorin fallback exists "
                "for a " + op.kind() + " operator");
        out.ritz_min = g->first;
        out.ritz_max = g->second;
        out.gershgorin_fallback = true;
    } else {
        const RitzSpectrum ritz = tridiag_eigen(run.tridiagonal);
        out.ritz_min = ritz.theta.front();
        out.ritz_max = ritz.theta.back();
    }

    double width = out.ritz_max - out.ritz_min;
    const double magnitude = std::max(std::abs(out.ritz_max), std::abs(out.ritz_min));
    if (width <= 1e-12 * magnitude || width == 0.0) width = magnitude > 0.0 ? magnitude : 1.0;
    const double widen = options.safety * width;
    const double lower = options.assume_psd ? std::min(out.ritz_min, 0.0) : out.ritz_min;
    out.lambda_min = lower - widen;
    out.lambda_max = out.ritz_max + widen;
    return out;
}

}  // namespace specrank
