#include "specrank/oracle.hpp"

#include "specrank/error.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace specrank {

namespace {

void check_cap(std::size_t n, std::size_t cap) {
    if (n > cap)
        throw CapExceededError("oracle: n = " + std::to_string(n) + " exceeds the dense cap of " +
                               std::to_string(cap) + "; use the KPM or Lanczos estimators instead");
}

// Inverse iteration for the pair near lambda. Returns ||A v - lambda v||.
// The shifted solve uses a local LU with partial pivoting: the host
// OpenBLAS getrf/gesv kernels return wrong solutions on some AVX-512 CPUs,
// and a check should not share the failure mode of what it checks.
double inverse_iteration_residual(std::size_t n, std::span<const double> a, double lambda, double scale) {
    // Tiny shift keeps the system nonsingular while staying well inside the
    // eigenvalue's basin.
    const double shift = lambda + 1e-10 * scale;
    std::vector<double> lu(a.begin(), a.end());
    for (std::size_t i = 0; i < n; ++i) lu[i * n + i] -= shift;
    std::vector<std::size_t> piv(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu[i * n + k]) > std::abs(lu[p * n + k])) p = i;
        piv[k] = p;
        if (p != k) std::swap_ranges(lu.begin() + static_cast<std::ptrdiff_t>(k * n),
                                     lu.begin() + static_cast<std::ptrdiff_t>(k * n + n),
                                     lu.begin() + static_cast<std::ptrdiff_t>(p * n));
        const double d = lu[k * n + k];
        if (d == 0.0) lu[k * n + k] = std::numeric_limits<double>::min();
        const double inv = 1.0 / lu[k * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            const double l = lu[i * n + k] *= inv;
            if (l == 0.0) continue;
            const double* rk = &lu[k * n];
            double* ri = &lu[i * n];
            for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
        }
    }

    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.01 * std::sin(static_cast<double>(i) + 1.0);
    for (int it = 0; it < 3; ++it) {
        for (std::size_t k = 0; k < n; ++k) std::swap(v[k], v[piv[k]]);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) v[i] -= lu[i * n + j] * v[j];
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t j = i + 1; j < n; ++j) v[i] -= lu[i * n + j] * v[j];
            v[i] /= lu[i * n + i];
        }
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        if (!(nrm > 0.0) || !std::isfinite(nrm)) break;
        for (double& x : v) x /= nrm;
    }
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = -lambda * v[i];
        for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * v[j];
        res += s * s;
    }
    return std::sqrt(res);
}

}  // namespace

ExactSpectrum dense_eigs(std::size_t n, std::span<const double> values, const OracleOptions& options) {
    check_cap(n, options.cap);
    if (values.size() != n * n) throw DimensionError(n * n, values.size(), "dense_eigs");
    ExactSpectrum out;
    if (n == 0) return out;

    std::vector<double> work(values.begin(), values.end());
    out.eigenvalues.resize(n);
    const auto ln = static_cast<lapack_int>(n);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'N', 'U', ln, work.data(), ln, out.eigenvalues.data());
    if (info != 0)
        throw ConvergenceError("oracle: LAPACK dsyevd failed with info = " + std::to_string(info));

    if (options.verify) {
        const double scale = std::max(std::abs(out.eigenvalues.front()), std::abs(out.eigenvalues.back()));
        const std::size_t pairs = std::min(options.verify_pairs, n);
        for (std::size_t p = 0; p < pairs; ++p) {
            const std::size_t idx = pairs > 1 ? p * (n - 1) / (pairs - 1) : 0;
            const double res = inverse_iteration_residual(n, values, out.eigenvalues[idx], scale);
            if (res > 1e-8 * std::max(scale, 1e-300))
                throw ConvergenceError("oracle verification: residual " + std::to_string(res) +
                                       " for eigenvalue index " + std::to_string(idx));
        }
    }
    return out;
}

ExactSpectrum dense_eigs(const LinearOperator& op, const OracleOptions& options) {
    // A diagonal operator's spectrum is its entries; the cap only guards the
    // cubic dense path.
    if (const auto* d = std::get_if<LinearOperator::Diagonal>(&op.payload()); d && !options.verify) {
        ExactSpectrum out{d->values};
        std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
        return out;
    }
    check_cap(op.dimension(), options.cap);
    const auto dense = op.to_dense();
    return dense_eigs(op.dimension(), dense, options);
}

std::size_t exact_count(const ExactSpectrum& spectrum, double a, double b) {
    if (!(a < b)) return 0;
    const auto& e = spectrum.eigenvalues;
    const auto hi = std::upper_bound(e.begin(), e.end(), b);
    const auto lo = std::upper_bound(e.begin(), e.end(), a);
    return static_cast<std::size_t>(hi - lo);
}

DosCurve exact_dos(const ExactSpectrum& spectrum, std::span<const double> grid, double blur) {
    if (!(blur > 0.0)) throw InvalidArgument("exact_dos: blur must be positive");
    if (spectrum.eigenvalues.empty()) throw InvalidArgument("exact_dos: empty spectrum");
    DosCurve curve;
    curve.t.assign(grid.begin(), grid.end());
    curve.phi.assign(grid.size(), 0.0);
    curve.meta.method = "exact";
    curve.meta.blur = blur;
    const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * blur * static_cast<double>(spectrum.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double s = 0.0;
        for (double lam : spectrum.eigenvalues) {
            const double z = (grid[i] - lam) / blur;
            if (std::abs(z) < 40.0) s += std::exp(-0.5 * z * z);
        }
        curve.phi[i] = s * norm;
    }
    return curve;
}

}  // namespace specrank
