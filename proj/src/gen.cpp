#include "specrank/gen.hpp"

#include "specrank/error.hpp"
#include "specrank/random.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace specrank {

std::string to_string(SyntheticFamily family) {
    switch (family) {
        case SyntheticFamily::HadamardLowRank: return "hadamard";
        case SyntheticFamily::Matern1D: return "matern1d";
        case SyntheticFamily::Matern2D: return "matern2d";
        case SyntheticFamily::PlantedSpectrum: return "planted";
    }
    return "hadamard";
}

GeneratedMatrix hadamard_lowrank(std::size_t n, std::size_t k, double sigma, std::uint64_t seed) {
    if (n == 0 || !std::has_single_bit(n))
        throw InvalidArgument("hadamard_lowrank: n = " + std::to_string(n) + " is not a power of two");
    if (k < 1 || k > n) throw InvalidArgument("hadamard_lowrank: need 1 <= k <= n");
    if (sigma < 0.0) throw InvalidArgument("hadamard_lowrank: sigma must be >= 0");

    // Sylvester construction: H(i, c) = (-1)^popcount(i & c).
    std::vector<double> h(n * k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < k; ++c)
            h[i * k + c] = (std::popcount(i & c) & 1) ? -1.0 : 1.0;

    const double scale = 1.0 / static_cast<double>(n);
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* hi = &h[i * k];
        for (std::size_t j = i; j < n; ++j) {
            const double* hj = &h[j * k];
            double s = 0.0;
            for (std::size_t c = 0; c < k; ++c) s += hi[c] * hj[c];
            a[i * n + j] = a[j * n + i] = s * scale;
        }
    }

    GroundTruth truth;
    truth.family = "hadamard";
    truth.true_rank = k;
    truth.parameters = {{"n", static_cast<double>(n)},
                        {"k", static_cast<double>(k)},
                        {"sigma", sigma},
                        {"seed", static_cast<double>(seed)}};

    if (sigma > 0.0) {
        StreamRng rng(seed, 0);
        std::vector<double> noise(n * n);
        double frob_sq = 0.0;
        for (auto& x : noise) {
            x = sigma * rng.normal();
            frob_sq += x * x;
        }
        for (std::size_t i = 0; i < n; ++i) {
            a[i * n + i] += noise[i * n + i];
            for (std::size_t j = i + 1; j < n; ++j) {
                const double e = 0.5 * (noise[i * n + j] + noise[j * n + i]);
                a[i * n + j] += e;
                a[j * n + i] = a[i * n + j];
            }
        }
        // ||H H^T||_F = sqrt(k) since H H^T is an orthogonal projector of rank k.
        truth.snr_db = 20.0 * std::log10(std::sqrt(static_cast<double>(k)) / std::sqrt(frob_sq));
    } else {
        truth.eigenvalues.assign(n - k, 0.0);
        truth.eigenvalues.insert(truth.eigenvalues.end(), k, 1.0);
    }
    return {LinearOperator::dense(n, std::move(a)), std::move(truth)};
}

double matern_kernel(double distance, double nu, double length_scale) {
    if (!(length_scale > 0.0)) throw InvalidArgument("matern_kernel: length scale must be positive");
    const double r = distance / length_scale;
    if (std::abs(nu - 0.5) < 1e-12) return std::exp(-r);
    if (std::abs(nu - 1.5) < 1e-12) {
        const double s = std::sqrt(3.0) * r;
        return (1.0 + s) * std::exp(-s);
    }
    if (std::abs(nu - 2.5) < 1e-12) {
        const double s = std::sqrt(5.0) * r;
        return (1.0 + s + s * s / 3.0) * std::exp(-s);
    }
    throw InvalidArgument("matern_kernel: unsupported smoothness nu = " + std::to_string(nu) +
                          " (only 1/2, 3/2, 5/2 have closed forms here)");
}

GeneratedMatrix matern_covariance(std::size_t rows, std::size_t cols, double nu, double length_scale) {
    if (rows == 0 || cols == 0) throw InvalidArgument("matern_covariance: grid dimensions must be positive");
    matern_kernel(0.0, nu, length_scale);  // validates nu and length scale

    const std::size_t n = rows * cols;
    auto coord = [](std::size_t i, std::size_t count) {
        return count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
    };
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            x[i * cols + j] = coord(i, rows);
            y[i * cols + j] = coord(j, cols);
        }

    std::vector<double> a(n * n);
    for (std::size_t p = 0; p < n; ++p) {
        a[p * n + p] = 1.0;
        for (std::size_t q = p + 1; q < n; ++q) {
            const double r = std::hypot(x[p] - x[q], y[p] - y[q]);
            a[p * n + q] = a[q * n + p] = matern_kernel(r, nu, length_scale);
        }
    }

    GroundTruth truth;
    truth.family = cols == 1 ? "matern1d" : "matern2d";
    truth.parameters = {{"rows", static_cast<double>(rows)},
                        {"cols", static_cast<double>(cols)},
                        {"nu", nu},
                        {"length_scale", length_scale}};
    return {LinearOperator::dense(n, std::move(a)), std::move(truth)};
}

GeneratedMatrix planted_spectrum(std::vector<double> eigenvalues, bool rotate, std::uint64_t seed) {
    if (eigenvalues.empty()) throw InvalidArgument("planted_spectrum: empty eigenvalue list");
    const std::size_t n = eigenvalues.size();

    GroundTruth truth;
    truth.family = "planted";
    truth.eigenvalues = eigenvalues;
    std::sort(truth.eigenvalues.begin(), truth.eigenvalues.end());
    truth.parameters = {{"n", static_cast<double>(n)},
                        {"rotate", rotate ? 1.0 : 0.0},
                        {"seed", static_cast<double>(seed)}};

    if (!rotate) return {LinearOperator::diagonal(std::move(eigenvalues)), std::move(truth)};

    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] = eigenvalues[i];
    StreamRng rng(seed, 1);
    std::vector<double> u(n), w(n);
    for (int reflector = 0; reflector < 5; ++reflector) {
        double nrm = 0.0;
        for (auto& x : u) {
            x = rng.normal();
            nrm += x * x;
        }
        nrm = std::sqrt(nrm);
        for (auto& x : u) x /= nrm;
        // (I - 2uu^T) A (I - 2uu^T) = A - 2uw^T - 2wu^T + 4(u^T w)uu^T with w = Au.
        double uw = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * u[j];
            w[i] = s;
            uw += u[i] * s;
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                const double v = a[i * n + j] - 2.0 * (u[i] * w[j] + w[i] * u[j]) + 4.0 * uw * u[i] * u[j];
                a[i * n + j] = a[j * n + i] = v;
            }
    }
    return {LinearOperator::dense(n, std::move(a)), std::move(truth)};
}

GeneratedMatrix generate(const SyntheticSpec& spec) {
    switch (spec.family) {
        case SyntheticFamily::HadamardLowRank:
            return hadamard_lowrank(spec.n, spec.k, spec.sigma, spec.seed);
        case SyntheticFamily::Matern1D:
            return matern_covariance(spec.rows, 1, spec.nu, spec.length_scale.value_or(0.05));
        case SyntheticFamily::Matern2D:
            return matern_covariance(spec.rows, spec.cols, spec.nu, spec.length_scale.value_or(0.1));
        case SyntheticFamily::PlantedSpectrum:
            return planted_spectrum(spec.eigenvalues, spec.rotate, spec.seed);
    }
    throw InvalidArgument("unknown synthetic family");
}

}  // namespace specrank
