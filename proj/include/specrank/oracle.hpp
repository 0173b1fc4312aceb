#pragma once

#include "specrank/dos.hpp"
#include "specrank/linops.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace specrank {

inline constexpr std::size_t kOracleCap = 4096;

struct ExactSpectrum {
    std::vector<double> eigenvalues;  // ascending

    std::size_t size() const noexcept { return eigenvalues.size(); }
};

struct OracleOptions {
    std::size_t cap = kOracleCap;
    // Inverse iteration on a handful of eigenpairs, checking
    // ||A v - lambda v|| <= 1e-8 ||A||.
    bool verify = false;
    std::size_t verify_pairs = 5;
};

/// Eigenvalues of a dense symmetric row-major matrix through LAPACK
/// (Householder tridiagonalization then implicit-shift QL/QR, no vectors).
/// Throws CapExceededError above the cap and ConvergenceError when LAPACK
/// or the verification fails.
ExactSpectrum dense_eigs(std::size_t n, std::span<const double> values, const OracleOptions& options = {});

/// Densifies the operator after checking the cap.
ExactSpectrum dense_eigs(const LinearOperator& op, const OracleOptions& options = {});

/// Number of eigenvalues in (a, b].
std::size_t exact_count(const ExactSpectrum& spectrum, double a, double b);

/// (1/n) sum_j Gaussian(t - lambda_j; blur) on the given grid.
DosCurve exact_dos(const ExactSpectrum& spectrum, std::span<const double> grid, double blur);

}  // namespace specrank
