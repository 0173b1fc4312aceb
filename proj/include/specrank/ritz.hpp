#pragma once

#include <cstddef>
#include <vector>

namespace specrank {

/// Symmetric tridiagonal matrix: m diagonal entries, m-1 nonnegative
/// off-diagonal entries.
struct TridiagonalMatrix {
    std::vector<double> alpha;
    std::vector<double> beta;

    std::size_t size() const noexcept { return alpha.size(); }
};

/// Gauss quadrature rule of one Lanczos run: Ritz values ascending, and the
/// squared first components of the matching eigenvectors as weights.
struct RitzSpectrum {
    std::vector<double> theta;
    std::vector<double> tau_sq;
};

/// Quadrature rules for every probe vector (the W and V tables of the
/// Lanczos rank estimator).
struct RitzData {
    std::vector<RitzSpectrum> per_probe;
    std::size_t n = 0;           // operator dimension
    std::size_t steps = 0;       // requested Lanczos steps m
    std::vector<bool> truncated;  // probe hit a breakdown before m steps
};

}  // namespace specrank
