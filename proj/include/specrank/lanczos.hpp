#pragma once

#include "specrank/linops.hpp"
#include "specrank/ritz.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace specrank {

/// Full reorthogonalization is the default up to this many steps.
inline constexpr std::size_t kReorthogonalizeUpTo = 200;

struct LanczosOptions {
    bool reorthogonalize = true;
    bool keep_basis = false;  // return the Krylov basis (tests, diagnostics)
};

struct LanczosResult {
    TridiagonalMatrix tridiagonal;
    bool breakdown = false;     // stopped early on a vanishing off-diagonal
    std::vector<Vector> basis;  // filled only with keep_basis
};

/// m steps of the symmetric Lanczos recurrence from the unit vector v1.
///
/// A breakdown (off-diagonal below 1e-12 times the running norm estimate)
/// returns the tridiagonal matrix of the completed steps with `breakdown` set.
/// Throws InvalidArgument when m == 0, m > n, or v1 is not unit length.
LanczosResult lanczos(const LinearOperator& op, std::span<const double> v1, std::size_t m,
                      LanczosOptions options = {});

/// Eigen-decomposition of T by implicit-shift QL, tracking only the first row
/// of the eigenvector matrix. Throws ConvergenceError after 30*m sweeps.
RitzSpectrum tridiag_eigen(const TridiagonalMatrix& t);

struct BoundsOptions {
    std::size_t steps = 30;
    double safety = 0.01;     // widening, as a fraction of the Ritz range
    bool assume_psd = false;  // keep 0 inside the window
    std::uint64_t seed = 0x5eed;
};

struct SpectrumBounds {
    double lambda_min;
    double lambda_max;
    double ritz_min;
    double ritz_max;
    bool gershgorin_fallback = false;
};

/// Spectral interval from a short Lanczos run, widened by
/// safety * (ritz_max - ritz_min) on each side. With assume_psd the lower
/// end is min(ritz_min, 0) minus the widening.
SpectrumBounds spectrum_bounds(const LinearOperator& op, BoundsOptions options = {});

}  // namespace specrank
