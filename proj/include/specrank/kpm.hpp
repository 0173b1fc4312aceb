#pragma once

#include "specrank/dos.hpp"
#include "specrank/lanczos.hpp"
#include "specrank/linops.hpp"
#include "specrank/probe.hpp"
#include "specrank/rank_estimate.hpp"
#include "specrank/threshold.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace specrank {

/// Chebyshev moments mu_0..mu_m of the weighted spectral density, undamped.
struct ChebyshevMoments {
    std::vector<double> mu;
    std::size_t degree = 0;
    SpectralWindow window;
    std::size_t n = 0;  // operator dimension
    /// y[l][k] = v_l^T T_k(B) v_l. For exact moments there is a single row
    /// holding trace(T_k(B)) / n.
    std::vector<std::vector<double>> y;

    double Y(std::size_t k, std::size_t l) const { return y[l][k]; }
    std::size_t probe_count() const noexcept { return y.size(); }
};

/// Moments of B from the three-term recurrence, exactly m matvecs per probe.
/// The window is read from B when it is a shift_scale() result, otherwise
/// taken as [-1, 1]. Throws BlowUpError when |Y| exceeds 1e6.
ChebyshevMoments chebyshev_moments(const LinearOperator& op_b, std::size_t m,
                                   std::span<const Vector> probes, unsigned threads = 0);

/// Moments computed from known eigenvalues (exact trace).
ChebyshevMoments exact_moments(std::span<const double> eigenvalues, std::size_t m,
                               const SpectralWindow& window);

/// Factors g_0..g_m. Jackson uses alpha = pi/(m+2); LanczosSigma uses
/// theta = pi/(m+1) with sigma_0 = 1.
std::vector<double> damping_factors(DampingKind kind, std::size_t m);

inline constexpr std::size_t kDefaultGridPoints = 400;

/// Damped KPM density on Chebyshev points, mapped back to the eigenvalue
/// axis and scaled to unit mass there; negative values are clamped to 0.
DosCurve evaluate_dos(const ChebyshevMoments& mom, DampingKind damping,
                      std::size_t grid_points = kDefaultGridPoints);

/// Chebyshev expansion coefficients gamma_0..gamma_m of the indicator of
/// [a, b] within [-1, 1].
std::vector<double> step_coeffs(double a, double b, std::size_t m);

/// Per-probe eigenvalue counts in [a, b] (eigenvalue axis) from the stored Y
/// table; no further matvecs. The interval is clipped to the window.
SampleSeries count_eigs_kpm(const ChebyshevMoments& mom, double a, double b, DampingKind damping);

struct KpmRankOptions {
    std::size_t degree = 50;
    DampingKind damping = DampingKind::Jackson;
    ProbeConfig probes;
    std::optional<double> eps;  // skips threshold selection when set
    ThresholdStrategy strategy = ThresholdStrategy::Valley;
    double tol = kDefaultTol;
    std::size_t grid_points = kDefaultGridPoints;
    BoundsOptions bounds{.assume_psd = true};
    unsigned threads = 0;
};

/// Rank estimation by KPM: bounds, mapping, moments, DOS, threshold, count
/// over [eps, lambda_max]. A failed threshold search raises NoGapError with
/// the DOS curve attached.
RankEstimate rank_kpm(const LinearOperator& op, const KpmRankOptions& options = {});

}  // namespace specrank
