#pragma once

#include "specrank/dos.hpp"
#include "specrank/lanczos.hpp"
#include "specrank/linops.hpp"
#include "specrank/probe.hpp"
#include "specrank/rank_estimate.hpp"
#include "specrank/ritz.hpp"
#include "specrank/threshold.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace specrank {

/// Runs m Lanczos steps from every probe and keeps each run's quadrature
/// rule. Runs cut short by a breakdown keep the nodes they found, with
/// weights renormalized to sum to 1, and are flagged in `truncated`.
RitzData collect_ritz(const LinearOperator& op, std::size_t m, std::span<const Vector> probes,
                      unsigned threads = 0);
RitzData collect_ritz(const LinearOperator& op, std::size_t m, std::span<const Vector> probes,
                      LanczosOptions lanczos_options, unsigned threads);

/// Per-probe counts n * sum{tau^2 : a < theta <= b}. Intervals are half-open
/// so adjacent intervals never share a node.
SampleSeries count_eigs_lanczos(const RitzData& data, double a, double b);

/// Per-probe ranks n * (1 - sum{tau^2 : theta <= eps}); the complement form
/// keeps the count anchored at the well-resolved low end of the spectrum.
RankEstimate rank_lanczos(const RitzData& data, double eps);

/// Cumulative weights of one probe: rho_sq[k] = tau_sq[0] + ... + tau_sq[k].
struct CumulativeRitz {
    std::vector<double> theta;
    std::vector<double> rho_sq;
};

/// Cumulative spectral density: per-probe step functions.
struct CdosCurve {
    std::vector<CumulativeRitz> per_probe;
    std::size_t n = 0;

    /// Probe-averaged fraction of the spectrum at or below t.
    double evaluate(double t) const;
};

CdosCurve cdos(const RitzData& data);

/// Rank read off the cumulative curve: n * (1 - rho_k^2) with k the last node
/// at or below eps. Bitwise equal to rank_lanczos(data, eps).series.
SampleSeries rank_from_cdos(const CdosCurve& curve, double eps);

/// Default Gaussian width: Ritz-value span / (2m).
double default_blur(const RitzData& data);

/// Lanczos DOS with each delta replaced by a Gaussian of standard deviation
/// `blur` (default_blur when empty), averaged over probes, on a uniform grid
/// covering the Ritz values plus five widths on either side.
DosCurve evaluate_dos_lanczos(const RitzData& data, std::size_t grid_points = 400,
                              std::optional<double> blur = std::nullopt);

struct LanczosRankOptions {
    std::size_t steps = 50;
    ProbeConfig probes;
    std::optional<double> eps;
    ThresholdStrategy strategy = ThresholdStrategy::Valley;
    double tol = kDefaultTol;
    std::size_t grid_points = 400;
    std::optional<double> blur;
    std::optional<bool> reorthogonalize;  // default: steps <= kReorthogonalizeUpTo
    unsigned threads = 0;
};

/// Rank estimation by the Lanczos method: Ritz data, threshold (Lanczos DOS
/// or tau-gap rule), complement-form count.
RankEstimate rank_lanczos(const LinearOperator& op, const LanczosRankOptions& options = {});

}  // namespace specrank
