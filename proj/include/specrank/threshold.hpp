#pragma once

#include "specrank/dos.hpp"
#include "specrank/error.hpp"
#include "specrank/ritz.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace specrank {

inline constexpr double kDefaultTol = -0.01;
/// A valley is a run of samples at or below this fraction of the peak.
inline constexpr double kValleyLevel = 0.01;
/// A drop only counts once the normalized curve is at least this high, so
/// ripples on the empty floor left of the spectrum are ignored.
inline constexpr double kDropMinHeight = 0.05;

/// The initial drop has to reach this fraction of the peak.
inline constexpr double kDropFloor = 0.1;
/// Normalized slope the initial drop must undercut: a fall of the full peak
/// height over the whole axis.
inline constexpr double kSharpDropSlope = -1.0;
/// Fraction of the spectral mass that must lie beyond the drop.
inline constexpr double kMinMassAfterDrop = 1e-3;

enum class ThresholdMethod { DerivativeTol, ValleyMidpoint, TauGap, Manual };
enum class ThresholdStrategy { Derivative, Valley, Tau };

std::string to_string(ThresholdMethod method);
std::string to_string(ThresholdStrategy strategy);
/// Accepts "deriv", "valley", "tau".
ThresholdStrategy parse_strategy(std::string_view name);

struct ThresholdResult {
    double eps = 0.0;
    ThresholdMethod method = ThresholdMethod::Manual;
    double tol = kDefaultTol;
    std::optional<std::size_t> grid_index;  // DOS-based methods only
    std::vector<double> derivative;         // normalized derivative samples
    std::optional<std::pair<double, double>> valley;
    std::optional<std::size_t> drop_index;  // first sample of the initial drop
    std::vector<double> probe_eps;          // TauGap: per-probe picks (abstainers omitted)
    bool fell_back = false;                 // valley rule deferred to the derivative rule
};

/// No gap could be located. Carries whatever diagnostics were computed and,
/// when raised by a rank pipeline, the DOS curve that was inspected.
class NoGapError : public Error {
public:
    NoGapError(const std::string& msg, ThresholdResult diagnostics)
        : Error(msg), diagnostics_(std::move(diagnostics)) {}

    const ThresholdResult& diagnostics() const noexcept { return diagnostics_; }
    const std::optional<DosCurve>& curve() const noexcept { return curve_; }
    void attach_curve(DosCurve curve) { curve_ = std::move(curve); }

private:
    ThresholdResult diagnostics_;
    std::optional<DosCurve> curve_;
};

/// First grid point after the initial sharp drop where the derivative climbs
/// back to at least `tol`. The curve is normalized to unit peak and the
/// abscissa to [0, 1] before differencing, so `tol` is scale free.
ThresholdResult select_eps_dos(const DosCurve& dos, double tol = kDefaultTol);

/// Midpoint of the first run of samples at or below kValleyLevel of the peak
/// that follows the initial drop and is closed by a later rise. Falls back to
/// select_eps_dos when no such run exists.
ThresholdResult select_eps_valley_midpoint(const DosCurve& dos, double tol = kDefaultTol);

/// Per probe, the first Ritz value past the heaviest node whose weight stops
/// decreasing, once the weights have fallen to `floor` times the peak weight;
/// the probes' picks are combined by their median. Probes with no such node
/// abstain. floor = 1 gives the bare rule (first non-negative weight
/// difference after the peak).
ThresholdResult select_eps_tau(const RitzData& data, double floor = kValleyLevel);

ThresholdResult manual_threshold(double eps);

}  // namespace specrank
