#pragma once

#include "specrank/dos.hpp"
#include "specrank/probe.hpp"
#include "specrank/threshold.hpp"

#include <cstddef>
#include <string>

namespace specrank {

/// Interval [lambda_min, lambda_max] that the Chebyshev variable maps onto [-1, 1].
struct SpectralWindow {
    double lambda_min = -1.0;
    double lambda_max = 1.0;

    double center() const noexcept { return 0.5 * (lambda_max + lambda_min); }
    double half_width() const noexcept { return 0.5 * (lambda_max - lambda_min); }
    double to_unit(double lambda) const noexcept { return (lambda - center()) / half_width(); }
    double from_unit(double t) const noexcept { return center() + half_width() * t; }
};

/// Wall time in seconds per pipeline phase.
struct PhaseTiming {
    double bounds = 0.0;
    double estimate = 0.0;  // moments (KPM) or Lanczos runs
    double threshold = 0.0;
    double count = 0.0;
};

/// Output of a rank estimator.
struct RankEstimate {
    std::string method;  // "kpm" or "lanczos"
    SampleSeries series;
    double eps = 0.0;
    ThresholdResult threshold;
    SpectralWindow window;
    DosCurve dos;
    std::size_t n = 0;
    std::size_t degree = 0;  // m
    std::size_t nv = 0;
    DampingKind damping = DampingKind::None;
    PhaseTiming timing;

    double mean() const { return series.mean(); }
};

}  // namespace specrank
