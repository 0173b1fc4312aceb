#include "specrank/kpm.hpp"

#include "specrank/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <variant>

namespace specrank {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBlowUp = 1e6;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<double> moments_from_rows(const std::vector<std::vector<double>>& y, std::size_t m) {
    std::vector<double> mu(m + 1, 0.0);
    for (std::size_t k = 0; k <= m; ++k) {
        double s = 0.0;
        for (const auto& row : y) s += row[k];
        mu[k] = (k == 0 ? 1.0 : 2.0) / (kPi * static_cast<double>(y.size())) * s;
    }
    return mu;
}

}  // namespace

ChebyshevMoments chebyshev_moments(const LinearOperator& op_b, std::size_t m,
                                   std::span<const Vector> probes, unsigned threads) {
    if (m < 1) throw InvalidArgument("chebyshev_moments: degree must be at least 1");
    if (probes.empty()) throw InvalidArgument("chebyshev_moments: no probe vectors");
    const std::size_t n = op_b.dimension();
    for (const auto& v : probes)
        if (v.size() != n) throw DimensionError(n, v.size(), "chebyshev_moments probe");

    ChebyshevMoments mom;
    mom.degree = m;
    mom.n = n;
    if (const auto* s = std::get_if<LinearOperator::ShiftedScaled>(&op_b.payload()))
        mom.window = {s->center - s->half_width, s->center + s->half_width};
    mom.y.assign(probes.size(), std::vector<double>(m + 1, 0.0));

    parallel_for(probes.size(), threads, [&](std::size_t l) {
        const Vector& v = probes[l];
        auto& row = mom.y[l];
        Vector w_prev(v), w(n), w_next(n);
        op_b.apply(v, w);
        row[0] = dot(v, v);
        row[1] = dot(v, w);
        for (std::size_t k = 2; k <= m; ++k) {
            op_b.apply(w, w_next);
            for (std::size_t i = 0; i < n; ++i) w_next[i] = 2.0 * w_next[i] - w_prev[i];
            row[k] = dot(v, w_next);
            if (!(std::abs(row[k]) <= kBlowUp))
                throw BlowUpError("Chebyshev recurrence diverged at degree " + std::to_string(k) +
                                  " (|Y| = " + std::to_string(std::abs(row[k])) +
                                  "); the spectrum escapes the window, increase the safety margin");
            w_prev.swap(w);
            w.swap(w_next);
        }
    });

    mom.mu = moments_from_rows(mom.y, m);
    return mom;
}

ChebyshevMoments exact_moments(std::span<const double> eigenvalues, std::size_t m,
                               const SpectralWindow& window) {
    if (eigenvalues.empty()) throw InvalidArgument("exact_moments: empty spectrum");
    if (!(window.lambda_max > window.lambda_min)) throw InvalidArgument("exact_moments: empty window");
    std::vector<double> row(m + 1, 0.0);
    for (double lambda : eigenvalues) {
        const double t = window.to_unit(lambda);
        if (std::abs(t) > 1.0 + 1e-12)
            throw InvalidArgument("exact_moments: eigenvalue " + std::to_string(lambda) +
                                  " lies outside the window");
        double t_prev = 1.0, t_cur = t;
        row[0] += 1.0;
        if (m >= 1) row[1] += t;
        for (std::size_t k = 2; k <= m; ++k) {
            const double t_next = 2.0 * t * t_cur - t_prev;
            row[k] += t_next;
            t_prev = t_cur;
            t_cur = t_next;
        }
    }
    const double inv_n = 1.0 / static_cast<double>(eigenvalues.size());
    for (auto& x : row) x *= inv_n;

    ChebyshevMoments mom;
    mom.degree = m;
    mom.window = window;
    mom.n = eigenvalues.size();
    mom.y = {std::move(row)};
    mom.mu = moments_from_rows(mom.y, m);
    return mom;
}

std::vector<double> damping_factors(DampingKind kind, std::size_t m) {
    std::vector<double> g(m + 1, 1.0);
    const double md = static_cast<double>(m);
    switch (kind) {
        case DampingKind::None:
            break;
        case DampingKind::Jackson: {
            const double a = kPi / (md + 2.0);
            for (std::size_t k = 0; k <= m; ++k) {
                const double kd = static_cast<double>(k);
                g[k] = std::sin((kd + 1.0) * a) / ((md + 2.0) * std::sin(a)) +
                       (1.0 - (kd + 1.0) / (md + 2.0)) * std::cos(kd * a);
            }
            break;
        }
        case DampingKind::LanczosSigma: {
            const double th = kPi / (md + 1.0);
            for (std::size_t k = 1; k <= m; ++k) {
                const double x = static_cast<double>(k) * th;
                g[k] = std::sin(x) / x;
            }
            break;
        }
    }
    return g;
}

DosCurve evaluate_dos(const ChebyshevMoments& mom, DampingKind damping, std::size_t grid_points) {
    if (grid_points < 16) throw InvalidArgument("evaluate_dos: at least 16 grid points required");
    const std::size_t m = mom.degree;
    const auto g = damping_factors(damping, m);
    std::vector<double> coeff(m + 1);
    for (std::size_t k = 0; k <= m; ++k) coeff[k] = g[k] * mom.mu[k];

    const double d = mom.window.half_width();
    DosCurve curve;
    curve.t.resize(grid_points);
    curve.phi.resize(grid_points);
    const double nd = static_cast<double>(grid_points);
    for (std::size_t j = 0; j < grid_points; ++j) {
        // Ascending t: theta runs from near pi down to near 0.
        const double theta = kPi * (static_cast<double>(grid_points - 1 - j) + 0.5) / nd;
        double s = 0.0;
        for (std::size_t k = 0; k <= m; ++k) s += coeff[k] * std::cos(static_cast<double>(k) * theta);
        const double phi = s / (std::sin(theta) * d);
        curve.t[j] = mom.window.from_unit(std::cos(theta));
        curve.phi[j] = std::max(phi, 0.0);
    }
    curve.meta.method = "kpm";
    curve.meta.degree = m;
    curve.meta.nv = mom.probe_count();
    curve.meta.damping = damping;
    return curve;
}

std::vector<double> step_coeffs(double a, double b, std::size_t m) {
    if (!(a >= -1.0 && b <= 1.0)) throw InvalidArgument("step_coeffs: interval must lie in [-1, 1]");
    if (!(a < b)) throw InvalidArgument("step_coeffs: need a < b");
    const double ta = std::acos(a);
    const double tb = std::acos(b);
    std::vector<double> gamma(m + 1);
    // sin(k acos(+-1)) vanishes; evaluating it would leave rounding residue
    auto sine = [](double x, double theta, double kd) { return std::abs(x) == 1.0 ? 0.0 : std::sin(kd * theta); };
    gamma[0] = (ta - tb) / kPi;
    for (std::size_t k = 1; k <= m; ++k) {
        const double kd = static_cast<double>(k);
        gamma[k] = 2.0 / kPi * (sine(a, ta, kd) - sine(b, tb, kd)) / kd;
    }
    return gamma;
}

SampleSeries count_eigs_kpm(const ChebyshevMoments& mom, double a, double b, DampingKind damping) {
    if (mom.y.empty()) throw InvalidArgument("count_eigs_kpm: moments carry no per-probe Y table");
    if (!(a < b)) throw InvalidArgument("count_eigs_kpm: need a < b");
    const double ua = std::clamp(mom.window.to_unit(a), -1.0, 1.0);
    const double ub = std::clamp(mom.window.to_unit(b), -1.0, 1.0);
    const double n = static_cast<double>(mom.n);
    std::vector<double> per_probe(mom.y.size(), 0.0);
    if (ua < ub) {
        const auto gamma = step_coeffs(ua, ub, mom.degree);
        const auto g = damping_factors(damping, mom.degree);
        for (std::size_t l = 0; l < mom.y.size(); ++l) {
            double s = 0.0;
            for (std::size_t k = 0; k <= mom.degree; ++k) s += g[k] * gamma[k] * mom.y[l][k];
            per_probe[l] = n * s;
        }
    }
    return running_average(per_probe);
}

RankEstimate rank_kpm(const LinearOperator& op, const KpmRankOptions& options) {
    using clock = std::chrono::steady_clock;
    if (options.strategy == ThresholdStrategy::Tau && !options.eps)
        throw InvalidArgument("the tau threshold rule needs Lanczos data; use the Lanczos method");

    RankEstimate est;
    est.method = "kpm";
    est.n = op.dimension();
    est.degree = options.degree;
    est.nv = options.probes.nv;
    est.damping = options.damping;

    auto t0 = clock::now();
    const SpectrumBounds bounds = spectrum_bounds(op, options.bounds);
    est.window = {bounds.lambda_min, bounds.lambda_max};
    est.timing.bounds = seconds_since(t0);

    t0 = clock::now();
    const LinearOperator op_b = shift_scale(op, bounds.lambda_min, bounds.lambda_max);
    const auto probes = generate_probes(op.dimension(), options.probes);
    const ChebyshevMoments mom = chebyshev_moments(op_b, options.degree, probes, options.threads);
    // The plotted density is always smoothed; undamped counting still gets a Jackson curve.
    const DampingKind dos_damping =
        options.damping == DampingKind::None ? DampingKind::Jackson : options.damping;
    est.dos = evaluate_dos(mom, dos_damping, options.grid_points);
    est.timing.estimate = seconds_since(t0);

    t0 = clock::now();
    if (options.eps) {
        est.threshold = manual_threshold(*options.eps);
    } else {
        try {
            est.threshold = options.strategy == ThresholdStrategy::Derivative
                                ? select_eps_dos(est.dos, options.tol)
                                : select_eps_valley_midpoint(est.dos, options.tol);
        } catch (NoGapError& e) {
            e.attach_curve(est.dos);
            throw;
        }
    }
    est.eps = est.threshold.eps;
    est.timing.threshold = seconds_since(t0);

    t0 = clock::now();
    if (est.eps < bounds.lambda_max) {
        est.series = count_eigs_kpm(mom, std::max(est.eps, bounds.lambda_min), bounds.lambda_max,
                                    options.damping);
    } else {
        est.series = running_average(std::vector<double>(probes.size(), 0.0));
    }
    est.timing.count = seconds_since(t0);
    return est;
}

}  // namespace specrank
