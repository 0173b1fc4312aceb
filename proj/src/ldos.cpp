#include "specrank/ldos.hpp"

#include "specrank/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

namespace specrank {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::pair<double, double> ritz_range(const RitzData& data) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& p : data.per_probe) {
        lo = std::min(lo, p.theta.front());
        hi = std::max(hi, p.theta.back());
    }
    return {lo, hi};
}

}  // namespace

RitzData collect_ritz(const LinearOperator& op, std::size_t m, std::span<const Vector> probes,
                      unsigned threads) {
    return collect_ritz(op, m, probes, {.reorthogonalize = m <= kReorthogonalizeUpTo}, threads);
}

RitzData collect_ritz(const LinearOperator& op, std::size_t m, std::span<const Vector> probes,
                      LanczosOptions lanczos_options, unsigned threads) {
    if (probes.empty()) throw InvalidArgument("collect_ritz: no probe vectors");
    if (m > op.dimension())
        throw InvalidArgument("collect_ritz: " + std::to_string(m) + " steps exceed n = " +
                              std::to_string(op.dimension()));
    lanczos_options.keep_basis = false;

    RitzData data;
    data.n = op.dimension();
    data.steps = m;
    data.per_probe.resize(probes.size());
    std::vector<char> truncated(probes.size(), 0);
    parallel_for(probes.size(), threads, [&](std::size_t l) {
        const LanczosResult run = lanczos(op, probes[l], m, lanczos_options);
        RitzSpectrum ritz = tridiag_eigen(run.tridiagonal);
        if (run.tridiagonal.size() < m) {
            truncated[l] = 1;
            double total = 0.0;
            for (double w : ritz.tau_sq) total += w;
            for (double& w : ritz.tau_sq) w /= total;
        }
        data.per_probe[l] = std::move(ritz);
    });
    data.truncated.assign(truncated.begin(), truncated.end());
    return data;
}

SampleSeries count_eigs_lanczos(const RitzData& data, double a, double b) {
    if (!(a < b)) throw InvalidArgument("count_eigs_lanczos: need a < b");
    const double n = static_cast<double>(data.n);
    std::vector<double> per_probe;
    per_probe.reserve(data.per_probe.size());
    for (const auto& p : data.per_probe) {
        double s = 0.0;
        for (std::size_t k = 0; k < p.theta.size(); ++k)
            if (p.theta[k] > a && p.theta[k] <= b) s += p.tau_sq[k];
        per_probe.push_back(n * s);
    }
    return running_average(per_probe);
}

RankEstimate rank_lanczos(const RitzData& data, double eps) {
    if (data.per_probe.empty()) throw InvalidArgument("rank_lanczos: no Ritz data");
    const double n = static_cast<double>(data.n);
    std::vector<double> per_probe;
    per_probe.reserve(data.per_probe.size());
    for (const auto& p : data.per_probe) {
        // Ascending prefix sum, the same order cdos() uses.
        double below = 0.0;
        for (std::size_t k = 0; k < p.theta.size() && p.theta[k] <= eps; ++k) below += p.tau_sq[k];
        per_probe.push_back(n * (1.0 - below));
    }
    RankEstimate est;
    est.method = "lanczos";
    est.series = running_average(per_probe);
    est.eps = eps;
    est.threshold = manual_threshold(eps);
    est.n = data.n;
    est.degree = data.steps;
    est.nv = data.per_probe.size();
    const auto [lo, hi] = ritz_range(data);
    est.window = {lo, hi};
    return est;
}

double CdosCurve::evaluate(double t) const {
    if (per_probe.empty()) return 0.0;
    double s = 0.0;
    for (const auto& p : per_probe) {
        const auto it = std::upper_bound(p.theta.begin(), p.theta.end(), t);
        if (it != p.theta.begin()) s += p.rho_sq[static_cast<std::size_t>(it - p.theta.begin()) - 1];
    }
    return s / static_cast<double>(per_probe.size());
}

CdosCurve cdos(const RitzData& data) {
    CdosCurve curve;
    curve.n = data.n;
    curve.per_probe.reserve(data.per_probe.size());
    for (const auto& p : data.per_probe) {
        CumulativeRitz c;
        c.theta = p.theta;
        c.rho_sq.resize(p.tau_sq.size());
        double acc = 0.0;
        for (std::size_t k = 0; k < p.tau_sq.size(); ++k) {
            acc += p.tau_sq[k];
            c.rho_sq[k] = acc;
        }
        curve.per_probe.push_back(std::move(c));
    }
    return curve;
}

SampleSeries rank_from_cdos(const CdosCurve& curve, double eps) {
    if (curve.per_probe.empty()) throw InvalidArgument("rank_from_cdos: empty curve");
    const double n = static_cast<double>(curve.n);
    std::vector<double> per_probe;
    per_probe.reserve(curve.per_probe.size());
    for (const auto& p : curve.per_probe) {
        const auto it = std::upper_bound(p.theta.begin(), p.theta.end(), eps);
        const double below =
            it == p.theta.begin() ? 0.0 : p.rho_sq[static_cast<std::size_t>(it - p.theta.begin()) - 1];
        per_probe.push_back(n * (1.0 - below));
    }
    return running_average(per_probe);
}

double default_blur(const RitzData& data) {
    const auto [lo, hi] = ritz_range(data);
    const double width = hi - lo;
    const double m = static_cast<double>(std::max<std::size_t>(data.steps, 1));
    if (width > 0.0) return width / (2.0 * m);
    return std::max(std::abs(hi), 1.0) / (2.0 * m);
}

DosCurve evaluate_dos_lanczos(const RitzData& data, std::size_t grid_points,
                              std::optional<double> blur) {
    if (data.per_probe.empty()) throw InvalidArgument("evaluate_dos_lanczos: no Ritz data");
    if (grid_points < 16) throw InvalidArgument("evaluate_dos_lanczos: at least 16 grid points required");
    const double sigma = blur.value_or(default_blur(data));
    if (!(sigma > 0.0)) throw InvalidArgument("evaluate_dos_lanczos: blur must be positive");

    const auto [lo, hi] = ritz_range(data);
    const double start = lo - 5.0 * sigma;
    const double stop = hi + 5.0 * sigma;
    const double step = (stop - start) / static_cast<double>(grid_points - 1);
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi) *
                               static_cast<double>(data.per_probe.size()));

    DosCurve curve;
    curve.t.resize(grid_points);
    curve.phi.assign(grid_points, 0.0);
    for (std::size_t j = 0; j < grid_points; ++j) curve.t[j] = start + step * static_cast<double>(j);
    for (const auto& p : data.per_probe) {
        for (std::size_t k = 0; k < p.theta.size(); ++k) {
            const double w = p.tau_sq[k] * norm;
            for (std::size_t j = 0; j < grid_points; ++j) {
                const double z = (curve.t[j] - p.theta[k]) / sigma;
                curve.phi[j] += w * std::exp(-0.5 * z * z);
            }
        }
    }
    curve.meta.method = "lanczos";
    curve.meta.degree = data.steps;
    curve.meta.nv = data.per_probe.size();
    curve.meta.blur = sigma;
    return curve;
}

RankEstimate rank_lanczos(const LinearOperator& op, const LanczosRankOptions& options) {
    using clock = std::chrono::steady_clock;

    auto t0 = clock::now();
    const auto probes = generate_probes(op.dimension(), options.probes);
    // More steps than the dimension cannot be taken; n steps span the whole space.
    const std::size_t steps = std::min(options.steps, op.dimension());
    const bool reorth = options.reorthogonalize.value_or(steps <= kReorthogonalizeUpTo);
    const RitzData data = collect_ritz(op, steps, probes, {.reorthogonalize = reorth}, options.threads);
    DosCurve dos = evaluate_dos_lanczos(data, options.grid_points, options.blur);
    const double estimate_time = seconds_since(t0);

    t0 = clock::now();
    ThresholdResult threshold;
    if (options.eps) {
        threshold = manual_threshold(*options.eps);
    } else {
        try {
            switch (options.strategy) {
                case ThresholdStrategy::Derivative: threshold = select_eps_dos(dos, options.tol); break;
                case ThresholdStrategy::Valley: threshold = select_eps_valley_midpoint(dos, options.tol); break;
                case ThresholdStrategy::Tau: threshold = select_eps_tau(data); break;
            }
        } catch (NoGapError& e) {
            e.attach_curve(dos);
            throw;
        }
    }
    const double threshold_time = seconds_since(t0);

    t0 = clock::now();
    RankEstimate est = rank_lanczos(data, threshold.eps);
    est.timing.count = seconds_since(t0);
    est.timing.estimate = estimate_time;
    est.timing.threshold = threshold_time;
    est.threshold = std::move(threshold);
    est.dos = std::move(dos);
    return est;
}

}  // namespace specrank
