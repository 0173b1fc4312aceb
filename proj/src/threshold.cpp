#include "specrank/threshold.hpp"

#include <algorithm>
#include <cmath>

namespace specrank {

std::string to_string(ThresholdMethod method) {
    switch (method) {
        case ThresholdMethod::DerivativeTol: return "derivative-tol";
        case ThresholdMethod::ValleyMidpoint: return "valley-midpoint";
        case ThresholdMethod::TauGap: return "tau-gap";
        case ThresholdMethod::Manual: return "manual";
    }
    return "manual";
}

std::string to_string(ThresholdStrategy strategy) {
    switch (strategy) {
        case ThresholdStrategy::Derivative: return "deriv";
        case ThresholdStrategy::Valley: return "valley";
        case ThresholdStrategy::Tau: return "tau";
    }
    return "valley";
}

ThresholdStrategy parse_strategy(std::string_view name) {
    if (name == "deriv" || name == "derivative") return ThresholdStrategy::Derivative;
    if (name == "valley") return ThresholdStrategy::Valley;
    if (name == "tau") return ThresholdStrategy::Tau;
    throw InvalidArgument("unknown threshold strategy '" + std::string(name) + "'");
}

namespace {

struct Normalized {
    std::vector<double> f;           // phi / max(phi)
    std::vector<double> derivative;  // df/du with u = (t - t0)/(tN - t0)
    std::vector<double> mass;        // trapezoidal mass right of each sample, as a fraction of the total
};

Normalized normalize(const DosCurve& dos) {
    validate(dos);
    const std::size_t n = dos.size();
    if (n < 16) throw InvalidArgument("threshold selection needs at least 16 DOS samples");
    const double peak = *std::max_element(dos.phi.begin(), dos.phi.end());
    if (!(peak > 0.0)) throw NoGapError("DOS curve is identically zero", ThresholdResult{});

    Normalized out;
    out.f.resize(n);
    for (std::size_t j = 0; j < n; ++j) out.f[j] = dos.phi[j] / peak;
    const double span = dos.t.back() - dos.t.front();
    std::vector<double> u(n);
    for (std::size_t j = 0; j < n; ++j) u[j] = (dos.t[j] - dos.t.front()) / span;

    out.derivative.resize(n);
    out.derivative[0] = (out.f[1] - out.f[0]) / (u[1] - u[0]);
    out.derivative[n - 1] = (out.f[n - 1] - out.f[n - 2]) / (u[n - 1] - u[n - 2]);
    for (std::size_t j = 1; j + 1 < n; ++j)
        out.derivative[j] = (out.f[j + 1] - out.f[j - 1]) / (u[j + 1] - u[j - 1]);

    out.mass.assign(n, 0.0);
    for (std::size_t j = n - 1; j-- > 0;)
        out.mass[j] = out.mass[j + 1] + 0.5 * (u[j + 1] - u[j]) * (out.f[j] + out.f[j + 1]);
    const double total = out.mass[0];
    for (auto& m : out.mass) m /= total;
    return out;
}

// The initial drop is searched from the first sample reaching half the peak,
// which skips the Chebyshev endpoint ripple left of the spectrum. It must be
// steep, and the descent it starts must reach kDropFloor before levelling
// off, so ripples on top of a broad noise bulk do not qualify. At least
// kMinMassAfterDrop of the spectrum must lie beyond it; otherwise it is the
// top edge of the spectrum.
struct Drop {
    std::size_t start;
    std::size_t end;  // first sample after the descent with derivative >= tol, or n
};

std::optional<Drop> find_drop(const Normalized& c, double tol) {
    const std::size_t n = c.f.size();
    const double steep = std::min(tol, kSharpDropSlope);
    std::size_t j = 0;
    while (j < n && c.f[j] < 0.5) ++j;
    while (j < n) {
        if (c.derivative[j] < steep && c.f[j] >= kDropMinHeight) {
            std::size_t k = j + 1;
            while (k < n && c.derivative[k] < tol) ++k;
            if (k == n || (c.f[k] <= kDropFloor && c.mass[k] >= kMinMassAfterDrop)) return Drop{j, k};
            j = k;
        }
        ++j;
    }
    return std::nullopt;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

}  // namespace

ThresholdResult select_eps_dos(const DosCurve& dos, double tol) {
    if (!(tol < 0.0)) throw InvalidArgument("derivative tolerance must be negative");
    const Normalized c = normalize(dos);

    ThresholdResult r;
    r.method = ThresholdMethod::DerivativeTol;
    r.tol = tol;
    r.derivative = c.derivative;

    const auto drop = find_drop(c, tol);
    if (!drop) throw NoGapError("DOS never drops sharply to near zero: no gap found", r);
    r.drop_index = drop->start;
    if (drop->end == c.f.size())
        throw NoGapError("DOS keeps decreasing to the end of the window: no gap found", r);
    r.grid_index = drop->end;
    r.eps = dos.t[drop->end];
    return r;
}

ThresholdResult select_eps_valley_midpoint(const DosCurve& dos, double tol) {
    if (!(tol < 0.0)) throw InvalidArgument("derivative tolerance must be negative");
    const Normalized c = normalize(dos);
    const std::size_t n = c.f.size();

    if (const auto drop = find_drop(c, tol); drop && drop->end < n) {
        // The valley is the first run at or below kValleyLevel reached without
        // climbing back above kDropFloor after the descent.
        std::size_t s = drop->end;
        while (s < n && c.f[s] > kValleyLevel && c.f[s] <= kDropFloor) ++s;
        if (s < n && c.f[s] > kValleyLevel) s = n;
        while (s < n && s > drop->start && c.f[s - 1] <= kValleyLevel) --s;
        std::size_t e = s;
        while (e + 1 < n && c.f[e + 1] <= kValleyLevel) ++e;
        const bool closed = s < n && std::any_of(c.f.begin() + static_cast<std::ptrdiff_t>(e) + 1, c.f.end(),
                                                 [](double v) { return v >= kDropMinHeight; });
        if (closed) {
            ThresholdResult r;
            r.method = ThresholdMethod::ValleyMidpoint;
            r.tol = tol;
            r.derivative = c.derivative;
            r.drop_index = drop->start;
            r.valley = std::pair{dos.t[s], dos.t[e]};
            r.eps = 0.5 * (dos.t[s] + dos.t[e]);
            std::size_t best = s;
            for (std::size_t j = s; j <= e; ++j)
                if (std::abs(dos.t[j] - r.eps) < std::abs(dos.t[best] - r.eps)) best = j;
            r.grid_index = best;
            return r;
        }
    }
    ThresholdResult r = select_eps_dos(dos, tol);
    r.fell_back = true;
    return r;
}

ThresholdResult select_eps_tau(const RitzData& data, double floor) {
    if (!(floor > 0.0)) throw InvalidArgument("tau floor must be positive");
    ThresholdResult r;
    r.method = ThresholdMethod::TauGap;
    for (const auto& probe : data.per_probe) {
        const auto& tau = probe.tau_sq;
        if (tau.size() < 2) throw InvalidArgument("tau threshold needs at least 2 Ritz values per probe");
        const auto peak = static_cast<std::size_t>(std::max_element(tau.begin(), tau.end()) - tau.begin());
        std::size_t i = peak;
        while (i + 1 < tau.size() && tau[i] > floor * tau[peak]) ++i;
        for (; i + 1 < tau.size(); ++i) {
            if (tau[i + 1] - tau[i] >= 0.0) {
                if (i > peak) r.probe_eps.push_back(probe.theta[i]);
                break;
            }
        }
    }
    if (r.probe_eps.empty()) throw NoGapError("every probe abstained from the tau-gap rule", r);
    r.eps = median(r.probe_eps);
    return r;
}

ThresholdResult manual_threshold(double eps) {
    ThresholdResult r;
    r.eps = eps;
    r.method = ThresholdMethod::Manual;
    return r;
}

}  // namespace specrank
