#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace specrank {

/// Multipliers applied to truncated Chebyshev expansions.
enum class DampingKind { None, Jackson, LanczosSigma };

std::string to_string(DampingKind kind);
/// Accepts "none", "jackson", "sigma" (or "lanczos-sigma").
DampingKind parse_damping(std::string_view name);

struct DosMeta {
    std::string method;  // "kpm", "lanczos", "exact"
    std::size_t degree = 0;
    std::size_t nv = 0;
    DampingKind damping = DampingKind::None;
    double blur = 0.0;  // Gaussian width for delta regularization, 0 if unused
};

/// Sampled spectral density on the eigenvalue axis. `t` is strictly
/// increasing and `phi` is nonnegative.
struct DosCurve {
    std::vector<double> t;
    std::vector<double> phi;
    DosMeta meta;

    std::size_t size() const noexcept { return t.size(); }
};

/// Trapezoidal integral of phi over the whole grid.
double integrate(const DosCurve& curve);

/// Throws InvalidArgument unless sizes match, t is strictly increasing and
/// every value is finite.
void validate(const DosCurve& curve);

}  // namespace specrank
