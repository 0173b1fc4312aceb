#include "specrank/dos.hpp"

#include "specrank/error.hpp"

#include <cmath>

namespace specrank {

std::string to_string(DampingKind kind) {
    switch (kind) {
        case DampingKind::None: return "none";
        case DampingKind::Jackson: return "jackson";
        case DampingKind::LanczosSigma: return "sigma";
    }
    return "none";
}

DampingKind parse_damping(std::string_view name) {
    if (name == "none") return DampingKind::None;
    if (name == "jackson") return DampingKind::Jackson;
    if (name == "sigma" || name == "lanczos-sigma") return DampingKind::LanczosSigma;
    throw InvalidArgument("unknown damping '" + std::string(name) + "'");
}

double integrate(const DosCurve& curve) {
    double s = 0.0;
    for (std::size_t j = 1; j < curve.t.size(); ++j)
        s += 0.5 * (curve.phi[j] + curve.phi[j - 1]) * (curve.t[j] - curve.t[j - 1]);
    return s;
}

void validate(const DosCurve& curve) {
    if (curve.t.size() != curve.phi.size())
        throw InvalidArgument("DOS curve: t and phi lengths differ");
    for (std::size_t j = 0; j < curve.t.size(); ++j) {
        if (!std::isfinite(curve.t[j]) || !std::isfinite(curve.phi[j]))
            throw InvalidArgument("DOS curve: non-finite sample at index " + std::to_string(j));
        if (j > 0 && !(curve.t[j] > curve.t[j - 1]))
            throw InvalidArgument("DOS curve: abscissae not strictly increasing at index " +
                                  std::to_string(j));
    }
}

}  // namespace specrank
