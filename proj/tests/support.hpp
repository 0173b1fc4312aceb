#pragma once

#include "specrank/linops.hpp"
#include "specrank/random.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace testing {

using specrank::LinearOperator;
using specrank::StreamRng;
using specrank::Vector;

inline Vector random_unit(std::size_t n, std::uint64_t seed) {
    StreamRng rng(seed, 7);
    Vector v(n);
    double s = 0.0;
    for (auto& x : v) {
        x = rng.normal();
        s += x * x;
    }
    for (auto& x : v) x /= std::sqrt(s);
    return v;
}

// Dense symmetric matrix with normal entries, row-major.
inline std::vector<double> random_symmetric(std::size_t n, std::uint64_t seed) {
    StreamRng rng(seed, 3);
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) a[i * n + j] = a[j * n + i] = rng.normal();
    return a;
}

inline std::vector<double> uniform_values(std::size_t n, double lo, double hi, std::uint64_t seed) {
    StreamRng rng(seed, 5);
    std::vector<double> v(n);
    for (auto& x : v) x = lo + (hi - lo) * rng.uniform();
    return v;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
