#include "specrank/probe.hpp"

#include "specrank/error.hpp"
#include "specrank/random.hpp"

#include <cmath>

namespace specrank {

double SampleSeries::standard_error() const {
    const std::size_t count = per_probe.size();
    if (count < 2) return 0.0;
    const double m = mean();
    double ss = 0.0;
    for (double x : per_probe) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(count - 1) / static_cast<double>(count));
}

Vector generate_probe(std::size_t n, const ProbeConfig& config, std::size_t index) {
    if (n == 0) throw InvalidArgument("probe dimension must be positive");
    StreamRng rng(config.seed, index);
    Vector v(n);
    if (config.distribution == ProbeDistribution::Rademacher) {
        const double s = 1.0 / std::sqrt(static_cast<double>(n));
        for (auto& x : v) x = rng.sign() * s;
        return v;
    }
    double nrm = 0.0;
    do {
        for (auto& x : v) x = rng.normal();
        nrm = norm2(v);
    } while (nrm == 0.0);
    for (auto& x : v) x /= nrm;
    return v;
}

std::vector<Vector> generate_probes(std::size_t n, const ProbeConfig& config) {
    if (config.nv == 0) throw InvalidArgument("probe count nv must be at least 1");
    std::vector<Vector> probes;
    probes.reserve(config.nv);
    for (std::size_t l = 0; l < config.nv; ++l) probes.push_back(generate_probe(n, config, l));
    return probes;
}

SampleSeries running_average(std::span<const double> values) {
    if (values.empty()) throw InvalidArgument("running_average needs at least one value");
    SampleSeries s;
    s.per_probe.assign(values.begin(), values.end());
    s.running_mean.reserve(values.size());
    double sum = 0.0;
    for (std::size_t l = 0; l < values.size(); ++l) {
        sum += values[l];
        s.running_mean.push_back(sum / static_cast<double>(l + 1));
    }
    return s;
}

}  // namespace specrank
