#pragma once

#include "specrank/linops.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace specrank {

enum class ProbeDistribution { Gaussian, Rademacher };

/// Settings for the stochastic trace estimator.
struct ProbeConfig {
    std::size_t nv = 30;  // number of sample vectors
    ProbeDistribution distribution = ProbeDistribution::Gaussian;
    std::uint64_t seed = 42;
};

/// Per-probe estimates together with their prefix averages.
struct SampleSeries {
    std::vector<double> per_probe;
    std::vector<double> running_mean;

    /// Final running mean; the headline estimate.
    double mean() const { return running_mean.back(); }
    /// Sample standard deviation of per_probe divided by sqrt(count).
    double standard_error() const;
};

/// Probe `index` of the sequence described by `config`: a unit vector that
/// depends only on (seed, index, n, distribution).
Vector generate_probe(std::size_t n, const ProbeConfig& config, std::size_t index);

/// All config.nv probes. Throws InvalidArgument when nv == 0 or n == 0.
std::vector<Vector> generate_probes(std::size_t n, const ProbeConfig& config);

/// Throws InvalidArgument on an empty input.
SampleSeries running_average(std::span<const double> values);

}  // namespace specrank
