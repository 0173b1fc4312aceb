#pragma once

#include "specrank/linops.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace specrank {

enum class SyntheticFamily { HadamardLowRank, Matern1D, Matern2D, PlantedSpectrum };

std::string to_string(SyntheticFamily family);

/// Everything needed to regenerate a synthetic matrix.
struct SyntheticSpec {
    SyntheticFamily family = SyntheticFamily::HadamardLowRank;
    // HadamardLowRank
    std::size_t n = 2048;
    std::size_t k = 128;
    double sigma = 0.0;
    std::uint64_t seed = 42;
    // Matern1D uses rows as the point count; Matern2D uses a rows x cols grid.
    std::size_t rows = 2048;
    std::size_t cols = 1;
    double nu = 0.5;
    std::optional<double> length_scale;  // default 0.05 (1D) / 0.1 (2D)
    // PlantedSpectrum
    std::vector<double> eigenvalues;
    bool rotate = false;
};

/// Known facts about a generated matrix.
struct GroundTruth {
    std::string family;
    std::optional<std::size_t> true_rank;
    std::optional<double> snr_db;
    std::vector<double> eigenvalues;  // ascending; empty when not known in closed form
    std::map<std::string, double> parameters;
};

struct GeneratedMatrix {
    LinearOperator op;
    GroundTruth truth;
};

/// A = H H^T with H the first k columns of the n x n Sylvester Hadamard
/// matrix scaled by 1/sqrt(n); plus E = (N + N^T)/2, N_ij ~ normal(0, sigma^2)
/// when sigma > 0. Throws InvalidArgument unless n is a power of two and
/// 1 <= k <= n.
GeneratedMatrix hadamard_lowrank(std::size_t n, std::size_t k, double sigma, std::uint64_t seed);

/// Matern covariance for half-integer smoothness (nu = 1/2, 3/2, 5/2).
double matern_kernel(double distance, double nu, double length_scale);

/// Covariance of a regular grid on [0,1] (cols == 1) or on the unit square
/// (rows x cols, row-major point order).
GeneratedMatrix matern_covariance(std::size_t rows, std::size_t cols, double nu, double length_scale);

/// Diagonal(eigenvalues), or with `rotate` a dense matrix Q D Q^T where Q is a
/// product of five random Householder reflectors.
GeneratedMatrix planted_spectrum(std::vector<double> eigenvalues, bool rotate, std::uint64_t seed);

GeneratedMatrix generate(const SyntheticSpec& spec);

}  // namespace specrank
