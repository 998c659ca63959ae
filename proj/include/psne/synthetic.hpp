#ifndef PSNE_SYNTHETIC_HPP
#define PSNE_SYNTHETIC_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "psne/matrix.hpp"
#include "psne/poisson_geometry.hpp"

namespace psne {

struct GeneratorConfig {
    double lambda_bias = 1.0;
    double lambda_peak = 8.0;
    std::size_t n_groups = 3;
    std::size_t n_per_group = 20;
    std::size_t n_features = 40;
    std::uint64_t seed = 42;
    /// Multiplies lambda_bias and lambda_peak (sparsity sweeps).
    double rate_scale = 1.0;

    void validate() const;
};

/// 3 groups x 20 samples, 40 features, rates in [1, 9].
GeneratorConfig angular_defaults();
/// 4 groups x 30 samples, 30 features, rates in [0.1, 2.6].
GeneratorConfig sparse_sequential_defaults();

struct LabeledDataset {
    std::string generator;
    std::uint64_t seed = 0;
    CountMatrix counts;
    RealMatrix rates;
    std::vector<int> group;
    std::vector<double> manifold_t;
    std::vector<double> manifold_h;
    /// Pre-removal indices of all-zero samples that were dropped.
    std::vector<std::size_t> removed_rows;

    std::size_t n_samples() const noexcept { return counts.n_samples(); }
};

/**
 * Angular manifold: t on a circle split into three arcs, h in [0, 10].
 * Feature m prefers t* = 3pi/2 + 2pi (m mod 20) / 20, h* = 5 floor(m / 20)
 * and fires at bias + peak * exp(-dt^2 / 2 - dh^2 / 20), dt circular.
 */
LabeledDataset generate_angular(const GeneratorConfig& config = angular_defaults());

/**
 * Linear manifold: t in [1.5, 7.5] split into four segments, h in [0, 5].
 * Feature m prefers t* = 1.5 + 6 (m mod 25) / 25, h* = 2.5 floor(m / 25)
 * and fires at bias + peak * exp(-d^2 / 3). Samples whose counts are all
 * zero are dropped together with their labels and coordinates.
 */
LabeledDataset generate_sparse_sequential(const GeneratorConfig& config = sparse_sequential_defaults());

/**
 * Rates multiplied by `scale` and counts redrawn. The redraw uses the
 * dataset's seed on the count stream, row-major over the current samples,
 * so scale = 1 on an angular dataset reproduces its counts exactly.
 */
LabeledDataset rescale_rates(const LabeledDataset& data, double scale);

/// Circular distance min(|a - b|, 2pi - |a - b|) for angles within one turn.
double circular_distance(double a, double b);

double zero_fraction(const CountMatrix& counts);

/// Mean over entries of exp(-scale * rate): the expected zero fraction.
double expected_zero_fraction(const RealMatrix& rates, double scale = 1.0);

/// Scale s with expected_zero_fraction(rates, s) == target, by bisection.
double solve_rate_scale(const RealMatrix& rates, double target_zero_fraction);

}  // namespace psne

#endif
