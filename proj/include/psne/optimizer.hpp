#ifndef PSNE_OPTIMIZER_HPP
#define PSNE_OPTIMIZER_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "psne/affinity.hpp"
#include "psne/matrix.hpp"
#include "psne/poisson_geometry.hpp"

namespace psne {

/**
 * Hyperparameters of a fit. Defaults are the reference configuration
 * (momentum 0.5 -> 0.8 at iteration 250, exaggeration 4 for 100
 * iterations, eps = 1e-2, gamma = 0, seed 42, 500 iterations, tau = 1e-8);
 * sharpness and learning rate are per-experiment choices.
 */
struct FitConfig {
    std::size_t embed_dim = 2;
    double sharpness = 1.0;
    double learning_rate = 100.0;
    double momentum_initial = 0.5;
    double momentum_final = 0.8;
    std::size_t momentum_switch_iter = 250;
    double exaggeration = default_exaggeration;
    std::size_t exaggeration_iters = 100;
    std::size_t max_iters = 500;
    double tolerance = 1e-8;
    double epsilon = default_epsilon;
    double group_lasso = 0.0;
    std::uint64_t seed = 42;
    bool exaggeration_renormalize = false;

    /// Throws std::invalid_argument naming the first offending field.
    void validate() const;

    /// Momentum in effect at (1-based) iteration k.
    double momentum_at(std::size_t k) const noexcept {
        return k < momentum_switch_iter ? momentum_initial : momentum_final;
    }

    bool operator==(const FitConfig&) const = default;
};

struct TracePoint {
    std::size_t iteration;
    double cost;

    bool operator==(const TracePoint&) const = default;
};

struct EmbeddingState {
    RealMatrix coords;    // N x P
    RealMatrix velocity;  // N x P
    std::size_t iteration = 0;
    bool converged = false;  // stopped on the tolerance rather than max_iters
    std::vector<TracePoint> cost_trace;
};

/// Student-t kernel u = 1 / (1 + |x_a - x_b|^2) and its normalization.
struct KernelMatrix {
    RealMatrix u;   // symmetric, diagonal left at 0
    double z = 0.0; // sum over ordered off-diagonal pairs
    RealMatrix q;   // u / z off the diagonal, 0 on it

    std::size_t size() const noexcept { return u.rows(); }
};

/// Floor applied to Q before square roots and divisions.
inline constexpr double q_floor = 1e-300;
/// Below this cost the gradient is defined to be zero.
inline constexpr double zero_cost_threshold = 1e-12;

/// Throws StateError on non-finite coordinates, DomainError for N < 2.
KernelMatrix compute_kernel(const RealMatrix& coords);

/**
 * Hellinger distance sqrt(1/2 sum_{a != b} (sqrt S - sqrt Q)^2). `weights`
 * may be an exaggerated (unnormalized) affinity; the result then can exceed 1.
 */
double hellinger_cost(const RealMatrix& weights, const RealMatrix& q);
double hellinger_cost(const AffinityMatrix& weights, const KernelMatrix& kernel);

/**
 * Analytic gradient of the Hellinger cost with respect to every embedding
 * point:
 *
 *   dL/dx_n = (1/L) sum_{j != n} (A_nj - beta) u_nj^2 (x_n - x_j)
 *   A_nj    = (r_nj + r_jn) / 2Z
 *   beta    = (1/Z) sum_{a != b} r_ab Q_ab
 *   r_ab    = (sqrt S_ab - sqrt Q_ab) / sqrt Q_ab
 *
 * Returns all zeros when L < zero_cost_threshold.
 */
RealMatrix gradient(const RealMatrix& coords, const AffinityMatrix& weights, const KernelMatrix& kernel);

struct GroupLassoTerm {
    double penalty = 0.0;
    RealMatrix subgradient;  // N x P
};

/**
 * gamma * sum_p ||X[:, p]||_2, one group per embedding dimension. The
 * subgradient of an all-zero group is zero.
 */
GroupLassoTerm group_lasso_penalty(const RealMatrix& coords, double gamma);

/// Initial coordinates: i.i.d. Student-t(3) draws from the embedding stream.
RealMatrix initial_embedding(std::size_t n_samples, std::size_t embed_dim, std::uint64_t seed);

/// Momentum descent on a fixed affinity matrix.
EmbeddingState optimize(const AffinityMatrix& affinity, const FitConfig& config);

struct FitResult {
    EmbeddingState state;
    AffinityMatrix affinity;
};

/// Poisson-KL dissimilarities -> joint affinities -> optimize.
FitResult fit(const CountMatrix& counts, const FitConfig& config);

/// Same pipeline on a caller-supplied dissimilarity matrix.
FitResult fit(const DissimilarityMatrix& dist, const FitConfig& config);

}  // namespace psne

#endif
