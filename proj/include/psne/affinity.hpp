#ifndef PSNE_AFFINITY_HPP
#define PSNE_AFFINITY_HPP

#include "psne/matrix.hpp"
#include "psne/poisson_geometry.hpp"

namespace psne {

/// Row-stochastic p[a, b] = p(b | a), zero diagonal.
struct ConditionalMatrix {
    RealMatrix values;
    double sharpness = 1.0;

    std::size_t size() const noexcept { return values.rows(); }
};

/// Symmetric joint distribution over ordered off-diagonal pairs.
/// Proper affinities sum to 1; exaggerated weights may not.
struct AffinityMatrix {
    RealMatrix values;

    std::size_t size() const noexcept { return values.rows(); }
    double operator()(std::size_t a, std::size_t b) const noexcept { return values(a, b); }
};

inline constexpr double default_exaggeration = 4.0;

/**
 * Softmax of -w * D over each row, excluding the diagonal. Each row is
 * shifted by its maximum before exponentiation.
 */
ConditionalMatrix conditional_probabilities(const DissimilarityMatrix& dist, double sharpness);

/// S[a, b] = (p(b | a) + p(a | b)) / 2N.
AffinityMatrix symmetrize(const ConditionalMatrix& cond);

/**
 * Early-exaggeration weights. With `renormalize` the result is
 * alpha * S / sum(alpha * S), which equals S; without it every entry is
 * multiplied by alpha.
 */
AffinityMatrix exaggerate(const AffinityMatrix& affinity, double alpha, bool renormalize);

/// dissimilarity -> conditionals -> symmetrized joint distribution.
AffinityMatrix joint_affinities(const DissimilarityMatrix& dist, double sharpness);

}  // namespace psne

#endif
