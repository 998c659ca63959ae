#ifndef PSNE_POISSON_GEOMETRY_HPP
#define PSNE_POISSON_GEOMETRY_HPP

#include <cstddef>
#include <cstdint>

#include "psne/matrix.hpp"

namespace psne {

inline constexpr double default_epsilon = 1e-2;

/**
 * N x M matrix of non-negative integer counts (samples by features).
 * Construction validates N >= 2, M >= 1 and that every entry is >= 0.
 */
class CountMatrix {
public:
    explicit CountMatrix(Matrix<std::int64_t> values);

    std::size_t n_samples() const noexcept { return values_.rows(); }
    std::size_t n_features() const noexcept { return values_.cols(); }
    const Matrix<std::int64_t>& values() const noexcept { return values_; }
    std::int64_t operator()(std::size_t n, std::size_t m) const noexcept { return values_(n, m); }

    /// Counts promoted to double, for the real-rate overloads.
    RealMatrix as_real() const;

    bool operator==(const CountMatrix&) const = default;

private:
    Matrix<std::int64_t> values_;
};

/// Pairwise dissimilarities D[a, b]. Zero diagonal, generally asymmetric.
struct DissimilarityMatrix {
    RealMatrix values;
    double epsilon = default_epsilon;

    std::size_t size() const noexcept { return values.rows(); }
    double operator()(std::size_t a, std::size_t b) const noexcept { return values(a, b); }
};

/**
 * KL(Pois(lambda1) || Pois(lambda2)) with epsilon added to both rates
 * inside the logarithm only:
 *
 *   lambda1 * log((lambda1 + eps) / (lambda2 + eps)) + lambda2 - lambda1
 *
 * eps = 0 gives the exact closed form (infinite when only lambda2 is 0).
 * Throws DomainError for negative or non-finite arguments.
 */
double poisson_kl(double lambda1, double lambda2, double epsilon = default_epsilon);

/**
 * D[a, b] = sum over features of poisson_kl(y[a, m], y[b, m], eps), with
 * features accumulated in ascending order and the diagonal set to 0.
 */
DissimilarityMatrix dissimilarity_matrix(const CountMatrix& counts, double epsilon = default_epsilon);

/// Same as above for real-valued rate matrices (e.g. rescaled rates).
DissimilarityMatrix dissimilarity_matrix(const RealMatrix& rates, double epsilon = default_epsilon);

/// Squared Euclidean distances between raw count rows; the comparison
/// geometry used when benchmarking the Poisson dissimilarity.
DissimilarityMatrix squared_euclidean_matrix(const CountMatrix& counts);

}  // namespace psne

#endif
