#ifndef PSNE_EVALUATION_HPP
#define PSNE_EVALUATION_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psne/matrix.hpp"

namespace psne {

inline constexpr std::size_t default_knn_k = 5;

/**
 * Leave-one-out kNN accuracy in the embedding. Distance ties go to the
 * smaller sample index; vote ties go to the label of the nearest neighbor
 * among the tied labels. Throws DegenerateInputError with < 2 classes.
 */
double knn_accuracy(const RealMatrix& coords, std::span<const int> labels, std::size_t k = default_knn_k);

struct KMeansResult {
    std::vector<int> assignment;
    RealMatrix centers;
    double inertia = 0.0;
};

/// Lloyd's algorithm with k-means++ seeding, best inertia over `restarts`.
KMeansResult kmeans(const RealMatrix& coords, std::size_t n_clusters, std::uint64_t seed,
                    std::size_t restarts = 10, std::size_t max_iters = 300);

/// Adjusted Rand Index from the contingency table of two partitions.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

/// ARI between k-means clusters and `labels`.
double kmeans_ari(const RealMatrix& coords, std::span<const int> labels, std::size_t n_clusters,
                  std::uint64_t seed = 42);

/// Ranks starting at 1, ties sharing their average rank.
std::vector<double> average_ranks(std::span<const double> values);

/// max over embedding dimensions of |Spearman r(X[:, p], t)|. Constant
/// dimensions contribute 0.
double spearman_abs(const RealMatrix& coords, std::span<const double> t);

/**
 * Mean silhouette coefficient with Euclidean distances. Members of a
 * singleton class score 0, and a = b = 0 scores 0.
 */
double silhouette(const RealMatrix& coords, std::span<const int> labels);

struct MetricReport {
    std::string method = "p-SNE";
    std::optional<double> knn_accuracy;
    std::optional<double> kmeans_ari;
    std::optional<double> spearman_abs;
    std::optional<double> silhouette;

    bool operator==(const MetricReport&) const = default;
};

struct EvaluationOptions {
    std::size_t knn_k = default_knn_k;
    std::uint64_t seed = 42;
    /// 0 means "number of distinct labels".
    std::size_t n_clusters = 0;
};

/// Label metrics are filled when labels are given, Spearman when t is.
MetricReport evaluate(const RealMatrix& coords, const std::vector<int>* labels, const std::vector<double>* t,
                      const EvaluationOptions& options = {});

}  // namespace psne

#endif
