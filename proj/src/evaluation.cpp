#include "psne/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "psne/errors.hpp"
#include "psne/random.hpp"

namespace psne {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        const double diff = a[c] - b[c];
        d += diff * diff;
    }
    return d;
}

void check_labels(const RealMatrix& coords, std::span<const int> labels) {
    if (labels.size() != coords.rows()) {
        throw std::invalid_argument("label count does not match the number of embedded samples");
    }
}

std::size_t distinct_count(std::span<const int> labels) {
    return std::set<int>(labels.begin(), labels.end()).size();
}

}  // namespace

double knn_accuracy(const RealMatrix& coords, std::span<const int> labels, std::size_t k) {
    check_labels(coords, labels);
    const std::size_t n = coords.rows();
    if (distinct_count(labels) < 2) {
        throw DegenerateInputError("knn_accuracy: need at least 2 classes");
    }
    if (k < 1 || k >= n) {
        throw DomainError("knn_accuracy: k must satisfy 1 <= k < N");
    }

    std::size_t correct = 0;
    std::vector<std::pair<double, std::size_t>> neighbors;
    for (std::size_t i = 0; i < n; ++i) {
        neighbors.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                neighbors.emplace_back(squared_distance(coords.row(i), coords.row(j)), j);
            }
        }
        // pair ordering breaks distance ties by index
        std::partial_sort(neighbors.begin(), neighbors.begin() + static_cast<std::ptrdiff_t>(k), neighbors.end());

        std::map<int, std::size_t> votes;
        for (std::size_t r = 0; r < k; ++r) {
            ++votes[labels[neighbors[r].second]];
        }
        std::size_t best = 0;
        for (const auto& [label, count] : votes) {
            best = std::max(best, count);
        }
        int predicted = labels[neighbors[0].second];
        for (std::size_t r = 0; r < k; ++r) {
            const int label = labels[neighbors[r].second];
            if (votes[label] == best) {
                predicted = label;
                break;
            }
        }
        correct += predicted == labels[i] ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

KMeansResult kmeans(const RealMatrix& coords, std::size_t n_clusters, std::uint64_t seed, std::size_t restarts,
                    std::size_t max_iters) {
    const std::size_t n = coords.rows();
    const std::size_t p = coords.cols();
    if (n_clusters < 1) {
        throw DomainError("kmeans: need at least one cluster");
    }
    if (n < n_clusters) {
        throw DomainError("kmeans: fewer samples than clusters");
    }

    CounterRng rng(seed, streams::kmeans);
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();

    for (std::size_t attempt = 0; attempt < std::max<std::size_t>(restarts, 1); ++attempt) {
        // k-means++ seeding
        RealMatrix centers(n_clusters, p);
        std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
        std::size_t pick = rng.below(n);
        for (std::size_t c = 0; c < n_clusters; ++c) {
            std::copy_n(coords.row(pick).begin(), p, centers.row(c).begin());
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                nearest[i] = std::min(nearest[i], squared_distance(coords.row(i), centers.row(c)));
                total += nearest[i];
            }
            if (c + 1 == n_clusters) {
                break;
            }
            if (total <= 0.0) {
                pick = rng.below(n);
                continue;
            }
            double target = rng.uniform() * total;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                target -= nearest[i];
                if (target < 0.0) {
                    pick = i;
                    break;
                }
            }
        }

        std::vector<int> assignment(n, -1);
        double inertia = 0.0;
        for (std::size_t iter = 0; iter < max_iters; ++iter) {
            bool changed = false;
            inertia = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                int arg = 0;
                double dmin = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < n_clusters; ++c) {
                    const double d = squared_distance(coords.row(i), centers.row(c));
                    if (d < dmin) {
                        dmin = d;
                        arg = static_cast<int>(c);
                    }
                }
                changed = changed || assignment[i] != arg;
                assignment[i] = arg;
                inertia += dmin;
            }
            if (!changed) {
                break;
            }
            RealMatrix sums(n_clusters, p, 0.0);
            std::vector<std::size_t> sizes(n_clusters, 0);
            for (std::size_t i = 0; i < n; ++i) {
                const auto c = static_cast<std::size_t>(assignment[i]);
                ++sizes[c];
                for (std::size_t d = 0; d < p; ++d) {
                    sums(c, d) += coords(i, d);
                }
            }
            for (std::size_t c = 0; c < n_clusters; ++c) {
                // empty clusters keep their previous center
                if (sizes[c] == 0) {
                    continue;
                }
                for (std::size_t d = 0; d < p; ++d) {
                    centers(c, d) = sums(c, d) / static_cast<double>(sizes[c]);
                }
            }
        }

        if (inertia < best.inertia) {
            best = KMeansResult{std::move(assignment), std::move(centers), inertia};
        }
    }
    return best;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("adjusted_rand_index: partitions differ in length");
    }
    const std::size_t n = a.size();
    std::map<std::pair<int, int>, double> table;
    std::map<int, double> rows;
    std::map<int, double> cols;
    for (std::size_t i = 0; i < n; ++i) {
        table[{a[i], b[i]}] += 1.0;
        rows[a[i]] += 1.0;
        cols[b[i]] += 1.0;
    }
    auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
    double index = 0.0;
    for (const auto& [key, count] : table) {
        index += pairs(count);
    }
    double sum_rows = 0.0;
    for (const auto& [key, count] : rows) {
        sum_rows += pairs(count);
    }
    double sum_cols = 0.0;
    for (const auto& [key, count] : cols) {
        sum_cols += pairs(count);
    }
    const double total = pairs(static_cast<double>(n));
    const double expected = total > 0.0 ? sum_rows * sum_cols / total : 0.0;
    const double max_index = 0.5 * (sum_rows + sum_cols);
    const double denom = max_index - expected;
    if (denom == 0.0) {
        // Both partitions trivial (all-in-one or all singletons): agreement
        // is perfect if they are identical, otherwise chance level.
        return index == max_index ? 1.0 : 0.0;
    }
    return (index - expected) / denom;
}

double kmeans_ari(const RealMatrix& coords, std::span<const int> labels, std::size_t n_clusters, std::uint64_t seed) {
    check_labels(coords, labels);
    if (n_clusters < 2) {
        throw DomainError("kmeans_ari: need at least 2 clusters");
    }
    const KMeansResult clusters = kmeans(coords, n_clusters, seed);
    return adjusted_rand_index(clusters.assignment, labels);
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    std::vector<double> ranks(n);
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start + 1;
        while (end < n && values[order[end]] == values[order[start]]) {
            ++end;
        }
        const double rank = 0.5 * static_cast<double>(start + end - 1) + 1.0;
        for (std::size_t i = start; i < end; ++i) {
            ranks[order[i]] = rank;
        }
        start = end;
    }
    return ranks;
}

namespace {

double pearson(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman_abs(const RealMatrix& coords, std::span<const double> t) {
    if (t.size() != coords.rows()) {
        throw std::invalid_argument("spearman_abs: manifold values do not match the number of samples");
    }
    if (coords.rows() < 3) {
        throw DomainError("spearman_abs: need at least 3 samples");
    }
    const std::vector<double> t_ranks = average_ranks(t);
    std::vector<double> column(coords.rows());
    double best = 0.0;
    for (std::size_t c = 0; c < coords.cols(); ++c) {
        for (std::size_t i = 0; i < coords.rows(); ++i) {
            column[i] = coords(i, c);
        }
        best = std::max(best, std::abs(pearson(average_ranks(column), t_ranks)));
    }
    return std::min(best, 1.0);
}

double silhouette(const RealMatrix& coords, std::span<const int> labels) {
    check_labels(coords, labels);
    const std::size_t n = coords.rows();
    std::map<int, std::size_t> sizes;
    for (int l : labels) {
        ++sizes[l];
    }
    if (sizes.size() < 2) {
        throw DegenerateInputError("silhouette: need at least 2 classes");
    }

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (sizes[labels[i]] < 2) {
            continue;
        }
        std::map<int, double> sums;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                sums[labels[j]] += std::sqrt(squared_distance(coords.row(i), coords.row(j)));
            }
        }
        const double a = sums[labels[i]] / static_cast<double>(sizes[labels[i]] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [label, size] : sizes) {
            if (label != labels[i]) {
                b = std::min(b, sums[label] / static_cast<double>(size));
            }
        }
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

MetricReport evaluate(const RealMatrix& coords, const std::vector<int>* labels, const std::vector<double>* t,
                      const EvaluationOptions& options) {
    MetricReport report;
    if (labels != nullptr) {
        const std::size_t classes = distinct_count(*labels);
        report.knn_accuracy = knn_accuracy(coords, *labels, options.knn_k);
        report.kmeans_ari =
            kmeans_ari(coords, *labels, options.n_clusters == 0 ? classes : options.n_clusters, options.seed);
        report.silhouette = silhouette(coords, *labels);
    }
    if (t != nullptr) {
        report.spearman_abs = spearman_abs(coords, *t);
    }
    return report;
}

}  // namespace psne
