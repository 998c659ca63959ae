#include "psne/poisson_geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "psne/errors.hpp"

namespace psne {

CountMatrix::CountMatrix(Matrix<std::int64_t> values) : values_(std::move(values)) {
    if (values_.rows() < 2) {
        throw std::invalid_argument("count matrix needs at least 2 samples");
    }
    if (values_.cols() < 1) {
        throw std::invalid_argument("count matrix needs at least 1 feature");
    }
    for (std::size_t n = 0; n < values_.rows(); ++n) {
        for (std::size_t m = 0; m < values_.cols(); ++m) {
            if (values_(n, m) < 0) {
                throw std::invalid_argument("negative count at row " + std::to_string(n) + ", column " +
                                            std::to_string(m));
            }
        }
    }
}

RealMatrix CountMatrix::as_real() const {
    RealMatrix out(values_.rows(), values_.cols());
    auto src = values_.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = static_cast<double>(src[i]);
    }
    return out;
}

double poisson_kl(double lambda1, double lambda2, double epsilon) {
    if (!std::isfinite(lambda1) || !std::isfinite(lambda2) || !std::isfinite(epsilon)) {
        throw DomainError("poisson_kl: non-finite argument");
    }
    if (lambda1 < 0.0 || lambda2 < 0.0) {
        throw DomainError("poisson_kl: rates must be non-negative");
    }
    if (epsilon < 0.0) {
        throw DomainError("poisson_kl: epsilon must be non-negative");
    }
    if (epsilon == 0.0) {
        // Exact closed form, with 0 log 0 = 0 and infinite divergence when
        // only the second rate vanishes.
        if (lambda1 == 0.0) {
            return lambda2;
        }
        if (lambda2 == 0.0) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return lambda1 * std::log((lambda1 + epsilon) / (lambda2 + epsilon)) + lambda2 - lambda1;
}

namespace {

void validate_rates(const RealMatrix& rates, double epsilon) {
    if (rates.rows() < 2 || rates.cols() < 1) {
        throw std::invalid_argument("rate matrix needs at least 2 samples and 1 feature");
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw DomainError("epsilon must be positive and finite");
    }
    for (double r : rates.values()) {
        if (!std::isfinite(r) || r < 0.0) {
            throw DomainError("rates must be finite and non-negative");
        }
    }
}

}  // namespace

DissimilarityMatrix dissimilarity_matrix(const RealMatrix& rates, double epsilon) {
    validate_rates(rates, epsilon);
    const std::size_t n = rates.rows();
    const std::size_t m = rates.cols();

    // log(y + eps) per entry so the pair loop only needs a subtraction.
    RealMatrix log_shifted(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < m; ++f) {
            log_shifted(i, f) = std::log(rates(i, f) + epsilon);
        }
    }

    DissimilarityMatrix out{RealMatrix(n, n, 0.0), epsilon};
    for (std::size_t a = 0; a < n; ++a) {
        auto ya = rates.row(a);
        auto la = log_shifted.row(a);
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) {
                continue;
            }
            auto yb = rates.row(b);
            auto lb = log_shifted.row(b);
            double total = 0.0;
            for (std::size_t f = 0; f < m; ++f) {
                total += ya[f] * (la[f] - lb[f]) + yb[f] - ya[f];
            }
            out.values(a, b) = total;
        }
    }
    return out;
}

DissimilarityMatrix dissimilarity_matrix(const CountMatrix& counts, double epsilon) {
    return dissimilarity_matrix(counts.as_real(), epsilon);
}

DissimilarityMatrix squared_euclidean_matrix(const CountMatrix& counts) {
    const std::size_t n = counts.n_samples();
    const std::size_t m = counts.n_features();
    DissimilarityMatrix out{RealMatrix(n, n, 0.0), 0.0};
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            double total = 0.0;
            for (std::size_t f = 0; f < m; ++f) {
                const double diff = static_cast<double>(counts(a, f) - counts(b, f));
                total += diff * diff;
            }
            out.values(a, b) = total;
            out.values(b, a) = total;
        }
    }
    return out;
}

}  // namespace psne
