#include "psne/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "psne/errors.hpp"

namespace psne {

ConditionalMatrix conditional_probabilities(const DissimilarityMatrix& dist, double sharpness) {
    const std::size_t n = dist.size();
    if (n < 2 || dist.values.cols() != n) {
        throw DomainError("conditional_probabilities: need a square matrix with N >= 2");
    }
    if (!(sharpness > 0.0) || !std::isfinite(sharpness)) {
        throw DomainError("conditional_probabilities: sharpness must be positive");
    }

    ConditionalMatrix out{RealMatrix(n, n, 0.0), sharpness};
    for (std::size_t a = 0; a < n; ++a) {
        auto d = dist.values.row(a);
        auto p = out.values.row(a);

        double shift = -std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < n; ++b) {
            if (b != a) {
                shift = std::max(shift, -sharpness * d[b]);
            }
        }

        double total = 0.0;
        for (std::size_t b = 0; b < n; ++b) {
            if (b != a) {
                p[b] = std::exp(-sharpness * d[b] - shift);
                total += p[b];
            }
        }
        for (std::size_t b = 0; b < n; ++b) {
            p[b] /= total;
        }
    }
    return out;
}

AffinityMatrix symmetrize(const ConditionalMatrix& cond) {
    const std::size_t n = cond.size();
    const double scale = 1.0 / (2.0 * static_cast<double>(n));
    AffinityMatrix out{RealMatrix(n, n, 0.0)};
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const double s = (cond.values(a, b) + cond.values(b, a)) * scale;
            out.values(a, b) = s;
            out.values(b, a) = s;
        }
    }
    return out;
}

AffinityMatrix exaggerate(const AffinityMatrix& affinity, double alpha, bool renormalize) {
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
        throw DomainError("exaggerate: alpha must be >= 1");
    }
    AffinityMatrix out = affinity;
    double total = 0.0;
    for (double& s : out.values.values()) {
        s *= alpha;
        total += s;
    }
    if (renormalize && total > 0.0) {
        for (double& s : out.values.values()) {
            s /= total;
        }
    }
    return out;
}

AffinityMatrix joint_affinities(const DissimilarityMatrix& dist, double sharpness) {
    return symmetrize(conditional_probabilities(dist, sharpness));
}

}  // namespace psne
