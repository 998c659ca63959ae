#include "psne/verification.hpp"

#include <algorithm>
#include <cmath>

#include "psne/errors.hpp"

namespace psne::oracle {

std::size_t series_cutoff_for(double lambda1, const OracleConfig& config) {
    if (config.series_cutoff > 0) {
        return config.series_cutoff;
    }
    const double bound = lambda1 + 40.0 * std::sqrt(lambda1);
    return std::max<std::size_t>(200, static_cast<std::size_t>(std::ceil(bound)));
}

double kl_series(double lambda1, double lambda2, const OracleConfig& config) {
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0) || !std::isfinite(lambda1) || !std::isfinite(lambda2)) {
        throw DomainError("kl_series: both rates must be strictly positive and finite");
    }
    const std::size_t cutoff = series_cutoff_for(lambda1, config);
    const double log_l1 = std::log(lambda1);
    const double log_l2 = std::log(lambda2);
    double total = 0.0;
    for (std::size_t k = 0; k <= cutoff; ++k) {
        const double kk = static_cast<double>(k);
        const double log_fact = std::lgamma(kk + 1.0);
        const double log_u = -lambda1 + kk * log_l1 - log_fact;
        const double log_v = -lambda2 + kk * log_l2 - log_fact;
        total += std::exp(log_u) * (log_u - log_v);
    }
    return total;
}

RealMatrix finite_difference_gradient(const RealMatrix& x, const CostFunction& cost, double step) {
    RealMatrix grad(x.rows(), x.cols(), 0.0);
    RealMatrix probe = x;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            const double original = probe(i, c);
            probe(i, c) = original + step;
            const double up = cost(probe);
            probe(i, c) = original - step;
            const double down = cost(probe);
            probe(i, c) = original;
            grad(i, c) = (up - down) / (2.0 * step);
        }
    }
    return grad;
}

double cost_entrywise(const RealMatrix& s, const RealMatrix& q) {
    double total = 0.0;
    for (std::size_t a = 0; a < s.rows(); ++a) {
        for (std::size_t b = 0; b < s.cols(); ++b) {
            if (a != b) {
                const double diff = std::sqrt(s(a, b)) - std::sqrt(q(a, b));
                total += diff * diff;
            }
        }
    }
    return std::sqrt(total / 2.0);
}

RealMatrix student_t_joint(const RealMatrix& x) {
    const std::size_t n = x.rows();
    RealMatrix q(n, n, 0.0);
    double z = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) {
                continue;
            }
            double d2 = 0.0;
            for (std::size_t c = 0; c < x.cols(); ++c) {
                d2 += (x(a, c) - x(b, c)) * (x(a, c) - x(b, c));
            }
            q(a, b) = 1.0 / (1.0 + d2);
            z += q(a, b);
        }
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            q(a, b) /= z;
        }
    }
    return q;
}

double embedding_cost(const RealMatrix& x, const RealMatrix& s) {
    return cost_entrywise(s, student_t_joint(x));
}

}  // namespace psne::oracle
