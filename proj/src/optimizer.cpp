#include "psne/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "psne/errors.hpp"
#include "psne/random.hpp"

namespace psne {

void FitConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("invalid " + field + ": " + why);
    };
    if (embed_dim < 1) fail("embed_dim", "must be >= 1");
    if (!(sharpness > 0.0) || !std::isfinite(sharpness)) fail("sharpness", "must be positive");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate", "must be positive");
    if (!(momentum_initial >= 0.0 && momentum_initial < 1.0)) fail("momentum_initial", "must lie in [0, 1)");
    if (!(momentum_final >= 0.0 && momentum_final < 1.0)) fail("momentum_final", "must lie in [0, 1)");
    if (!(exaggeration >= 1.0) || !std::isfinite(exaggeration)) fail("exaggeration", "must be >= 1");
    if (max_iters < 1) fail("max_iters", "must be >= 1");
    if (exaggeration_iters > max_iters) fail("exaggeration_iters", "must not exceed max_iters");
    if (!(tolerance > 0.0)) fail("tolerance", "must be positive");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail("epsilon", "must be positive");
    if (!(group_lasso >= 0.0) || !std::isfinite(group_lasso)) fail("group_lasso", "must be >= 0");
}

KernelMatrix compute_kernel(const RealMatrix& coords) {
    const std::size_t n = coords.rows();
    const std::size_t p = coords.cols();
    if (n < 2) {
        throw DomainError("compute_kernel: need at least 2 points");
    }
    for (double x : coords.values()) {
        if (!std::isfinite(x)) {
            throw StateError("compute_kernel: non-finite embedding coordinate");
        }
    }

    KernelMatrix k{RealMatrix(n, n, 0.0), 0.0, RealMatrix(n, n, 0.0)};
    double upper_sum = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        auto xa = coords.row(a);
        for (std::size_t b = a + 1; b < n; ++b) {
            auto xb = coords.row(b);
            double d2 = 0.0;
            for (std::size_t c = 0; c < p; ++c) {
                const double diff = xa[c] - xb[c];
                d2 += diff * diff;
            }
            const double u = 1.0 / (1.0 + d2);
            k.u(a, b) = u;
            k.u(b, a) = u;
            upper_sum += u;
        }
    }
    k.z = 2.0 * upper_sum;
    const double inv_z = 1.0 / k.z;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a != b) {
                k.q(a, b) = k.u(a, b) * inv_z;
            }
        }
    }
    return k;
}

double hellinger_cost(const RealMatrix& weights, const RealMatrix& q) {
    const std::size_t n = weights.rows();
    if (weights.cols() != n || q.rows() != n || q.cols() != n) {
        throw std::invalid_argument("hellinger_cost: S and Q must be square and the same size");
    }
    double total = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) {
                continue;
            }
            const double s = weights(a, b);
            const double qq = q(a, b);
            if (s < 0.0 || qq < 0.0) {
                throw DomainError("hellinger_cost: negative probability");
            }
            const double diff = std::sqrt(s) - std::sqrt(qq);
            total += diff * diff;
        }
    }
    return std::sqrt(0.5 * total);
}

double hellinger_cost(const AffinityMatrix& weights, const KernelMatrix& kernel) {
    return hellinger_cost(weights.values, kernel.q);
}

RealMatrix gradient(const RealMatrix& coords, const AffinityMatrix& weights, const KernelMatrix& kernel) {
    const std::size_t n = coords.rows();
    const std::size_t p = coords.cols();
    RealMatrix grad(n, p, 0.0);

    const double cost = hellinger_cost(weights, kernel);
    if (cost < zero_cost_threshold) {
        return grad;
    }

    // r_ab = (sqrt S - sqrt Q) / sqrt Q, with Q floored against underflow.
    RealMatrix ratio(n, n, 0.0);
    double ratio_q_sum = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) {
                continue;
            }
            const double q = std::max(kernel.q(a, b), q_floor);
            const double sqrt_q = std::sqrt(q);
            const double r = (std::sqrt(weights(a, b)) - sqrt_q) / sqrt_q;
            ratio(a, b) = r;
            ratio_q_sum += r * q;
        }
    }

    const double inv_z = 1.0 / kernel.z;
    const double beta = ratio_q_sum * inv_z;
    const double scale = 1.0 / cost;

    for (std::size_t a = 0; a < n; ++a) {
        auto xa = coords.row(a);
        auto ga = grad.row(a);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == a) {
                continue;
            }
            const double u = kernel.u(a, j);
            const double coeff = ((ratio(a, j) + ratio(j, a)) * 0.5 * inv_z - beta) * u * u;
            auto xj = coords.row(j);
            for (std::size_t c = 0; c < p; ++c) {
                ga[c] += coeff * (xa[c] - xj[c]);
            }
        }
        for (std::size_t c = 0; c < p; ++c) {
            ga[c] *= scale;
        }
    }
    return grad;
}

GroupLassoTerm group_lasso_penalty(const RealMatrix& coords, double gamma) {
    if (!(gamma >= 0.0)) {
        throw DomainError("group_lasso_penalty: gamma must be >= 0");
    }
    const std::size_t n = coords.rows();
    const std::size_t p = coords.cols();
    GroupLassoTerm term{0.0, RealMatrix(n, p, 0.0)};
    if (gamma == 0.0) {
        return term;
    }
    for (std::size_t c = 0; c < p; ++c) {
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sq += coords(i, c) * coords(i, c);
        }
        const double norm = std::sqrt(sq);
        term.penalty += gamma * norm;
        if (norm > 0.0) {
            for (std::size_t i = 0; i < n; ++i) {
                term.subgradient(i, c) = gamma * coords(i, c) / norm;
            }
        }
    }
    return term;
}

RealMatrix initial_embedding(std::size_t n_samples, std::size_t embed_dim, std::uint64_t seed) {
    CounterRng rng(seed, streams::embedding_init);
    RealMatrix x(n_samples, embed_dim);
    for (double& v : x.values()) {
        v = rng.student_t3();
    }
    return x;
}

namespace {

bool all_finite(const RealMatrix& m) {
    return std::all_of(m.values().begin(), m.values().end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

EmbeddingState optimize(const AffinityMatrix& affinity, const FitConfig& config) {
    config.validate();
    const std::size_t n = affinity.size();
    if (n < 2 || affinity.values.cols() != n) {
        throw std::invalid_argument("optimize: affinity must be square with N >= 2");
    }

    const AffinityMatrix exaggerated = exaggerate(affinity, config.exaggeration, config.exaggeration_renormalize);

    EmbeddingState state;
    state.coords = initial_embedding(n, config.embed_dim, config.seed);
    state.velocity = RealMatrix(n, config.embed_dim, 0.0);
    state.cost_trace.reserve(config.max_iters);

    double previous = 0.0;
    for (std::size_t k = 1; k <= config.max_iters; ++k) {
        const bool in_exaggeration = k <= config.exaggeration_iters;
        const AffinityMatrix& weights = in_exaggeration ? exaggerated : affinity;

        const KernelMatrix kernel = compute_kernel(state.coords);
        const GroupLassoTerm lasso = group_lasso_penalty(state.coords, config.group_lasso);
        const double cost = hellinger_cost(weights, kernel) + lasso.penalty;
        if (!std::isfinite(cost)) {
            throw DivergenceError(k, "non-finite cost");
        }
        state.cost_trace.push_back({k, cost});
        state.iteration = k;

        // The comparison needs two consecutive costs on the same weights, so
        // it starts two iterations after exaggeration ends.
        if (k >= 2 && k > config.exaggeration_iters + 1 && std::abs(cost - previous) < config.tolerance) {
            state.converged = true;
            break;
        }
        previous = cost;

        RealMatrix grad = gradient(state.coords, weights, kernel);
        if (config.group_lasso > 0.0) {
            auto g = grad.values();
            auto s = lasso.subgradient.values();
            for (std::size_t i = 0; i < g.size(); ++i) {
                g[i] += s[i];
            }
        }

        const double mu = config.momentum_at(k);
        auto v = state.velocity.values();
        auto x = state.coords.values();
        auto g = grad.values();
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = mu * v[i] - config.learning_rate * g[i];
            x[i] += v[i];
        }
        if (!all_finite(state.coords)) {
            throw DivergenceError(k, "non-finite embedding coordinate");
        }
    }
    return state;
}

FitResult fit(const DissimilarityMatrix& dist, const FitConfig& config) {
    config.validate();
    AffinityMatrix affinity = joint_affinities(dist, config.sharpness);
    EmbeddingState state = optimize(affinity, config);
    return {std::move(state), std::move(affinity)};
}

FitResult fit(const CountMatrix& counts, const FitConfig& config) {
    config.validate();
    return fit(dissimilarity_matrix(counts, config.epsilon), config);
}

}  // namespace psne
