#ifndef PSNE_VERIFICATION_HPP
#define PSNE_VERIFICATION_HPP

#include <cstddef>
#include <functional>

#include "psne/matrix.hpp"

// Brute-force reference computations. Nothing here calls into the
// production kernels it is used to check.
namespace psne::oracle {

struct OracleConfig {
    /// Highest Poisson term k summed; 0 selects max(200, lambda + 40 sqrt(lambda)).
    std::size_t series_cutoff = 0;
    double fd_step = 1e-5;
};

/**
 * KL(Pois(l1) || Pois(l2)) as the explicit sum over k of
 * U(k) log(U(k) / V(k)), pmfs evaluated in log space.
 * Throws DomainError unless both rates are strictly positive.
 */
double kl_series(double lambda1, double lambda2, const OracleConfig& config = {});

/// Cutoff used by kl_series for a given first rate.
std::size_t series_cutoff_for(double lambda1, const OracleConfig& config = {});

using CostFunction = std::function<double(const RealMatrix&)>;

/// Central differences [f(X + h e) - f(X - h e)] / 2h for every coordinate.
RealMatrix finite_difference_gradient(const RealMatrix& x, const CostFunction& cost, double step = 1e-5);

/// sqrt(1/2 sum_{a != b} (sqrt S - sqrt Q)^2) by a plain double loop.
double cost_entrywise(const RealMatrix& s, const RealMatrix& q);

/// Student-t joint distribution Q of an embedding, computed naively.
RealMatrix student_t_joint(const RealMatrix& x);

/// cost_entrywise(S, student_t_joint(X)); the black box for gradient checks.
double embedding_cost(const RealMatrix& x, const RealMatrix& s);

}  // namespace psne::oracle

#endif
