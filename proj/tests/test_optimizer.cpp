#include <doctest.h>

#include <cmath>
#include <numeric>

#include "psne/affinity.hpp"
#include "psne/errors.hpp"
#include "psne/optimizer.hpp"
#include "psne/random.hpp"
#include "psne/verification.hpp"

using namespace psne;

namespace {

RealMatrix random_coords(CounterRng& rng, std::size_t n, std::size_t p, double spread) {
    RealMatrix x(n, p);
    for (double& v : x.values()) v = spread * rng.normal();
    return x;
}

AffinityMatrix random_affinity(CounterRng& rng, std::size_t n) {
    DissimilarityMatrix d{RealMatrix(n, n, 0.0), 0.01};
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b) d.values(a, b) = 4.0 * rng.uniform();
    return joint_affinities(d, 1.0);
}

}  // namespace

TEST_CASE("kernel on collinear points") {
    RealMatrix x(3, 1, std::vector<double>{0.0, 2.0, 3.0});
    const auto k = compute_kernel(x);
    CHECK(k.z == doctest::Approx(1.6).epsilon(1e-15));
    CHECK(k.u(0, 1) == doctest::Approx(0.2));
    CHECK(k.u(1, 2) == doctest::Approx(0.5));
    CHECK(k.u(0, 2) == doctest::Approx(0.1));
    CHECK(k.q(1, 2) == doctest::Approx(0.3125).epsilon(1e-15));
    CHECK(k.q(2, 1) == doctest::Approx(0.3125).epsilon(1e-15));
    CHECK(k.q(0, 1) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(k.q(0, 2) == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK(k.q(1, 1) == 0.0);
}

TEST_CASE("kernel on coincident points is uniform") {
    RealMatrix x(3, 2, 1.5);
    const auto k = compute_kernel(x);
    CHECK(k.z == 6.0);
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b)
            CHECK(k.q(a, b) == doctest::Approx(a == b ? 0.0 : 1.0 / 6.0));
}

TEST_CASE("kernel errors") {
    CHECK_THROWS_AS(compute_kernel(RealMatrix(1, 2, 0.0)), DomainError);
    RealMatrix x(3, 2, 0.0);
    x(1, 1) = std::nan("");
    CHECK_THROWS_AS(compute_kernel(x), StateError);
}

TEST_CASE("kernel against the naive oracle (property)") {
    CounterRng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_coords(rng, 2 + rng.below(20), 1 + rng.below(4), 3.0);
        const auto k = compute_kernel(x);
        const auto q = oracle::student_t_joint(x);
        double sum = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            REQUIRE(std::abs(k.q.values()[i] - q.values()[i]) < 1e-15);
            sum += k.q.values()[i];
        }
        REQUIRE(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("hellinger cost examples") {
    SUBCASE("identical distributions") {
        RealMatrix s(3, 3, 1.0 / 6.0);
        for (std::size_t i = 0; i < 3; ++i) s(i, i) = 0.0;
        CHECK(hellinger_cost(s, s) == 0.0);
    }
    SUBCASE("one pair against uniform") {
        RealMatrix s(3, 3, 0.0);
        s(0, 1) = s(1, 0) = 0.5;
        RealMatrix q(3, 3, 1.0 / 6.0);
        for (std::size_t i = 0; i < 3; ++i) q(i, i) = 0.0;
        const double d = std::sqrt(0.5) - std::sqrt(1.0 / 6.0);
        const double expected = std::sqrt(0.5 * (2.0 * d * d + 4.0 / 6.0));
        CHECK(hellinger_cost(s, q) == doctest::Approx(expected).epsilon(1e-14));
    }
    SUBCASE("disjoint supports reach 1") {
        RealMatrix s(3, 3, 0.0), q(3, 3, 0.0);
        s(0, 1) = s(1, 0) = 0.5;
        q(0, 2) = q(2, 0) = 0.5;
        CHECK(hellinger_cost(s, q) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("shape mismatch and negatives") {
        CHECK_THROWS(hellinger_cost(RealMatrix(3, 3, 0.0), RealMatrix(2, 2, 0.0)));
        RealMatrix s(2, 2, 0.0), q(2, 2, 0.0);
        s(0, 1) = -0.1;
        CHECK_THROWS_AS(hellinger_cost(s, q), DomainError);
    }
}

TEST_CASE("hellinger cost matches the entrywise oracle and lies in [0, 1] (property)") {
    CounterRng rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + rng.below(25);
        const auto s = random_affinity(rng, n);
        const auto k = compute_kernel(random_coords(rng, n, 2, 2.0));
        const double cost = hellinger_cost(s, k);
        REQUIRE(cost >= 0.0);
        REQUIRE(cost <= 1.0 + 1e-12);
        REQUIRE(std::abs(cost - oracle::cost_entrywise(s.values, k.q)) < 1e-13);
    }
}

TEST_CASE("analytic gradient agrees with central differences") {
    CounterRng rng(11);
    int checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 3 + rng.below(10);
        const std::size_t p = 1 + rng.below(3);
        auto s = random_affinity(rng, n);
        if (trial % 2 == 1) s = exaggerate(s, 4.0, false);
        const auto x = random_coords(rng, n, p, 1.5);
        const auto analytic = gradient(x, s, compute_kernel(x));
        const auto numeric = oracle::finite_difference_gradient(
            x, [&](const RealMatrix& y) { return oracle::embedding_cost(y, s.values); }, 1e-5);
        double scale = 0.0;
        for (double g : numeric.values()) scale = std::max(scale, std::abs(g));
        for (std::size_t i = 0; i < analytic.size(); ++i) {
            REQUIRE(std::abs(analytic.values()[i] - numeric.values()[i]) <= 1e-6 * std::max(scale, 1e-3));
        }
        ++checked;
    }
    CHECK(checked == 20);
}

TEST_CASE("gradient sums to zero (translation invariance)") {
    CounterRng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 3 + rng.below(15);
        const auto s = random_affinity(rng, n);
        const auto x = random_coords(rng, n, 2, 2.0);
        const auto g = gradient(x, s, compute_kernel(x));
        for (std::size_t c = 0; c < 2; ++c) {
            double sum = 0.0, mag = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                sum += g(i, c);
                mag += std::abs(g(i, c));
            }
            REQUIRE(std::abs(sum) <= 1e-12 * std::max(mag, 1.0));
        }
    }
}

TEST_CASE("gradient is zero when the cost vanishes") {
    RealMatrix x(2, 2, std::vector<double>{0.0, 0.0, 1.0, 1.0});
    AffinityMatrix s{RealMatrix(2, 2, std::vector<double>{0.0, 0.5, 0.5, 0.0})};
    const auto g = gradient(x, s, compute_kernel(x));
    for (double v : g.values()) CHECK(v == 0.0);
}

TEST_CASE("group lasso penalty") {
    RealMatrix x(2, 2, std::vector<double>{3.0, 0.0, 4.0, 0.0});
    const auto term = group_lasso_penalty(x, 0.5);
    CHECK(term.penalty == doctest::Approx(2.5));
    CHECK(term.subgradient(0, 0) == doctest::Approx(0.3));
    CHECK(term.subgradient(1, 0) == doctest::Approx(0.4));
    CHECK(term.subgradient(0, 1) == 0.0);
    CHECK(term.subgradient(1, 1) == 0.0);

    const auto off = group_lasso_penalty(x, 0.0);
    CHECK(off.penalty == 0.0);
    CHECK_THROWS_AS(group_lasso_penalty(x, -1.0), DomainError);

    CounterRng rng(17);
    const auto y = random_coords(rng, 6, 3, 1.0);
    const auto fd = oracle::finite_difference_gradient(
        y, [](const RealMatrix& z) { return group_lasso_penalty(z, 0.7).penalty; });
    const auto sub = group_lasso_penalty(y, 0.7).subgradient;
    for (std::size_t i = 0; i < sub.size(); ++i) {
        CHECK(sub.values()[i] == doctest::Approx(fd.values()[i]).epsilon(1e-6));
    }
}

TEST_CASE("fit configuration") {
    FitConfig cfg;
    CHECK(cfg.momentum_at(1) == 0.5);
    CHECK(cfg.momentum_at(249) == 0.5);
    CHECK(cfg.momentum_at(250) == 0.8);
    CHECK_NOTHROW(cfg.validate());

    auto bad = cfg;
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.momentum_final = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.exaggeration_iters = 600;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.embed_dim = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("initial embedding is deterministic per seed") {
    CHECK(initial_embedding(10, 2, 3) == initial_embedding(10, 2, 3));
    CHECK_FALSE(initial_embedding(10, 2, 3) == initial_embedding(10, 2, 4));
    CHECK(initial_embedding(10, 2, 3).rows() == 10);
}

TEST_CASE("one optimizer step follows the momentum update") {
    CounterRng rng(19);
    const auto s = random_affinity(rng, 6);
    FitConfig cfg;
    cfg.max_iters = 1;
    cfg.exaggeration_iters = 0;
    cfg.learning_rate = 7.0;
    const auto state = optimize(s, cfg);

    const auto x0 = initial_embedding(6, 2, cfg.seed);
    const auto g = gradient(x0, s, compute_kernel(x0));
    for (std::size_t i = 0; i < x0.size(); ++i) {
        CHECK(state.velocity.values()[i] == doctest::Approx(-7.0 * g.values()[i]).epsilon(1e-14));
        CHECK(state.coords.values()[i] == doctest::Approx(x0.values()[i] - 7.0 * g.values()[i]).epsilon(1e-14));
    }
    REQUIRE(state.cost_trace.size() == 1);
    CHECK(state.cost_trace[0].cost == doctest::Approx(hellinger_cost(s, compute_kernel(x0))).epsilon(1e-14));
}

TEST_CASE("two optimizer steps accumulate velocity") {
    CounterRng rng(23);
    const auto s = random_affinity(rng, 5);
    FitConfig cfg;
    cfg.max_iters = 2;
    cfg.exaggeration_iters = 0;
    cfg.learning_rate = 3.0;
    const auto state = optimize(s, cfg);

    auto x = initial_embedding(5, 2, cfg.seed);
    RealMatrix v(5, 2, 0.0);
    for (std::size_t k = 1; k <= 2; ++k) {
        const auto g = gradient(x, s, compute_kernel(x));
        for (std::size_t i = 0; i < x.size(); ++i) {
            v.values()[i] = cfg.momentum_at(k) * v.values()[i] - 3.0 * g.values()[i];
            x.values()[i] += v.values()[i];
        }
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(state.coords.values()[i] == doctest::Approx(x.values()[i]).epsilon(1e-13));
    }
}

TEST_CASE("fits are bit-identical for equal seeds") {
    CounterRng rng(29);
    const auto s = random_affinity(rng, 15);
    FitConfig cfg;
    cfg.max_iters = 150;
    const auto a = optimize(s, cfg);
    const auto b = optimize(s, cfg);
    CHECK(a.coords == b.coords);
    CHECK(a.cost_trace == b.cost_trace);
    cfg.seed = 43;
    CHECK_FALSE(optimize(s, cfg).coords == a.coords);
}

TEST_CASE("two identical samples embed with vanishing cost") {
    CountMatrix counts(Matrix<std::int64_t>(2, 3, std::vector<std::int64_t>{1, 2, 3, 1, 2, 3}));
    FitConfig cfg;
    const auto result = fit(counts, cfg);
    CHECK(result.affinity(0, 1) == 0.5);
    CHECK(result.state.cost_trace.back().cost < 1e-6);
}

TEST_CASE("the tolerance stops the run after exaggeration") {
    CountMatrix counts(Matrix<std::int64_t>(2, 3, std::vector<std::int64_t>{1, 2, 3, 1, 2, 3}));
    FitConfig cfg;
    cfg.exaggeration_iters = 10;
    const auto result = fit(counts, cfg);
    CHECK(result.state.converged);
    CHECK(result.state.iteration >= 12);
    CHECK(result.state.iteration < cfg.max_iters);
}

TEST_CASE("divergence is reported") {
    CounterRng rng(31);
    const auto s = random_affinity(rng, 10);
    FitConfig cfg;
    cfg.learning_rate = 1e300;
    CHECK_THROWS_AS(optimize(s, cfg), DivergenceError);
}
