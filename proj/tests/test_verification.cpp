#include <doctest.h>

#include <cmath>

#include "psne/errors.hpp"
#include "psne/verification.hpp"

using namespace psne;

TEST_CASE("series KL closed-form cases") {
    CHECK(oracle::kl_series(1.0, 2.0) == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-12));
    CHECK(oracle::kl_series(1.0, 2.0) == doctest::Approx(0.3068528194400547).epsilon(1e-12));
    CHECK(oracle::kl_series(5.0, 0.5) == doctest::Approx(7.01292546497023).epsilon(1e-12));
    CHECK(oracle::kl_series(3.0, 3.0) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("series KL truncation is self-consistent") {
    for (double l1 : {0.3, 4.0, 50.0}) {
        const double base = oracle::kl_series(l1, 2.5);
        oracle::OracleConfig longer;
        longer.series_cutoff = 2 * oracle::series_cutoff_for(l1);
        CHECK(oracle::kl_series(l1, 2.5, longer) == doctest::Approx(base).epsilon(1e-13));
    }
    CHECK(oracle::series_cutoff_for(1.0) == 200);
    CHECK(oracle::series_cutoff_for(100.0) >= 500);
}

TEST_CASE("series KL rejects non-positive rates") {
    CHECK_THROWS_AS(oracle::kl_series(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(oracle::kl_series(1.0, -1.0), DomainError);
}

TEST_CASE("finite differences") {
    RealMatrix x(2, 2, std::vector<double>{1.0, -2.0, 0.5, 3.0});
    const auto g = oracle::finite_difference_gradient(x, [](const RealMatrix& y) {
        double s = 0;
        for (double v : y.values()) s += v * v;
        return s;
    });
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(g.values()[i] == doctest::Approx(2.0 * x.values()[i]).epsilon(1e-9));
    }
    const auto flat = oracle::finite_difference_gradient(x, [](const RealMatrix&) { return 4.2; });
    for (double v : flat.values()) CHECK(v == 0.0);
}

TEST_CASE("naive joint and cost") {
    RealMatrix x(3, 1, std::vector<double>{0.0, 2.0, 3.0});
    const auto q = oracle::student_t_joint(x);
    CHECK(q(1, 2) == doctest::Approx(0.3125));
    CHECK(q(0, 2) == doctest::Approx(0.0625));
    CHECK(q(0, 0) == 0.0);
    CHECK(oracle::cost_entrywise(q, q) == 0.0);
    CHECK(oracle::embedding_cost(x, q) == 0.0);
}
