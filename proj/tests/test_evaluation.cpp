#include <doctest.h>

#include <cmath>
#include <map>

#include "psne/errors.hpp"
#include "psne/evaluation.hpp"
#include "psne/random.hpp"

using namespace psne;

namespace {

// Pair-counting form of the adjusted Rand index.
double ari_pairs(const std::vector<int>& x, const std::vector<int>& y) {
    double a = 0, b = 0, c = 0, d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const bool sx = x[i] == x[j], sy = y[i] == y[j];
            if (sx && sy) a += 1;
            else if (sx) b += 1;
            else if (sy) c += 1;
            else d += 1;
        }
    }
    const double denom = (a + b) * (b + d) + (a + c) * (c + d);
    return 2.0 * (a * d - b * c) / denom;
}

double rank_of(const std::vector<double>& v, std::size_t i) {
    double less = 0, equal = 0;
    for (double w : v) {
        if (w < v[i]) less += 1;
        else if (w == v[i]) equal += 1;
    }
    return less + (equal + 1.0) / 2.0;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

double silhouette_naive(const RealMatrix& x, const std::vector<int>& labels) {
    const std::size_t n = x.rows();
    auto dist = [&](std::size_t i, std::size_t j) {
        double s = 0;
        for (std::size_t c = 0; c < x.cols(); ++c) s += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
        return std::sqrt(s);
    };
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::map<int, std::pair<double, int>> by;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            by[labels[j]].first += dist(i, j);
            by[labels[j]].second += 1;
        }
        if (by[labels[i]].second == 0) continue;
        const double a = by[labels[i]].first / by[labels[i]].second;
        double b = INFINITY;
        for (auto& [l, v] : by) {
            if (l != labels[i] && v.second > 0) b = std::min(b, v.first / v.second);
        }
        if (std::max(a, b) > 0) total += (b - a) / std::max(a, b);
    }
    return total / static_cast<double>(n);
}

RealMatrix blobs(CounterRng& rng, std::vector<int>& labels, std::size_t per, double spread) {
    const double centers[3][2] = {{0, 0}, {10, 0}, {0, 10}};
    RealMatrix x(3 * per, 2);
    labels.clear();
    for (std::size_t g = 0; g < 3; ++g) {
        for (std::size_t i = 0; i < per; ++i) {
            x(g * per + i, 0) = centers[g][0] + spread * rng.normal();
            x(g * per + i, 1) = centers[g][1] + spread * rng.normal();
            labels.push_back(static_cast<int>(g));
        }
    }
    return x;
}

RealMatrix rotate(const RealMatrix& x, double angle) {
    RealMatrix y(x.rows(), 2);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        y(i, 0) = std::cos(angle) * x(i, 0) - std::sin(angle) * x(i, 1) + 3.0;
        y(i, 1) = std::sin(angle) * x(i, 0) + std::cos(angle) * x(i, 1) - 1.0;
    }
    return y;
}

}  // namespace

TEST_CASE("knn accuracy on a hand-checked layout") {
    RealMatrix x(4, 1, std::vector<double>{0.0, 1.0, 2.0, 5.0});
    const std::vector<int> labels{0, 0, 1, 1};
    CHECK(knn_accuracy(x, labels, 2) == 0.75);
    CHECK(knn_accuracy(x, labels, 1) == 0.75);
}

TEST_CASE("knn accuracy on separated groups and errors") {
    RealMatrix x(6, 1, std::vector<double>{0, 1, 2, 10, 11, 12});
    const std::vector<int> labels{0, 0, 0, 1, 1, 1};
    CHECK(knn_accuracy(x, labels, 2) == 1.0);
    const std::vector<int> one{0, 0, 0, 0, 0, 0};
    CHECK_THROWS_AS(knn_accuracy(x, one, 2), DegenerateInputError);
    CHECK_THROWS_AS(knn_accuracy(x, labels, 6), DomainError);
    const std::vector<int> short_labels{0, 1};
    CHECK_THROWS_AS(knn_accuracy(x, short_labels, 1), std::invalid_argument);
}

TEST_CASE("adjusted rand index") {
    const std::vector<int> a{0, 0, 1, 1}, b{0, 0, 1, 2};
    CHECK(adjusted_rand_index(a, b) == doctest::Approx(0.5714285714285715).epsilon(1e-14));
    const std::vector<int> c{5, 5, 9, 9};
    CHECK(adjusted_rand_index(a, c) == 1.0);
    const std::vector<int> all_one{0, 0, 0, 0};
    CHECK(adjusted_rand_index(all_one, all_one) == 1.0);
    const std::vector<int> singletons{0, 1, 2, 3};
    CHECK(adjusted_rand_index(all_one, singletons) == 0.0);
    CHECK(adjusted_rand_index(singletons, singletons) == 1.0);
    CHECK_THROWS(adjusted_rand_index(a, std::vector<int>{0, 1}));

    CounterRng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 5 + rng.below(40);
        std::vector<int> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<int>(rng.below(4));
            y[i] = static_cast<int>(rng.below(3));
        }
        const double expected = ari_pairs(x, y);
        if (!std::isfinite(expected)) continue;
        REQUIRE(adjusted_rand_index(x, y) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("k-means recovers separated blobs") {
    CounterRng rng(5);
    std::vector<int> labels;
    const auto x = blobs(rng, labels, 20, 0.5);
    const auto km = kmeans(x, 3, 42);
    CHECK(km.assignment.size() == 60);
    CHECK(km.centers.rows() == 3);
    CHECK(adjusted_rand_index(km.assignment, labels) == 1.0);
    CHECK(kmeans_ari(x, labels, 3) == 1.0);
    CHECK(kmeans(x, 3, 42).assignment == km.assignment);
    CHECK_THROWS_AS(kmeans(x, 0, 1), DomainError);
    CHECK_THROWS_AS(kmeans(RealMatrix(2, 2, 0.0), 3, 1), DomainError);
}

TEST_CASE("average ranks") {
    const std::vector<double> v{3.0, 1.0, 3.0, 2.0, 3.0};
    const auto r = average_ranks(v);
    const std::vector<double> expected{4.0, 1.0, 4.0, 2.0, 4.0};
    CHECK(r == expected);
}

TEST_CASE("spearman against a brute-force oracle") {
    CounterRng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 3 + rng.below(30);
        RealMatrix x(n, 2);
        std::vector<double> t(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = static_cast<double>(rng.below(6));
            x(i, 0) = static_cast<double>(rng.below(5));
            x(i, 1) = rng.normal();
        }
        std::vector<double> col0(n), col1(n), rt(n), r0(n), r1(n);
        for (std::size_t i = 0; i < n; ++i) {
            col0[i] = x(i, 0);
            col1[i] = x(i, 1);
        }
        for (std::size_t i = 0; i < n; ++i) {
            rt[i] = rank_of(t, i);
            r0[i] = rank_of(col0, i);
            r1[i] = rank_of(col1, i);
        }
        double expected = 0.0;
        for (const auto* r : {&r0, &r1}) {
            const double p = pearson(*r, rt);
            if (std::isfinite(p)) expected = std::max(expected, std::abs(p));
        }
        REQUIRE(spearman_abs(x, t) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("spearman examples and errors") {
    RealMatrix x(4, 2, std::vector<double>{1, 7, 2, 7, 3, 7, 4, 7});
    const std::vector<double> t{10, 20, 30, 40}, rev{4, 3, 2, 1};
    CHECK(spearman_abs(x, t) == doctest::Approx(1.0));
    CHECK(spearman_abs(x, rev) == doctest::Approx(1.0));
    CHECK_THROWS(spearman_abs(x, std::vector<double>{1, 2}));
    CHECK_THROWS_AS(spearman_abs(RealMatrix(2, 2, 0.0), std::vector<double>{1, 2}), DomainError);
}

TEST_CASE("silhouette") {
    RealMatrix x(4, 1, std::vector<double>{0, 1, 10, 11});
    const std::vector<int> labels{0, 0, 1, 1};
    const double expected = (2.0 * (1.0 - 1.0 / 10.5) + 2.0 * (1.0 - 1.0 / 9.5)) / 4.0;
    CHECK(silhouette(x, labels) == doctest::Approx(expected).epsilon(1e-14));

    RealMatrix y(3, 1, std::vector<double>{0, 1, 5});
    const std::vector<int> with_singleton{0, 0, 1};
    CHECK(silhouette(y, with_singleton) == doctest::Approx(silhouette_naive(y, with_singleton)));

    CHECK_THROWS_AS(silhouette(x, std::vector<int>{1, 1, 1, 1}), DegenerateInputError);

    CounterRng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<int> l;
        const auto z = blobs(rng, l, 3 + rng.below(8), 4.0);
        const double s = silhouette(z, l);
        REQUIRE(s >= -1.0);
        REQUIRE(s <= 1.0);
        REQUIRE(s == doctest::Approx(silhouette_naive(z, l)).epsilon(1e-12));
    }
}

TEST_CASE("metrics are invariant to rotation and translation") {
    CounterRng rng(11);
    std::vector<int> labels;
    const auto x = blobs(rng, labels, 15, 3.0);
    const auto y = rotate(x, 0.7);
    CHECK(knn_accuracy(x, labels) == knn_accuracy(y, labels));
    CHECK(silhouette(x, labels) == doctest::Approx(silhouette(y, labels)).epsilon(1e-12));
    CHECK(kmeans_ari(x, labels, 3) == doctest::Approx(kmeans_ari(y, labels, 3)));
}

TEST_CASE("evaluate fills only the metrics it has inputs for") {
    CounterRng rng(13);
    std::vector<int> labels;
    const auto x = blobs(rng, labels, 10, 0.5);
    std::vector<double> t(30);
    for (std::size_t i = 0; i < 30; ++i) t[i] = x(i, 0);

    const auto none = evaluate(x, nullptr, nullptr);
    CHECK(none.method == "p-SNE");
    CHECK_FALSE(none.knn_accuracy);
    CHECK_FALSE(none.spearman_abs);

    const auto full = evaluate(x, &labels, &t);
    REQUIRE(full.knn_accuracy);
    REQUIRE(full.kmeans_ari);
    REQUIRE(full.silhouette);
    REQUIRE(full.spearman_abs);
    CHECK(*full.knn_accuracy == 1.0);
    CHECK(*full.kmeans_ari == 1.0);
    CHECK(*full.spearman_abs == doctest::Approx(1.0));

    const auto only_t = evaluate(x, nullptr, &t);
    CHECK_FALSE(only_t.kmeans_ari);
    CHECK(only_t.spearman_abs);
}
