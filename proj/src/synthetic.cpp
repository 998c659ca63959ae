#include "psne/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "psne/errors.hpp"
#include "psne/random.hpp"

namespace psne {

namespace {

constexpr double pi = std::numbers::pi;

struct Stimuli {
    std::vector<int> group;
    std::vector<double> t;
    std::vector<double> h;
};

template <typename Interval>
Stimuli draw_stimuli(const GeneratorConfig& config, Interval t_interval, double h_max) {
    CounterRng rng(config.seed, streams::stimulus);
    Stimuli s;
    for (std::size_t g = 0; g < config.n_groups; ++g) {
        const auto [lo, hi] = t_interval(static_cast<double>(g));
        for (std::size_t i = 0; i < config.n_per_group; ++i) {
            s.group.push_back(static_cast<int>(g));
            s.t.push_back(rng.uniform(lo, hi));
            s.h.push_back(rng.uniform(0.0, h_max));
        }
    }
    return s;
}

Matrix<std::int64_t> draw_counts(const RealMatrix& rates, std::uint64_t seed) {
    CounterRng rng(seed, streams::counts);
    Matrix<std::int64_t> counts(rates.rows(), rates.cols());
    for (std::size_t i = 0; i < rates.size(); ++i) {
        counts.values()[i] = rng.poisson(rates.values()[i]);
    }
    return counts;
}

}  // namespace

void GeneratorConfig::validate() const {
    if (!(lambda_bias > 0.0) || !(lambda_peak > 0.0) || !(rate_scale > 0.0)) {
        throw DomainError("generator rates and rate_scale must be positive");
    }
    if (n_groups < 1 || n_per_group < 1 || n_features < 1 || n_groups * n_per_group < 2) {
        throw std::invalid_argument("generator needs >= 2 samples and >= 1 feature");
    }
}

GeneratorConfig angular_defaults() {
    return GeneratorConfig{1.0, 8.0, 3, 20, 40, 42, 1.0};
}

GeneratorConfig sparse_sequential_defaults() {
    return GeneratorConfig{0.1, 2.5, 4, 30, 30, 42, 1.0};
}

double circular_distance(double a, double b) {
    const double d = std::abs(a - b);
    return std::min(d, 2.0 * pi - d);
}

LabeledDataset generate_angular(const GeneratorConfig& config) {
    config.validate();
    const Stimuli s = draw_stimuli(
        config,
        [](double g) {
            return std::pair{2.0 * pi * g / 3.0 + 1.5 * pi, 2.0 * pi * (g + 1.0) / 3.0 + 1.5 * pi};
        },
        10.0);

    const std::size_t n = s.t.size();
    const std::size_t m = config.n_features;
    const double bias = config.lambda_bias * config.rate_scale;
    const double peak = config.lambda_peak * config.rate_scale;

    RealMatrix rates(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < m; ++f) {
            const double t_pref = 1.5 * pi + 2.0 * pi * static_cast<double>(f % 20) / 20.0;
            const double h_pref = 10.0 * static_cast<double>(f / 20) / 2.0;
            // Both angles lie in [3pi/2, 7pi/2), so |difference| < 2pi.
            const double dt = circular_distance(s.t[i], t_pref);
            const double dh = std::abs(s.h[i] - h_pref);
            rates(i, f) = bias + peak * std::exp(-dt * dt / 2.0 - dh * dh / 20.0);
        }
    }

    CountMatrix counts(draw_counts(rates, config.seed));
    return LabeledDataset{"angular", config.seed, std::move(counts), std::move(rates), s.group, s.t, s.h, {}};
}

LabeledDataset generate_sparse_sequential(const GeneratorConfig& config) {
    config.validate();
    const Stimuli s = draw_stimuli(
        config, [](double g) { return std::pair{1.5 * g + 1.5, 1.5 * (g + 1.0) + 1.5}; }, 5.0);

    const std::size_t n = s.t.size();
    const std::size_t m = config.n_features;
    const double bias = config.lambda_bias * config.rate_scale;
    const double peak = config.lambda_peak * config.rate_scale;

    RealMatrix rates(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < m; ++f) {
            const double t_pref = 1.5 + 6.0 * static_cast<double>(f % 25) / 25.0;
            const double h_pref = 5.0 * static_cast<double>(f / 25) / 2.0;
            const double dt = s.t[i] - t_pref;
            const double dh = s.h[i] - h_pref;
            rates(i, f) = bias + peak * std::exp(-(dt * dt + dh * dh) / 3.0);
        }
    }
    const Matrix<std::int64_t> drawn = draw_counts(rates, config.seed);

    std::vector<std::size_t> kept;
    std::vector<std::size_t> removed;
    for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (auto c : drawn.row(i)) {
            any = any || c != 0;
        }
        (any ? kept : removed).push_back(i);
    }

    Matrix<std::int64_t> kept_counts(kept.size(), m);
    RealMatrix kept_rates(kept.size(), m);
    LabeledDataset out{"sparse-sequential", config.seed, CountMatrix(Matrix<std::int64_t>(2, 1)), {}, {}, {}, {}, removed};
    for (std::size_t r = 0; r < kept.size(); ++r) {
        const std::size_t i = kept[r];
        for (std::size_t f = 0; f < m; ++f) {
            kept_counts(r, f) = drawn(i, f);
            kept_rates(r, f) = rates(i, f);
        }
        out.group.push_back(s.group[i]);
        out.manifold_t.push_back(s.t[i]);
        out.manifold_h.push_back(s.h[i]);
    }
    out.counts = CountMatrix(std::move(kept_counts));
    out.rates = std::move(kept_rates);
    return out;
}

LabeledDataset rescale_rates(const LabeledDataset& data, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw DomainError("rescale_rates: scale must be positive");
    }
    LabeledDataset out = data;
    for (double& r : out.rates.values()) {
        r *= scale;
    }
    out.counts = CountMatrix(draw_counts(out.rates, data.seed));
    return out;
}

double zero_fraction(const CountMatrix& counts) {
    std::size_t zeros = 0;
    for (auto c : counts.values().values()) {
        zeros += c == 0 ? 1 : 0;
    }
    return static_cast<double>(zeros) / static_cast<double>(counts.values().size());
}

double expected_zero_fraction(const RealMatrix& rates, double scale) {
    double total = 0.0;
    for (double r : rates.values()) {
        total += std::exp(-scale * r);
    }
    return total / static_cast<double>(rates.size());
}

double solve_rate_scale(const RealMatrix& rates, double target_zero_fraction) {
    if (rates.empty()) {
        throw std::invalid_argument("solve_rate_scale: empty rate matrix");
    }
    if (!(target_zero_fraction > 0.0 && target_zero_fraction < 1.0)) {
        throw DomainError("solve_rate_scale: target must lie in (0, 1)");
    }
    // Expected zero fraction decreases monotonically in the scale.
    double lo = 1e-12;
    double hi = 1.0;
    while (expected_zero_fraction(rates, hi) > target_zero_fraction) {
        hi *= 2.0;
        if (hi > 1e12) {
            throw DomainError("solve_rate_scale: target not reachable");
        }
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = std::sqrt(lo * hi);
        (expected_zero_fraction(rates, mid) > target_zero_fraction ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

}  // namespace psne
