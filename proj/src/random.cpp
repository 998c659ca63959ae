#include "psne/random.hpp"

#include <cmath>
#include <numbers>

#include "psne/errors.hpp"

namespace psne {

namespace {

constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix64(seed + golden_gamma) ^ mix64(stream * 0xD1B54A32D192ED03ULL + 1)) {}

std::uint64_t CounterRng::next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * golden_gamma);
}

double CounterRng::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
}

double CounterRng::normal() noexcept {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double CounterRng::student_t3() noexcept {
    const double z = normal();
    double chi2 = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double g = normal();
        chi2 += g * g;
    }
    return z / std::sqrt(chi2 / 3.0);
}

std::int64_t CounterRng::poisson(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("poisson rate must be finite and non-negative");
    }
    if (lambda > 700.0) {
        // exp(-lambda) underflows; none of the generators get near this.
        throw DomainError("poisson rate too large for the multiplication sampler");
    }
    const double limit = std::exp(-lambda);
    std::int64_t k = 0;
    double product = uniform();
    while (product > limit) {
        ++k;
        product *= uniform();
    }
    return k;
}

std::uint64_t CounterRng::below(std::uint64_t n) noexcept {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) {
            return r % n;
        }
    }
}

}  // namespace psne
