#ifndef PSNE_RANDOM_HPP
#define PSNE_RANDOM_HPP

#include <cstdint>

namespace psne {

/**
 * Counter-based random stream.
 *
 * The n-th output of a stream is the SplitMix64 finalizer applied to
 * `key + (n + 1) * 0x9E3779B97F4A7C15`, where the key is derived from a
 * (seed, stream id) pair. Every draw is therefore a pure function of
 * (seed, stream, counter), independent of the platform's <random>
 * implementation, so all builds produce the same numbers.
 *
 * Derived distributions are implemented here rather than with the standard
 * library distributions, whose algorithms are implementation-defined:
 *  - uniform(): top 53 bits scaled into [0, 1)
 *  - normal(): Box-Muller (cosine branch only; two uniforms per draw)
 *  - student_t(nu = 3): normal / sqrt(chi_square(3) / 3), with the
 *    chi-square built from three squared normals
 *  - poisson(): Knuth's multiplication method, exact for the small rates
 *    used by the synthetic generators
 */
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

    std::uint64_t next_u64() noexcept;
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept;
    double normal() noexcept;
    double student_t3() noexcept;
    std::int64_t poisson(double lambda);

    /// Uniform integer in [0, n). Uses rejection to avoid modulo bias.
    std::uint64_t below(std::uint64_t n) noexcept;

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Stream identifiers shared by the generators so that draws never overlap.
namespace streams {
inline constexpr std::uint64_t embedding_init = 1;
inline constexpr std::uint64_t stimulus = 2;
inline constexpr std::uint64_t counts = 3;
inline constexpr std::uint64_t kmeans = 4;
inline constexpr std::uint64_t permutation = 5;
}  // namespace streams

}  // namespace psne

#endif
