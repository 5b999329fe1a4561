#pragma once

#include <array>
#include <cstdint>

namespace aklab {

/// Counter-based RNG: Philox4x32-10 (Salmon et al., SC 2011).
///
/// Every draw is addressed by (seed, stream, level, index) with no hidden
/// state, so path generation is reproducible under any work partitioning.
/// `level` selects an independent sub-stream: bridge-refinement levels use
/// small integers, initial-condition and auxiliary variates use the
/// sentinels below.
struct Philox {
    static constexpr std::uint32_t kMulA = 0xD2511F53u;
    static constexpr std::uint32_t kMulB = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeylA = 0x9E3779B9u;
    static constexpr std::uint32_t kWeylB = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::uint64_t seed,
                                              std::uint64_t stream,
                                              std::uint32_t level,
                                              std::uint32_t index);
};

// Reserved levels. Bridge construction owns [0, 63].
inline constexpr std::uint32_t kLevelXi = 0xFFFFFFFFu;   // initial conditions
inline constexpr std::uint32_t kLevelAux = 0xFFFFFFFEu;  // auxiliary variates (eta, ...)

/// Uniform double in (0, 1), 53 random bits, never 0 or 1.
double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint32_t level,
                 std::uint32_t index);

/// Standard normal via the inverse CDF applied to uniform01.
double normal(std::uint64_t seed, std::uint64_t stream, std::uint32_t level,
              std::uint32_t index);

/// Inverse standard normal CDF (Wichura's AS 241, double precision).
double normal_quantile(double p);

/// Standard normal CDF and upper tail, accurate in the far tail.
double normal_cdf(double z);
double normal_tail(double z);

}  // namespace aklab
