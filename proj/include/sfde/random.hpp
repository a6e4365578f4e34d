#pragma once

#include <cstdint>
#include <random>

namespace sfde {

/// Recorded in output metadata so runs can be reproduced elsewhere.
inline constexpr const char* kRngDescription = "mt19937_64, substream seed = splitmix64 mix of (seed, index)";
inline constexpr const char* kGaussianTransform = "box-muller (cos branch then sin branch)";

/// Substream seed for item `index` of a run seeded with `seed`.
/// Pure function, so results do not depend on which worker draws which index.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index);

/// Standard normal variates from a fixed engine and a fixed transform, so the
/// sequence is bit-identical across standard libraries.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t stream_seed) : engine_(stream_seed) {}

    /// Uniform in the open interval (0, 1) with 53 random bits.
    double uniform();
    double next();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace sfde
