#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace twinrec {

/// Counter-based Philox4x32-10 generator. The 64-bit seed is the key and the
/// stream id fills the upper half of the 128-bit counter, so (seed, stream)
/// pairs give independent reproducible sequences on every platform.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t seed = 0, std::uint64_t stream = 0);

    /// The raw bijection: ten rounds applied to one counter block.
    static Block block(Block counter, std::array<std::uint32_t, 2> key);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    std::uint64_t next_u64();
    /// [0, 1) with 53 random bits.
    double uniform();
    /// (0, 1], safe for logarithms.
    double uniform_positive();
    /// Standard normal by Box-Muller; the second value of each pair is cached.
    double normal();
    bool bernoulli(double p) { return uniform() < p; }

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    Block counter_;
    Block buffer_{};
    unsigned used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0;
};

}  // namespace twinrec
