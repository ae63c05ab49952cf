#include "twinrecover/philox.hpp"

#include <cmath>
#include <numbers>

namespace twinrec {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      counter_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

Philox4x32::Block Philox4x32::block(Block c, std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

void Philox4x32::refill() {
    buffer_ = block(counter_, key_);
    used_ = 0;
    // 64-bit increment of the low half; the stream id in the high half never changes.
    if (++counter_[0] == 0) ++counter_[1];
}

Philox4x32::result_type Philox4x32::operator()() {
    if (used_ == 4) refill();
    return buffer_[used_++];
}

std::uint64_t Philox4x32::next_u64() {
    const std::uint64_t hi = (*this)();
    return (hi << 32) | (*this)();
}

double Philox4x32::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Philox4x32::uniform_positive() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

double Philox4x32::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_positive()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

}  // namespace twinrec
