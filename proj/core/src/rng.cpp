#include "motifcrf/rng.hpp"

#include "motifcrf/stats.hpp"

namespace motifcrf {

namespace {

constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kM1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73Bull;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

}  // namespace

std::array<std::uint64_t, 4> Rng::block(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key) {
    std::array<std::uint64_t, 4> c = counter;
    std::array<std::uint64_t, 2> k = key;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, c[0], hi0, lo0);
        mulhilo(kM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kW0;
        k[1] += kW1;
    }
    return c;
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : key_{seed, stream}, counter_{0, 0, 0, 0}, buf_pos_(4) {}

void Rng::refill() {
    buf_ = block(counter_, key_);
    buf_pos_ = 0;
    // 256-bit little-endian counter increment
    if (++counter_[0] == 0)
        if (++counter_[1] == 0)
            if (++counter_[2] == 0) ++counter_[3];
}

std::uint64_t Rng::next_u64() {
    if (buf_pos_ == 4) refill();
    return buf_[buf_pos_++];
}

double Rng::uniform01() {
    // 53-bit mantissa, centered to stay strictly inside (0,1)
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() { return stats::normal_quantile(uniform01()); }

std::uint64_t Rng::bounded(std::uint64_t n) {
    // multiply-shift; bias is O(n / 2^64), negligible for the sizes used here
    unsigned __int128 p = static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint64_t>(p >> 64);
}

}  // namespace motifcrf
