#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace motifcrf {

/// Counter-based generator (Philox4x64-10, Salmon et al. 2011).
///
/// A stream is addressed by (seed, stream): seed is the user-level seed,
/// stream separates independent uses (permutation replicate, segment
/// sampler, ...). Streams never overlap and draws depend only on the
/// (seed, stream, draw index) triple, so replicates can run in any order
/// or in parallel and still reproduce bit-exactly.
///
/// Scheme identifier recorded in artifacts: "philox4x64-10".
class Rng {
public:
    static constexpr const char* kSchemeId = "philox4x64-10";

    Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();

    /// Uniform on the open interval (0,1).
    double uniform01();

    /// Standard normal via the inverse-CDF map (deterministic, no state
    /// beyond the counter).
    double normal();

    /// Uniform integer in [0, n). n must be >= 1.
    std::uint64_t bounded(std::uint64_t n);

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Raw block function, exposed for known-answer tests.
    static std::array<std::uint64_t, 4> block(const std::array<std::uint64_t, 4>& counter,
                                              const std::array<std::uint64_t, 2>& key);

private:
    void refill();

    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 4> counter_;
    std::array<std::uint64_t, 4> buf_;
    int buf_pos_;
};

}  // namespace motifcrf
