#pragma once

#include <cstdint>

namespace slashsim {

/// SplitMix64: the published 64-bit mixer, chosen because reports must
/// reproduce bit-for-bit across platforms. Sequential use gives a stream;
/// mix64 hashes keys (seed, epoch, validator) into independent draws so the
/// duty model does not depend on iteration order.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, bound). bound must be nonzero. Plain modulo: the tiny
    /// bias is irrelevant here, determinism is what matters.
    std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

private:
    std::uint64_t state_;
};

/// One-shot stateless mix of up to three keys.
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    SplitMix64 g(a * 0x9e3779b97f4a7c15ULL ^ b);
    const std::uint64_t first = g.next();
    SplitMix64 h(first ^ c);
    return h.next();
}

}  // namespace slashsim
