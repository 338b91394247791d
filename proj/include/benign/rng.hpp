#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace benign {

/// SplitMix64 finalizer. Bijective 64-bit mixer used both as the generator
/// step and for deriving per-site seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// FNV-1a hash of a purpose tag, so call sites can name their stream.
constexpr std::uint64_t tag_hash(std::string_view tag) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Derives a child seed from a base seed, a purpose tag and cell indices.
///
/// seed = mix(... mix(mix(base ^ hash(tag)) + i0) ... + ik). The result depends
/// only on its arguments, so parallel cells get reproducible, independent
/// streams regardless of scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                    std::initializer_list<std::uint64_t> indices = {}) noexcept {
    std::uint64_t s = mix64(base ^ tag_hash(tag));
    for (std::uint64_t i : indices) {
        s = mix64(s + 0x9e3779b97f4a7c15ULL * (i + 1));
    }
    return s;
}

/// Counter-based SplitMix64 generator (UniformRandomBitGenerator).
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

private:
    std::uint64_t state_;
};

}  // namespace benign
