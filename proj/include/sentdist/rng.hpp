#pragma once

// Deterministic RNG primitives. Hand-rolled so that sequences are identical
// across platforms and standard libraries; bit-exact reproducibility from a
// seed is part of the training contract.

#include <cstdint>
#include <vector>

namespace sentdist {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound). Lemire multiply-shift; bound = 0 is a caller bug.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

// Stir two seeds into one. Used to derive per-epoch / per-worker streams.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    SplitMix64 g(a ^ (b * 0x9e3779b97f4a7c15ULL + 0x165667b19e3779f9ULL));
    return g.next();
}

// Fisher-Yates, descending. Same permutation for the same generator state
// on every platform.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, SplitMix64& g) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(g.next_below(i));
        using std::swap;
        swap(v[i - 1], v[j]);
    }
}

}  // namespace sentdist
