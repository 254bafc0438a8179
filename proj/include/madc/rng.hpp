#pragma once

#include <cstdint>
#include <vector>

#include "madc/errors.hpp"

namespace madc {

// splitmix64 step (Vigna). Chosen over std::mt19937_64 + distributions because
// the output stream is fully pinned by this header: reports and transcripts must
// be reproducible byte for byte across compilers and standard libraries.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Stateless mix of a seed with a stream of tags; used to give every trial,
// sweep point and oracle query its own independent stream.
inline std::uint64_t derive_seed(std::uint64_t seed) { return seed; }

template <class... Rest>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, Rest... rest) {
    std::uint64_t s = seed ^ (tag + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
    std::uint64_t z = s;
    splitmix64_next(z);
    return derive_seed(splitmix64_next(z), static_cast<std::uint64_t>(rest)...);
}

class rng {
  public:
    explicit rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // Uniform on [0, n). Rejection sampling keeps the draw exactly uniform.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw param_error("rng::below: n must be positive");
        std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform on [lo, hi], inclusive.
    long long uniform_int(long long lo, long long hi) {
        if (lo > hi) throw param_error("rng::uniform_int: empty range");
        return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    // Fisher-Yates; every permutation equally likely.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::uint64_t state_;
};

}  // namespace madc
