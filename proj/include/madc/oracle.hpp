#pragma once

#include <cstdint>
#include <vector>

#include "madc/bits.hpp"
#include "madc/errors.hpp"
#include "madc/rng.hpp"

namespace madc {

// Deterministic stand-in for the map phase: iv(q, n) is the beta-bit
// intermediate value of function q on file n. The protocol never sees file
// contents, only these values, so a keyed pseudo-random function is enough
// and lets every party regenerate any value it is entitled to.
class iv_oracle {
  public:
    iv_oracle(std::uint64_t seed, long long beta) : seed_(seed), beta_(beta) {
        if (beta < 1) throw param_error("iv_oracle: beta must be positive");
    }

    long long beta() const { return beta_; }

    bit_vector iv(int function, long long file) const {
        if (function < 1) throw param_error("iv_oracle: function index must be >= 1");
        if (file < 1) throw param_error("iv_oracle: file index must be >= 1");
        std::uint64_t state = derive_seed(seed_, 0x6976u /* "iv" */,
                                          static_cast<std::uint64_t>(function),
                                          static_cast<std::uint64_t>(file));
        std::vector<std::uint8_t> bytes(static_cast<std::size_t>((beta_ + 7) / 8));
        std::size_t i = 0;
        while (i < bytes.size()) {
            std::uint64_t word = splitmix64_next(state);
            for (int b = 7; b >= 0 && i < bytes.size(); --b)
                bytes[i++] = static_cast<std::uint8_t>(word >> (8 * b));
        }
        return bit_vector::from_bytes(std::move(bytes), static_cast<std::size_t>(beta_));
    }

  private:
    std::uint64_t seed_;
    long long beta_;
};

}  // namespace madc
