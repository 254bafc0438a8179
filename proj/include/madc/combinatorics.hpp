#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "madc/errors.hpp"

namespace madc {

// n choose k, exact. The running product after step i is C(n-k+i, i), an
// integer, so the division below is always exact.
inline unsigned long long binomial(int n, int k) {
    if (n < 0 || k < 0) throw param_error("binomial: negative argument");
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (result > UINT64_MAX) throw overflow_error("binomial(" + std::to_string(n) + "," +
                                                      std::to_string(k) + ") overflows 64 bits");
    }
    return static_cast<unsigned long long>(result);
}

// First k-subset of [1..n] in lexicographic order: {1, 2, ..., k}.
inline std::vector<int> first_k_subset(int k) {
    std::vector<int> s(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) s[static_cast<std::size_t>(i)] = i + 1;
    return s;
}

// Advances a sorted k-subset of [1..n] to its lexicographic successor.
// Returns false (leaving s at the last subset) when none remains.
inline bool next_k_subset(std::vector<int>& s, int n) {
    int k = static_cast<int>(s.size());
    for (int i = k - 1; i >= 0; --i) {
        if (s[static_cast<std::size_t>(i)] < n - (k - 1 - i)) {
            ++s[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k; ++j)
                s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
            return true;
        }
    }
    return false;
}

namespace detail {

inline void check_subset(const std::vector<int>& subset, int ground, const char* who) {
    if (ground < 0) throw param_error(std::string(who) + ": negative ground set size");
    int prev = 0;
    for (int v : subset) {
        if (v < 1 || v > ground)
            throw out_of_range_error(std::string(who) + ": element " + std::to_string(v) +
                                     " outside [1.." + std::to_string(ground) + "]");
        if (v <= prev)
            throw param_error(std::string(who) + ": subset must be strictly increasing");
        prev = v;
    }
}

}  // namespace detail

// 1-based position of a sorted subset among all |subset|-subsets of [1..ground]
// in lexicographic order.
inline long long lex_rank(const std::vector<int>& subset, int ground) {
    detail::check_subset(subset, ground, "lex_rank");
    int t = static_cast<int>(subset.size());
    unsigned long long rank = 0;
    int prev = 0;
    for (int i = 0; i < t; ++i) {
        for (int v = prev + 1; v < subset[static_cast<std::size_t>(i)]; ++v)
            rank += binomial(ground - v, t - 1 - i);
        prev = subset[static_cast<std::size_t>(i)];
    }
    return static_cast<long long>(rank) + 1;
}

// Inverse of lex_rank.
inline std::vector<int> lex_unrank(long long rank, int ground, int size) {
    if (size < 0 || size > ground)
        throw param_error("lex_unrank: size must lie in [0..ground]");
    long long total = static_cast<long long>(binomial(ground, size));
    if (rank < 1 || rank > total)
        throw out_of_range_error("lex_unrank: rank " + std::to_string(rank) + " outside [1.." +
                                 std::to_string(total) + "]");
    std::vector<int> s;
    s.reserve(static_cast<std::size_t>(size));
    long long r = rank - 1;
    int prev = 0;
    for (int i = 0; i < size; ++i) {
        for (int v = prev + 1;; ++v) {
            long long c = static_cast<long long>(binomial(ground - v, size - 1 - i));
            if (r < c) {
                s.push_back(v);
                prev = v;
                break;
            }
            r -= c;
        }
    }
    return s;
}

// Wraps any integer into [1..b]: ..., b-1, b, 1, 2, ... Full modular wrap, so
// arguments far outside (0, 2b] are fine too.
inline int cyclic_index(long long a, int b) {
    if (b < 1) throw param_error("cyclic_index: modulus must be positive");
    long long r = (a - 1) % b;
    if (r < 0) r += b;
    return static_cast<int>(r) + 1;
}

// The c+1 wrapped values a, a+1, ..., a+c. c < 0 yields an empty interval.
inline std::vector<int> cyclic_interval(long long a, long long c, int b) {
    std::vector<int> out;
    if (c < 0) return out;
    out.reserve(static_cast<std::size_t>(c) + 1);
    for (long long i = 0; i <= c; ++i) out.push_back(cyclic_index(a + i, b));
    return out;
}

}  // namespace madc
