#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "madc/errors.hpp"
#include "madc/protocol.hpp"
#include "madc/rational.hpp"
#include "madc/rng.hpp"

namespace madc {

struct query_distribution {
    int functions = 0;
    std::map<std::vector<int>, rational> probabilities;
};

namespace detail {

inline std::vector<std::vector<int>> all_permutations(int n) {
    std::vector<int> p;
    for (int i = 1; i <= n; ++i) p.push_back(i);
    std::vector<std::vector<int>> out;
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

inline unsigned long long factorial(int n) {
    unsigned long long f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<unsigned>(i);
    return f;
}

}  // namespace detail

// Exact law of an announced query for one demand, by enumerating the sampler:
// the impersonated column is uniform on [1..Q] and the query is a uniform
// permutation pinned to the demand there.
inline query_distribution exact_query_distribution(int functions, int demand) {
    if (functions < 1) throw param_error("exact_query_distribution: Q must be positive");
    if (demand < 1 || demand > functions)
        throw param_error("exact_query_distribution: demand outside [1..Q]");
    rational weight(1, static_cast<long long>(functions) *
                           static_cast<long long>(detail::factorial(functions - 1)));
    query_distribution dist;
    dist.functions = functions;
    auto perms = detail::all_permutations(functions);
    for (int a = 1; a <= functions; ++a)
        for (const auto& p : perms)
            if (p[static_cast<std::size_t>(a - 1)] == demand) {
                auto it = dist.probabilities.find(p);
                if (it == dist.probabilities.end())
                    dist.probabilities.emplace(p, weight);
                else
                    it->second += weight;
            }
    return dist;
}

inline rational tv_distance(const query_distribution& p, const query_distribution& q) {
    if (p.functions != q.functions) throw param_error("tv_distance: mismatched supports");
    rational sum(0);
    for (const auto& [perm, mass] : p.probabilities) {
        auto it = q.probabilities.find(perm);
        sum += abs(mass - (it == q.probabilities.end() ? rational(0) : it->second));
    }
    for (const auto& [perm, mass] : q.probabilities)
        if (!p.probabilities.count(perm)) sum += abs(mass);
    return sum / rational(2);
}

struct independence_report {
    int functions = 0;
    int reducers = 0;
    long long pairs_checked = 0;  // demand pairs compared
    long long contexts = 0;       // observer contexts (d_k, a_k) the assertion covers
    rational max_tv;              // over all demand pairs
    rational uniform_gap;         // max deviation from 1/Q! across all demands
};

// Exact demand privacy: the announced-query law must be the uniform law on
// all Q! permutations, identically for every demand. The law is free of the
// observer's context (d_k, a_k) by construction, since the sampler sees only
// (Q, demand, column); the report records how many contexts that covers.
// Throws on any gap.
inline independence_report audit_independence(int functions, int reducers) {
    if (reducers < 2) throw param_error("audit_independence: need at least 2 reducers");
    independence_report rep;
    rep.functions = functions;
    rep.reducers = reducers;
    rep.contexts = static_cast<long long>(functions) * functions;
    rep.max_tv = rational(0);
    rep.uniform_gap = rational(0);
    rational uniform(1, static_cast<long long>(detail::factorial(functions)));
    long long support = static_cast<long long>(detail::factorial(functions));

    std::vector<query_distribution> dists;
    for (int d = 1; d <= functions; ++d) {
        dists.push_back(exact_query_distribution(functions, d));
        const query_distribution& dist = dists.back();
        if (static_cast<long long>(dist.probabilities.size()) != support)
            throw privacy_violation("demand " + std::to_string(d) + ": support has " +
                                    std::to_string(dist.probabilities.size()) +
                                    " permutations, expected " + std::to_string(support));
        for (const auto& [perm, mass] : dist.probabilities) {
            rational gap = abs(mass - uniform);
            if (gap > rep.uniform_gap) rep.uniform_gap = gap;
        }
    }
    for (std::size_t i = 0; i < dists.size(); ++i)
        for (std::size_t j = i + 1; j < dists.size(); ++j) {
            rational tv = tv_distance(dists[i], dists[j]);
            if (tv > rep.max_tv) rep.max_tv = tv;
            ++rep.pairs_checked;
            if (!tv.is_zero())
                throw privacy_violation(static_cast<int>(i) + 1, static_cast<int>(j) + 1,
                                        tv.str());
        }
    if (!rep.uniform_gap.is_zero())
        throw privacy_violation("query law deviates from uniform by " + rep.uniform_gap.str());
    return rep;
}

// Two reducers draw independently, so their joint law must factor into the
// marginals. Returns the largest absolute gap (exactly 0 when it factors).
inline rational joint_factorization_gap(int functions, int demand1, int demand2) {
    query_distribution m1 = exact_query_distribution(functions, demand1);
    query_distribution m2 = exact_query_distribution(functions, demand2);
    rational weight(1, static_cast<long long>(functions) * functions *
                           static_cast<long long>(detail::factorial(functions - 1)) *
                           static_cast<long long>(detail::factorial(functions - 1)));
    std::map<std::pair<std::vector<int>, std::vector<int>>, rational> joint;
    auto perms = detail::all_permutations(functions);
    for (int a1 = 1; a1 <= functions; ++a1)
        for (const auto& p1 : perms) {
            if (p1[static_cast<std::size_t>(a1 - 1)] != demand1) continue;
            for (int a2 = 1; a2 <= functions; ++a2)
                for (const auto& p2 : perms) {
                    if (p2[static_cast<std::size_t>(a2 - 1)] != demand2) continue;
                    auto key = std::make_pair(p1, p2);
                    auto it = joint.find(key);
                    if (it == joint.end())
                        joint.emplace(key, weight);
                    else
                        it->second += weight;
                }
        }
    rational gap(0);
    for (const auto& [key, mass] : joint) {
        rational product = m1.probabilities.at(key.first) * m2.probabilities.at(key.second);
        rational g = abs(mass - product);
        if (g > gap) gap = g;
    }
    return gap;
}

// Lehmer rank: 0-based index of `perm` in lexicographic order of all
// permutations of [1..n].
inline long long permutation_rank(const std::vector<int>& perm) {
    int n = static_cast<int>(perm.size());
    long long rank = 0;
    for (int i = 0; i < n; ++i) {
        long long smaller = 0;
        for (int j = i + 1; j < n; ++j)
            if (perm[static_cast<std::size_t>(j)] < perm[static_cast<std::size_t>(i)]) ++smaller;
        rank += smaller * static_cast<long long>(detail::factorial(n - 1 - i));
    }
    return rank;
}

inline double chi_square_stat(const std::vector<long long>& counts, long long trials) {
    double expected = static_cast<double>(trials) / static_cast<double>(counts.size());
    double stat = 0.0;
    for (long long c : counts) {
        double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

// Chi-square statistic of `trials` draws from an arbitrary permutation
// sampler against the uniform law on Q! cells. The sampler is injectable so
// tests can feed a broken one as a negative control.
template <class Sampler>
double empirical_query_check_with(int functions, long long trials, Sampler&& draw) {
    if (functions < 1 || functions > 8)
        throw param_error("empirical_query_check: Q must lie in [1..8]");
    if (trials < 1) throw param_error("empirical_query_check: trials must be positive");
    std::vector<long long> counts(detail::factorial(functions), 0);
    for (long long i = 0; i < trials; ++i) {
        std::vector<int> perm = draw();
        ++counts[static_cast<std::size_t>(permutation_rank(perm))];
    }
    return chi_square_stat(counts, trials);
}

// Draws through the protocol's own sampler: uniform column, pinned query.
inline double empirical_query_check(int functions, int demand, long long trials,
                                    std::uint64_t seed) {
    rng r(derive_seed(seed, 0x71636865636bull /* "qcheck" */));
    return empirical_query_check_with(functions, trials, [&] {
        int a = static_cast<int>(r.uniform_int(1, functions));
        return generate_query(functions, demand, a, r);
    });
}

// 99.9% chi-square quantiles for Q!-1 degrees of freedom, Q = 2..7.
inline double chi_square_threshold_999(int functions) {
    switch (functions) {
        case 2: return 10.827566;    // dof 1
        case 3: return 20.515006;    // dof 5
        case 4: return 49.728232;    // dof 23
        case 5: return 172.417682;   // dof 119
        case 6: return 841.905220;   // dof 719
        case 7: return 5354.934176;  // dof 5039
        default:
            throw param_error("chi_square_threshold_999: no stored quantile for Q = " +
                              std::to_string(functions));
    }
}

}  // namespace madc
