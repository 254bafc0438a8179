#pragma once

#include <string>
#include <vector>

#include "madc/combinatorics.hpp"
#include "madc/errors.hpp"
#include "madc/pda.hpp"

namespace madc {

// C(F, alpha) x F array whose rows are the alpha-subsets of [1..F] in
// lexicographic order. Row T has stars exactly in the columns d in T; the
// other cells hold the lexicographic rank of T u {d} among (alpha+1)-subsets.
// Profile: K = F, F' = C(F, alpha), Z = C(F-1, alpha-1), S = C(F, alpha+1),
// every label appearing alpha+1 times.
inline pda_array man_pda(int f, int alpha) {
    if (f < 2) throw param_error("man_pda: F must be at least 2");
    if (alpha < 1 || alpha > f - 1) throw param_error("man_pda: alpha must lie in [1..F-1]");
    unsigned long long rows = binomial(f, alpha);
    pda_array a(static_cast<int>(rows), f);
    std::vector<int> subset = first_k_subset(alpha);
    int row = 1;
    std::vector<int> merged(static_cast<std::size_t>(alpha) + 1);
    do {
        for (int d = 1; d <= f; ++d) {
            bool member = false;
            for (int v : subset)
                if (v == d) {
                    member = true;
                    break;
                }
            if (member) continue;  // cells on the subset stay stars
            std::size_t out = 0, in = 0;
            while (in < subset.size() && subset[in] < d) merged[out++] = subset[in++];
            merged[out++] = d;
            while (in < subset.size()) merged[out++] = subset[in++];
            a.set(row, d, pda_entry::label(static_cast<int>(lex_rank(merged, f))));
        }
        ++row;
    } while (next_k_subset(subset, f));
    return a;
}

// Q x Q array with alpha stars per column arranged in one cyclic run that
// shifts down by one per column, and with Q(Q-alpha)/2 labels, each twice.
//
// Build steps, on a Q x Q all-star grid P:
//   1. rows alpha+1 .. m, m = (Q+alpha)/2, are filled row-wise with
//      1, 2, ..., Q(Q-alpha)/2;
//   2. for j = 1 .. m-alpha, row m+j receives row m-j+1 rotated right by m-j;
//   3. finally column c of the result is column c of P rotated down by c-1.
// Step 3 reads every cell from P, not from the partially shifted array.
inline pda_array cyclic_pda(int q, int alpha) {
    if (q < 1) throw param_error("cyclic_pda: Q must be positive");
    if (alpha < 1) throw param_error("cyclic_pda: alpha must be positive");
    if (2 * alpha >= q) throw param_error("cyclic_pda: alpha < Q/2 violated");
    if ((q + alpha) % 2 != 0) throw param_error("cyclic_pda: Q + alpha must be even");

    int m = (q + alpha) / 2;
    pda_array p(q, q);
    for (int r = alpha + 1; r <= m; ++r)
        for (int c = 1; c <= q; ++c)
            p.set(r, c, pda_entry::label((r - alpha - 1) * q + c));
    for (int j = 1; j <= m - alpha; ++j)
        for (int c = 1; c <= q; ++c)
            p.set(m + j, cyclic_index(c + (m - j), q), p.at(m - j + 1, c));

    pda_array a(q, q);
    for (int c = 1; c <= q; ++c)
        for (int r = 1; r <= q; ++r)
            a.set(cyclic_index(r + c - 1, q), c, p.at(r, c));
    return a;
}

// K x K block array: copies of `base` on the diagonal, all-star blocks
// elsewhere. Labels are unchanged, so each appears K times as often.
// Profile: (K Q_b, K F_b, (K-1) F_b + Z_b, S_b).
inline pda_array extend_pda(const pda_array& base, int k) {
    if (k < 2) throw param_error("extend_pda: K must be at least 2");
    pda_params bp = verify_pda(base);
    pda_array out(k * bp.f, k * bp.k);
    for (int block = 0; block < k; ++block)
        for (int f = 1; f <= bp.f; ++f)
            for (int c = 1; c <= bp.k; ++c)
                out.set(block * bp.f + f, block * bp.k + c, base.at(f, c));
    return out;
}

// Extension of the transposed subset array: blocks are F x C(F, alpha).
inline pda_array construction1(int f, int alpha, int k) {
    return extend_pda(transpose(man_pda(f, alpha)), k);
}

// Extension of the cyclic array: blocks are Q x Q.
inline pda_array construction2(int q, int alpha, int k) {
    return extend_pda(cyclic_pda(q, alpha), k);
}

}  // namespace madc
