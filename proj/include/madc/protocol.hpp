#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "madc/bits.hpp"
#include "madc/combinatorics.hpp"
#include "madc/constructions.hpp"
#include "madc/errors.hpp"
#include "madc/oracle.hpp"
#include "madc/pda.hpp"
#include "madc/rational.hpp"
#include "madc/rng.hpp"

namespace madc {

// connect: reducers attach to any alpha mapper nodes of their block.
// cyclic: reducers attach to alpha cyclically consecutive mapper nodes.
enum class model_kind { connect, cyclic };

inline const char* model_name(model_kind m) {
    return m == model_kind::connect ? "connect" : "cyclic";
}

inline model_kind parse_model(const std::string& name) {
    if (name == "connect") return model_kind::connect;
    if (name == "cyclic") return model_kind::cyclic;
    throw param_error("unknown model `" + name + "` (expected connect or cyclic)");
}

struct instance_config {
    model_kind model = model_kind::connect;
    int reducers = 0;        // K
    int inner_dim = 0;       // F (connect) or Q (cyclic)
    int alpha = 0;
    long long eta = 1;       // files per batch
    long long iv_bits = 0;   // beta; 0 picks 8*(K-1)
    long long output_bits = 32;
    long long file_bits = 0; // informational only; file contents never materialize
    std::uint64_t seed = 0;  // drives the intermediate-value oracle
};

// One reducer's private inputs: its demand plus its mapper attachment,
// expressed as a subset of block rows (connect) or a run start (cyclic).
struct reducer_private {
    int demand = 0;
    std::vector<int> subset;  // connect only, sorted
    int start = 0;            // cyclic only
};

struct batch_id {
    int block = 0;  // mapper block, 1..K
    int row = 0;    // row within the block, 1..block_rows
    friend auto operator<=>(const batch_id&, const batch_id&) = default;
};

struct madc_instance {
    instance_config config;
    pda_array inner;        // one block of the column structure
    pda_array extended;     // full K-block array
    pda_params inner_params;
    pda_params extended_params;
    int functions = 0;      // Q, also the number of inner columns
    int block_rows = 0;     // mapper rows per block
    long long total_files = 0;  // N = K * block_rows * eta
    long long beta = 0;         // resolved iv size in bits
    std::vector<int> demands;       // d_k
    std::vector<int> private_cols;  // a_k, the impersonated inner column
    std::vector<std::vector<int>> connected_rows;  // per reducer, sorted block rows
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw param_error(what);
}

inline std::vector<int> star_rows(const pda_array& a, int col) {
    std::vector<int> rows;
    for (int f = 1; f <= a.rows(); ++f)
        if (a.at(f, col).is_star()) rows.push_back(f);
    return rows;
}

}  // namespace detail

inline void validate_config(const instance_config& c) {
    detail::require(c.reducers >= 2, "config: need at least 2 reducers");
    detail::require(c.inner_dim >= 1, "config: inner dimension must be positive");
    detail::require(c.alpha >= 1, "config: alpha must be positive");
    if (c.model == model_kind::connect)
        detail::require(c.alpha <= c.inner_dim, "config: alpha must lie in [1..F]");
    detail::require(c.eta >= 1, "config: eta must be positive");
    detail::require(c.iv_bits >= 0, "config: iv_bits must be >= 0");
    detail::require(c.output_bits >= 1, "config: output_bits must be positive");
    detail::require(c.file_bits >= 0, "config: file_bits must be >= 0");
    long long beta = c.iv_bits == 0 ? 8 * (c.reducers - 1) : c.iv_bits;
    if (c.eta * beta % (c.reducers - 1) != 0)
        throw divisibility_error("eta*beta = " + std::to_string(c.eta * beta) +
                                 " not divisible by K-1 = " + std::to_string(c.reducers - 1));
}

inline madc_instance build_instance(const instance_config& config,
                                    const std::vector<reducer_private>& privates) {
    validate_config(config);
    int k = config.reducers;
    detail::require(static_cast<int>(privates.size()) == k,
                    "need exactly one private choice per reducer");

    pda_array inner = config.model == model_kind::connect
                          ? transpose(man_pda(config.inner_dim, config.alpha))
                          : cyclic_pda(config.inner_dim, config.alpha);
    pda_params inner_params = verify_pda(inner);

    madc_instance inst{config,
                       inner,
                       extend_pda(inner, k),
                       inner_params,
                       pda_params{},
                       inner_params.k,
                       inner_params.f,
                       0,
                       config.iv_bits == 0 ? 8 * (k - 1) : config.iv_bits,
                       {},
                       {},
                       {}};
    inst.extended_params = verify_pda(inst.extended);
    inst.total_files = static_cast<long long>(k) * inst.block_rows * config.eta;

    for (int j = 1; j <= k; ++j) {
        const reducer_private& p = privates[static_cast<std::size_t>(j - 1)];
        detail::require(p.demand >= 1 && p.demand <= inst.functions,
                        "reducer " + std::to_string(j) + ": demand outside [1..Q]");
        int a;
        std::vector<int> rows;
        if (config.model == model_kind::connect) {
            detail::require(static_cast<int>(p.subset.size()) == config.alpha,
                            "reducer " + std::to_string(j) + ": subset must have alpha elements");
            a = static_cast<int>(lex_rank(p.subset, config.inner_dim));
            rows = p.subset;
        } else {
            detail::require(p.start >= 1 && p.start <= config.inner_dim,
                            "reducer " + std::to_string(j) + ": start outside [1..Q]");
            a = p.start;
            rows = cyclic_interval(p.start, config.alpha - 1, config.inner_dim);
            std::sort(rows.begin(), rows.end());
        }
        // The impersonated column must star exactly the connected rows.
        if (detail::star_rows(inner, a) != rows)
            throw protocol_error("inner column " + std::to_string(a) +
                                 " does not match reducer " + std::to_string(j) +
                                 "'s attachment");
        inst.demands.push_back(p.demand);
        inst.private_cols.push_back(a);
        inst.connected_rows.push_back(std::move(rows));
    }

    // Stars of the impersonated extended column must agree with accessibility
    // as derived from the block structure.
    for (int j = 1; j <= k; ++j) {
        int col = (j - 1) * inst.functions + inst.private_cols[static_cast<std::size_t>(j - 1)];
        for (int b = 1; b <= k; ++b)
            for (int f = 1; f <= inst.block_rows; ++f) {
                bool star = inst.extended.at((b - 1) * inst.block_rows + f, col).is_star();
                bool reachable =
                    b != j || std::binary_search(
                                  inst.connected_rows[static_cast<std::size_t>(j - 1)].begin(),
                                  inst.connected_rows[static_cast<std::size_t>(j - 1)].end(), f);
                if (star != reachable)
                    throw protocol_error("extended column disagrees with attachment at block " +
                                         std::to_string(b) + ", row " + std::to_string(f));
            }
    }
    return inst;
}

inline bool batch_accessible(const madc_instance& inst, int reducer, batch_id b) {
    detail::require(reducer >= 1 && reducer <= inst.config.reducers, "reducer index out of range");
    detail::require(b.block >= 1 && b.block <= inst.config.reducers &&
                        b.row >= 1 && b.row <= inst.block_rows,
                    "batch id out of range");
    if (b.block != reducer) return true;
    const auto& rows = inst.connected_rows[static_cast<std::size_t>(reducer - 1)];
    return std::binary_search(rows.begin(), rows.end(), b.row);
}

inline std::vector<batch_id> accessible_batches(const madc_instance& inst, int reducer) {
    std::vector<batch_id> out;
    for (int b = 1; b <= inst.config.reducers; ++b)
        for (int f = 1; f <= inst.block_rows; ++f)
            if (batch_accessible(inst, reducer, {b, f})) out.push_back({b, f});
    return out;
}

// Files of a batch, inclusive on both ends.
inline std::pair<long long, long long> batch_files(const madc_instance& inst, batch_id b) {
    long long first = (static_cast<long long>(b.block - 1) * inst.block_rows + (b.row - 1)) *
                          inst.config.eta + 1;
    return {first, first + inst.config.eta - 1};
}

// Uniform permutation of [1..functions] pinned to demand at position slot.
inline std::vector<int> generate_query(int functions, int demand, int slot, rng& r) {
    detail::require(demand >= 1 && demand <= functions, "generate_query: demand outside [1..Q]");
    detail::require(slot >= 1 && slot <= functions, "generate_query: slot outside [1..Q]");
    std::vector<int> rest;
    rest.reserve(static_cast<std::size_t>(functions) - 1);
    for (int q = 1; q <= functions; ++q)
        if (q != demand) rest.push_back(q);
    r.shuffle(rest);
    std::vector<int> perm;
    perm.reserve(static_cast<std::size_t>(functions));
    std::size_t i = 0;
    for (int pos = 1; pos <= functions; ++pos)
        perm.push_back(pos == slot ? demand : rest[i++]);
    return perm;
}

inline void validate_query(const madc_instance& inst, int reducer, const std::vector<int>& perm) {
    detail::require(static_cast<int>(perm.size()) == inst.functions,
                    "query " + std::to_string(reducer) + ": wrong length");
    std::vector<bool> seen(static_cast<std::size_t>(inst.functions) + 1, false);
    for (int v : perm) {
        detail::require(v >= 1 && v <= inst.functions && !seen[static_cast<std::size_t>(v)],
                        "query " + std::to_string(reducer) + ": not a permutation of [1..Q]");
        seen[static_cast<std::size_t>(v)] = true;
    }
    int a = inst.private_cols[static_cast<std::size_t>(reducer - 1)];
    if (perm[static_cast<std::size_t>(a - 1)] != inst.demands[static_cast<std::size_t>(reducer - 1)])
        throw param_error("query " + std::to_string(reducer) +
                          ": demand is not at the impersonated column");
}

// What each announced query commits a block to: one aggregated symbol per
// labeled inner cell.
struct demand_entry {
    int block = 0;      // j
    int row = 0;        // f, block row
    int inner_col = 0;  // i
    int function = 0;   // y_j[i]
    long long first_file = 0, last_file = 0;
    friend auto operator<=>(const demand_entry&, const demand_entry&) = default;
};

inline std::vector<demand_entry> demand_table(const madc_instance& inst,
                                              const std::vector<std::vector<int>>& queries) {
    std::vector<demand_entry> out;
    for (int j = 1; j <= inst.config.reducers; ++j) {
        const auto& perm = queries[static_cast<std::size_t>(j - 1)];
        for (int f = 1; f <= inst.block_rows; ++f)
            for (int i = 1; i <= inst.functions; ++i) {
                if (inst.inner.at(f, i).is_star()) continue;
                auto [first, last] = batch_files(inst, {j, f});
                out.push_back({j, f, i, perm[static_cast<std::size_t>(i - 1)], first, last});
            }
    }
    return out;
}

// One packet: the `superscript` share of the aggregated symbol of `function`
// over batch (block, row).
struct packet_id {
    int function = 0;
    int block = 0;
    int row = 0;
    int superscript = 0;
    friend auto operator<=>(const packet_id&, const packet_id&) = default;
};

namespace detail {

// Position of `superscript` among sorted members of [1..K] \ {block}.
inline int packet_slot(int reducers, int block, int superscript) {
    require(superscript != block, "packet superscript equals owning block");
    int slot = 0;
    for (int j = 1; j < superscript; ++j)
        if (j != block) ++slot;
    (void)reducers;
    return slot;
}

}  // namespace detail

// Aggregated symbol: intermediate values of one function across one batch.
inline bit_vector aggregated_symbol(const madc_instance& inst, const iv_oracle& oracle,
                                    int function, batch_id b) {
    auto [first, last] = batch_files(inst, b);
    bit_vector out;
    for (long long n = first; n <= last; ++n) out.append(oracle.iv(function, n));
    return out;
}

inline long long packet_bits(const madc_instance& inst) {
    return inst.config.eta * inst.beta / (inst.config.reducers - 1);
}

inline bit_vector packet_payload(const madc_instance& inst, const iv_oracle& oracle,
                                 packet_id id) {
    bit_vector sym = aggregated_symbol(inst, oracle, id.function, {id.block, id.row});
    long long len = packet_bits(inst);
    int slot = detail::packet_slot(inst.config.reducers, id.block, id.superscript);
    return sym.slice(static_cast<std::size_t>(slot) * static_cast<std::size_t>(len),
                     static_cast<std::size_t>(len));
}

struct transcript_entry {
    int sender = 0;
    int label = 0;
    std::vector<packet_id> packets;
    bit_vector payload;
};

struct shuffle_transcript {
    std::vector<transcript_entry> entries;  // sender ascending, label ascending
    long long total_bits = 0;

    const transcript_entry& find(int sender, int label) const {
        for (const auto& e : entries)
            if (e.sender == sender && e.label == label) return e;
        throw protocol_error("transcript has no entry for sender " + std::to_string(sender) +
                             ", label " + std::to_string(label));
    }
};

// Every reducer sends, per label, the xor of one packet from each aggregated
// symbol that the other blocks' queries place under that label.
inline shuffle_transcript shuffle_round(const madc_instance& inst,
                                        const std::vector<std::vector<int>>& queries,
                                        const iv_oracle& oracle) {
    detail::require(static_cast<int>(queries.size()) == inst.config.reducers,
                    "need one query per reducer");
    for (int j = 1; j <= inst.config.reducers; ++j)
        validate_query(inst, j, queries[static_cast<std::size_t>(j - 1)]);

    auto cells = label_cells(inst.inner, inst.inner_params.s);
    long long len = packet_bits(inst);
    shuffle_transcript out;
    for (int k = 1; k <= inst.config.reducers; ++k) {
        for (int t = 1; t <= inst.inner_params.s; ++t) {
            transcript_entry e{k, t, {}, bit_vector(static_cast<std::size_t>(len))};
            for (int j = 1; j <= inst.config.reducers; ++j) {
                if (j == k) continue;
                for (auto [f, i] : cells[static_cast<std::size_t>(t)]) {
                    if (!batch_accessible(inst, k, {j, f}))
                        throw infeasible_transmission(k, t,
                                                      "batch (" + std::to_string(j) + "," +
                                                          std::to_string(f) + ") not readable");
                    packet_id id{queries[static_cast<std::size_t>(j - 1)]
                                        [static_cast<std::size_t>(i - 1)],
                                 j, f, k};
                    e.payload ^= packet_payload(inst, oracle, id);
                    e.packets.push_back(id);
                }
            }
            out.total_bits += len;
            out.entries.push_back(std::move(e));
        }
    }
    return out;
}

// Recovers every intermediate value of reducer `k`'s demanded function:
// directly for readable batches, through interference cancellation otherwise.
// The cancellation terms are recomputed from the announced queries, which are
// public; the packet lists inside the transcript are audit metadata only.
inline std::vector<bit_vector> decode_reducer(const madc_instance& inst, int k,
                                              const shuffle_transcript& transcript,
                                              const std::vector<std::vector<int>>& queries,
                                              const iv_oracle& oracle) {
    int d = inst.demands[static_cast<std::size_t>(k - 1)];
    int a = inst.private_cols[static_cast<std::size_t>(k - 1)];
    std::vector<bit_vector> ivs(static_cast<std::size_t>(inst.total_files));

    for (batch_id b : accessible_batches(inst, k)) {
        auto [first, last] = batch_files(inst, b);
        for (long long n = first; n <= last; ++n)
            ivs[static_cast<std::size_t>(n - 1)] = oracle.iv(d, n);
    }

    auto cells = label_cells(inst.inner, inst.inner_params.s);
    for (int f = 1; f <= inst.block_rows; ++f) {
        pda_entry cell = inst.inner.at(f, a);
        if (cell.is_star()) continue;
        int t = cell.label_value();
        bit_vector symbol;
        for (int s = 1; s <= inst.config.reducers; ++s) {
            if (s == k) continue;
            packet_id target{d, k, f, s};
            bit_vector part = transcript.find(s, t).payload;
            bool found = false;
            for (int j = 1; j <= inst.config.reducers; ++j) {
                if (j == s) continue;
                for (auto [fj, ij] : cells[static_cast<std::size_t>(t)]) {
                    packet_id id{queries[static_cast<std::size_t>(j - 1)]
                                        [static_cast<std::size_t>(ij - 1)],
                                 j, fj, s};
                    if (id == target) {
                        found = true;
                        continue;
                    }
                    if (!batch_accessible(inst, k, {id.block, id.row}))
                        throw decode_failure(k, "cannot cancel packet over batch (" +
                                                    std::to_string(id.block) + "," +
                                                    std::to_string(id.row) + ") in label " +
                                                    std::to_string(t));
                    part ^= packet_payload(inst, oracle, id);
                }
            }
            if (!found)
                throw decode_failure(k, "transmission of sender " + std::to_string(s) +
                                            " for label " + std::to_string(t) +
                                            " does not carry the wanted packet");
            symbol.append(part);
        }
        if (symbol.size() != static_cast<std::size_t>(inst.config.eta * inst.beta))
            throw decode_failure(k, "reassembled symbol has wrong size");
        auto [first, last] = batch_files(inst, {k, f});
        for (long long n = first; n <= last; ++n)
            ivs[static_cast<std::size_t>(n - 1)] = symbol.slice(
                static_cast<std::size_t>((n - first) * inst.beta),
                static_cast<std::size_t>(inst.beta));
    }

    for (long long n = 1; n <= inst.total_files; ++n)
        if (ivs[static_cast<std::size_t>(n - 1)].size() != static_cast<std::size_t>(inst.beta))
            throw decode_failure(k, "intermediate value of file " + std::to_string(n) +
                                        " was never recovered");
    return ivs;
}

namespace detail {

// XOR of all parts, then truncated or zero-padded to out_bits.
inline bit_vector xor_fold(const std::vector<bit_vector>& parts, long long out_bits) {
    bit_vector acc;
    for (const bit_vector& p : parts) {
        if (acc.empty())
            acc = p;
        else
            acc ^= p;
    }
    bit_vector out(static_cast<std::size_t>(out_bits));
    std::size_t n = std::min(acc.size(), out.size());
    for (std::size_t i = 0; i < n; ++i) out.set_bit(i, acc.bit(i));
    return out;
}

}  // namespace detail

// The reduce fold computed straight from the oracle; the decode route must
// reproduce it.
inline bit_vector reduce_reference(const madc_instance& inst, int function,
                                   const iv_oracle& oracle) {
    std::vector<bit_vector> ivs;
    ivs.reserve(static_cast<std::size_t>(inst.total_files));
    for (long long n = 1; n <= inst.total_files; ++n) ivs.push_back(oracle.iv(function, n));
    return detail::xor_fold(ivs, inst.config.output_bits);
}

// Reduce step, fixed to an XOR fold of all intermediate values of the
// demanded function, sized to output_bits. Checked against the same fold
// computed straight from the oracle.
inline bit_vector reduce_output(const madc_instance& inst, int k,
                                const std::vector<bit_vector>& ivs, const iv_oracle& oracle) {
    if (static_cast<long long>(ivs.size()) != inst.total_files)
        throw incomplete_input("reduce needs " + std::to_string(inst.total_files) +
                               " intermediate values, got " + std::to_string(ivs.size()));
    for (long long n = 1; n <= inst.total_files; ++n)
        if (ivs[static_cast<std::size_t>(n - 1)].size() != static_cast<std::size_t>(inst.beta))
            throw incomplete_input("intermediate value of file " + std::to_string(n) +
                                   " is missing or mis-sized");
    bit_vector out = detail::xor_fold(ivs, inst.config.output_bits);
    if (out != reduce_reference(inst, inst.demands[static_cast<std::size_t>(k - 1)], oracle))
        throw decode_failure(k, "reduce output differs from the oracle-side fold");
    return out;
}

struct load_report {
    long long total_bits = 0;
    rational r_measured;
    rational l_measured;
    rational l_formula;
    bool matches = false;
};

// Communication load is shuffle traffic normalized by Q*N*beta; computation
// load is mapped files over N, which is 1 here since batches partition files.
inline load_report measure_loads(const madc_instance& inst,
                                 const shuffle_transcript& transcript) {
    load_report r;
    r.total_bits = transcript.total_bits;
    r.r_measured = rational(1);
    r.l_measured = rational(transcript.total_bits,
                            static_cast<long long>(inst.functions) * inst.total_files * inst.beta);
    if (inst.config.model == model_kind::connect) {
        int f = inst.config.inner_dim, alpha = inst.config.alpha, k = inst.config.reducers;
        r.l_formula = rational(f - alpha,
                               static_cast<long long>(f) * (k - 1) * (alpha + 1));
    } else {
        int q = inst.config.inner_dim, alpha = inst.config.alpha, k = inst.config.reducers;
        r.l_formula = rational(q - alpha, 2LL * q * (k - 1));
    }
    r.matches = r.l_measured == r.l_formula;
    return r;
}

inline std::vector<reducer_private> random_private_choices(const instance_config& config,
                                                           rng& r) {
    validate_config(config);
    int functions = config.model == model_kind::connect
                        ? static_cast<int>(binomial(config.inner_dim, config.alpha))
                        : config.inner_dim;
    std::vector<reducer_private> out;
    for (int k = 1; k <= config.reducers; ++k) {
        reducer_private p;
        p.demand = static_cast<int>(r.uniform_int(1, functions));
        if (config.model == model_kind::connect) {
            long long rank = r.uniform_int(1, static_cast<long long>(
                                                  binomial(config.inner_dim, config.alpha)));
            p.subset = lex_unrank(rank, config.inner_dim, config.alpha);
        } else {
            p.start = static_cast<int>(r.uniform_int(1, config.inner_dim));
        }
        out.push_back(std::move(p));
    }
    return out;
}

struct round_options {
    std::vector<reducer_private> privates;        // empty: drawn from the round rng
    std::vector<std::vector<int>> preset_queries; // empty: drawn from the round rng
};

struct round_result {
    madc_instance instance;
    std::vector<std::vector<int>> queries;
    shuffle_transcript transcript;
    std::vector<bit_vector> outputs;  // one digest per reducer
    load_report loads;
};

// One full protocol round: choose inputs, announce queries, shuffle, decode
// at every reducer, and check each recovered value and reduce digest against
// the oracle. Throws on any mismatch.
inline round_result run_round(const instance_config& config, const round_options& options,
                              std::uint64_t round_seed) {
    rng r(derive_seed(round_seed, 0x726f756e64ull /* "round" */));
    std::vector<reducer_private> privates =
        options.privates.empty() ? random_private_choices(config, r) : options.privates;
    madc_instance inst = build_instance(config, privates);

    std::vector<std::vector<int>> queries;
    if (options.preset_queries.empty()) {
        for (int k = 1; k <= config.reducers; ++k)
            queries.push_back(generate_query(inst.functions,
                                             inst.demands[static_cast<std::size_t>(k - 1)],
                                             inst.private_cols[static_cast<std::size_t>(k - 1)],
                                             r));
    } else {
        queries = options.preset_queries;
        detail::require(static_cast<int>(queries.size()) == config.reducers,
                        "need one preset query per reducer");
        for (int k = 1; k <= config.reducers; ++k)
            validate_query(inst, k, queries[static_cast<std::size_t>(k - 1)]);
    }

    iv_oracle oracle(config.seed, inst.beta);
    round_result result{inst, queries, shuffle_round(inst, queries, oracle), {}, {}};
    result.loads = measure_loads(inst, result.transcript);

    for (int k = 1; k <= config.reducers; ++k) {
        std::vector<bit_vector> ivs = decode_reducer(inst, k, result.transcript, queries, oracle);
        int d = inst.demands[static_cast<std::size_t>(k - 1)];
        for (long long n = 1; n <= inst.total_files; ++n)
            if (ivs[static_cast<std::size_t>(n - 1)] != oracle.iv(d, n))
                throw decode_failure(k, "recovered value of file " + std::to_string(n) +
                                            " differs from the oracle");
        result.outputs.push_back(reduce_output(inst, k, ivs, oracle));
    }
    return result;
}

}  // namespace madc
