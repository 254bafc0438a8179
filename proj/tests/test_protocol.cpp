#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "madc/oracle.hpp"
#include "madc/protocol.hpp"

using madc::batch_id;
using madc::bit_vector;
using madc::instance_config;
using madc::iv_oracle;
using madc::madc_instance;
using madc::model_kind;
using madc::packet_id;
using madc::rational;
using madc::reducer_private;
using madc::rng;

namespace {

// K=3 reducers over 3-row blocks, width-2 attachments, one file per batch.
instance_config three_by_three() {
    instance_config c;
    c.model = model_kind::connect;
    c.reducers = 3;
    c.inner_dim = 3;
    c.alpha = 2;
    c.eta = 1;
    c.seed = 99;
    return c;
}

std::vector<reducer_private> three_by_three_privates() {
    return {{1, {1, 2}, 0}, {2, {2, 3}, 0}, {3, {2, 3}, 0}};
}

std::vector<std::vector<int>> three_by_three_queries() {
    return {{1, 3, 2}, {1, 3, 2}, {2, 1, 3}};
}

// K=6 reducers over 6-row blocks, cyclic attachments starting at the block
// index, identity queries.
instance_config six_by_six() {
    instance_config c;
    c.model = model_kind::cyclic;
    c.reducers = 6;
    c.inner_dim = 6;
    c.alpha = 2;
    c.eta = 1;
    c.seed = 7;
    return c;
}

std::vector<reducer_private> six_by_six_privates() {
    std::vector<reducer_private> p;
    for (int k = 1; k <= 6; ++k) p.push_back({k, {}, k});
    return p;
}

std::set<packet_id> packet_set(const madc::transcript_entry& e) {
    return {e.packets.begin(), e.packets.end()};
}

}  // namespace

TEST_CASE("build_instance derives columns from attachments", "[protocol]") {
    madc_instance inst = madc::build_instance(three_by_three(), three_by_three_privates());
    CHECK(inst.functions == 3);
    CHECK(inst.block_rows == 3);
    CHECK(inst.total_files == 9);
    CHECK(inst.beta == 16);
    CHECK(inst.private_cols == std::vector<int>{1, 3, 3});
    CHECK(inst.demands == std::vector<int>{1, 2, 3});
    CHECK(inst.extended_params.k == 9);
    CHECK(inst.extended_params.z == 8);
}

TEST_CASE("build_instance rejects bad inputs", "[protocol]") {
    instance_config c = three_by_three();
    auto p = three_by_three_privates();

    c.iv_bits = 7;  // not divisible by K-1 = 2
    CHECK_THROWS_AS(madc::build_instance(c, p), madc::divisibility_error);

    c = three_by_three();
    p[0].demand = 4;
    CHECK_THROWS_AS(madc::build_instance(c, p), madc::param_error);

    p = three_by_three_privates();
    p[1].subset = {2};
    CHECK_THROWS_AS(madc::build_instance(c, p), madc::param_error);

    p = three_by_three_privates();
    p.pop_back();
    CHECK_THROWS_AS(madc::build_instance(c, p), madc::param_error);

    c.reducers = 1;
    CHECK_THROWS_AS(madc::validate_config(c), madc::param_error);
}

TEST_CASE("batches map to file ranges block-row-major", "[protocol]") {
    madc_instance inst = madc::build_instance(three_by_three(), three_by_three_privates());
    CHECK(madc::batch_files(inst, {1, 1}) == std::pair<long long, long long>{1, 1});
    CHECK(madc::batch_files(inst, {1, 3}) == std::pair<long long, long long>{3, 3});
    CHECK(madc::batch_files(inst, {2, 1}) == std::pair<long long, long long>{4, 4});
    CHECK(madc::batch_files(inst, {3, 3}) == std::pair<long long, long long>{9, 9});
}

TEST_CASE("accessible_batches misses exactly the unattached own rows", "[protocol]") {
    madc_instance inst = madc::build_instance(three_by_three(), three_by_three_privates());
    auto acc = madc::accessible_batches(inst, 1);
    CHECK(acc.size() == 8);
    CHECK(!madc::batch_accessible(inst, 1, {1, 3}));
    CHECK(madc::batch_accessible(inst, 1, {1, 2}));
    CHECK(madc::batch_accessible(inst, 1, {2, 3}));

    // Matches the star rows of the impersonated extended column.
    for (int k = 1; k <= 3; ++k) {
        int col = (k - 1) * inst.functions + inst.private_cols[static_cast<std::size_t>(k - 1)];
        for (int b = 1; b <= 3; ++b)
            for (int f = 1; f <= 3; ++f)
                REQUIRE(madc::batch_accessible(inst, k, {b, f}) ==
                        inst.extended.at((b - 1) * 3 + f, col).is_star());
    }
}

TEST_CASE("cyclic attachments wrap and follow the start index", "[protocol]") {
    madc_instance inst = madc::build_instance(six_by_six(), six_by_six_privates());
    CHECK(inst.private_cols == std::vector<int>{1, 2, 3, 4, 5, 6});
    std::set<batch_id> missing;
    for (int f = 1; f <= 6; ++f)
        if (!madc::batch_accessible(inst, 1, {1, f})) missing.insert({1, f});
    CHECK(missing == std::set<batch_id>{{1, 3}, {1, 4}, {1, 5}, {1, 6}});

    // Start 6 wraps onto rows {6, 1}.
    auto privates = six_by_six_privates();
    privates[0].start = 6;
    madc_instance wrapped = madc::build_instance(six_by_six(), privates);
    CHECK(madc::batch_accessible(wrapped, 1, {1, 6}));
    CHECK(madc::batch_accessible(wrapped, 1, {1, 1}));
    CHECK(!madc::batch_accessible(wrapped, 1, {1, 2}));
}

TEST_CASE("demand_table lists one aggregated symbol per labeled cell", "[protocol]") {
    madc_instance inst = madc::build_instance(three_by_three(), three_by_three_privates());
    auto table = madc::demand_table(inst, three_by_three_queries());
    std::map<std::tuple<int, int, int>, std::pair<int, long long>> got;
    for (const auto& e : table) {
        REQUIRE(e.first_file == e.last_file);  // eta = 1
        got[{e.block, e.row, e.inner_col}] = {e.function, e.first_file};
    }
    std::map<std::tuple<int, int, int>, std::pair<int, long long>> expected{
        {{1, 1, 3}, {2, 1}}, {{1, 2, 2}, {3, 2}}, {{1, 3, 1}, {1, 3}},
        {{2, 1, 3}, {2, 4}}, {{2, 2, 2}, {3, 5}}, {{2, 3, 1}, {1, 6}},
        {{3, 1, 3}, {3, 7}}, {{3, 2, 2}, {1, 8}}, {{3, 3, 1}, {2, 9}},
    };
    CHECK(got == expected);
}

TEST_CASE("query generation pins the demand and stays admissible", "[protocol]") {
    rng r(11);
    CHECK(madc::generate_query(1, 1, 1, r) == std::vector<int>{1});

    std::map<std::vector<int>, int> seen;
    for (int i = 0; i < 10000; ++i) ++seen[madc::generate_query(3, 1, 1, r)];
    CHECK(seen.size() == 2);
    CHECK(seen.count({1, 2, 3}) == 1);
    CHECK(seen.count({1, 3, 2}) == 1);
    for (const auto& [perm, count] : seen) CHECK(count > 4600);
}

TEST_CASE("shuffle emits the expected packet sets", "[protocol]") {
    madc_instance inst = madc::build_instance(three_by_three(), three_by_three_privates());
    iv_oracle oracle(inst.config.seed, inst.beta);
    auto transcript = madc::shuffle_round(inst, three_by_three_queries(), oracle);

    CHECK(transcript.entries.size() == 3);  // K * S = 3 * 1
    CHECK(transcript.total_bits == 24);     // 3 symbols of beta/2 = 8 bits

    CHECK(packet_set(transcript.find(1, 1)) ==
          std::set<packet_id>{{2, 2, 1, 1}, {3, 2, 2, 1}, {1, 2, 3, 1},
                              {3, 3, 1, 1}, {1, 3, 2, 1}, {2, 3, 3, 1}});
    CHECK(packet_set(transcript.find(2, 1)) ==
          std::set<packet_id>{{2, 1, 1, 2}, {3, 1, 2, 2}, {1, 1, 3, 2},
                              {3, 3, 1, 2}, {1, 3, 2, 2}, {2, 3, 3, 2}});
    CHECK(packet_set(transcript.find(3, 1)) ==
          std::set<packet_id>{{2, 1, 1, 3}, {3, 1, 2, 3}, {1, 1, 3, 3},
                              {2, 2, 1, 3}, {3, 2, 2, 3}, {1, 2, 3, 3}});

    // Payload equals the xor of its packets, recomputed independently.
    for (const auto& e : transcript.entries) {
        bit_vector acc(static_cast<std::size_t>(madc::packet_bits(inst)));
        for (const packet_id& id : e.packets) acc ^= madc::packet_payload(inst, oracle, id);
        REQUIRE(acc == e.payload);
    }
}

TEST_CASE("decode recovers every intermediate value bit-exactly", "[protocol]") {
    madc_instance inst = madc::build_instance(three_by_three(), three_by_three_privates());
    iv_oracle oracle(inst.config.seed, inst.beta);
    auto queries = three_by_three_queries();
    auto transcript = madc::shuffle_round(inst, queries, oracle);
    for (int k = 1; k <= 3; ++k) {
        auto ivs = madc::decode_reducer(inst, k, transcript, queries, oracle);
        REQUIRE(ivs.size() == 9);
        for (long long n = 1; n <= 9; ++n)
            REQUIRE(ivs[static_cast<std::size_t>(n - 1)] ==
                    oracle.iv(inst.demands[static_cast<std::size_t>(k - 1)], n));
    }
}

TEST_CASE("a corrupted payload surfaces as a decode mismatch", "[protocol]") {
    madc_instance inst = madc::build_instance(three_by_three(), three_by_three_privates());
    iv_oracle oracle(inst.config.seed, inst.beta);
    auto queries = three_by_three_queries();
    auto transcript = madc::shuffle_round(inst, queries, oracle);
    transcript.entries[1].payload.set_bit(0, !transcript.entries[1].payload.bit(0));
    int victim = transcript.entries[1].sender == 1 ? 2 : 1;
    auto ivs = madc::decode_reducer(inst, victim, transcript, queries, oracle);
    bool all_equal = true;
    for (long long n = 1; n <= 9; ++n)
        all_equal = all_equal &&
                    ivs[static_cast<std::size_t>(n - 1)] ==
                        oracle.iv(inst.demands[static_cast<std::size_t>(victim - 1)], n);
    CHECK_FALSE(all_equal);
}

TEST_CASE("reduce output folds the decoded values and checks the oracle", "[protocol]") {
    madc_instance inst = madc::build_instance(three_by_three(), three_by_three_privates());
    iv_oracle oracle(inst.config.seed, inst.beta);
    auto queries = three_by_three_queries();
    auto transcript = madc::shuffle_round(inst, queries, oracle);
    auto ivs = madc::decode_reducer(inst, 1, transcript, queries, oracle);

    bit_vector out = madc::reduce_output(inst, 1, ivs, oracle);
    CHECK(out.size() == 32);
    CHECK(out == madc::reduce_reference(inst, 1, oracle));

    // Manual fold: xor of all values, truncated or padded to output_bits.
    bit_vector acc = ivs[0];
    for (std::size_t i = 1; i < ivs.size(); ++i) acc ^= ivs[i];
    bit_vector manual(32);
    for (std::size_t i = 0; i < acc.size(); ++i) manual.set_bit(i, acc.bit(i));
    CHECK(out == manual);

    auto incomplete = ivs;
    incomplete.pop_back();
    CHECK_THROWS_AS(madc::reduce_output(inst, 1, incomplete, oracle), madc::incomplete_input);
    auto missized = ivs;
    missized[4] = bit_vector(3);
    CHECK_THROWS_AS(madc::reduce_output(inst, 1, missized, oracle), madc::incomplete_input);
}

TEST_CASE("loads for the 3x3 and 6x6 instances are exact", "[protocol]") {
    madc::round_options opts;
    opts.privates = three_by_three_privates();
    opts.preset_queries = three_by_three_queries();
    madc::round_result round = madc::run_round(three_by_three(), opts, 1);
    CHECK(round.loads.l_measured == rational(1, 18));
    CHECK(round.loads.l_formula == rational(1, 18));
    CHECK(round.loads.r_measured == rational(1));
    CHECK(round.loads.matches);
    CHECK(round.transcript.total_bits == 24);

    madc::round_options opts2;
    opts2.privates = six_by_six_privates();
    std::vector<int> identity{1, 2, 3, 4, 5, 6};
    opts2.preset_queries.assign(6, identity);
    madc::round_result round2 = madc::run_round(six_by_six(), opts2, 1);
    CHECK(round2.loads.l_measured == rational(1, 15));
    CHECK(round2.loads.l_formula == rational(1, 15));
    CHECK(round2.transcript.total_bits ==
          6LL * 12 * 40 / 5);  // K * S * eta * beta / (K-1)
}

TEST_CASE("load of the width-1 two-block instance is 3/8", "[protocol]") {
    instance_config c;
    c.model = model_kind::connect;
    c.reducers = 2;
    c.inner_dim = 4;
    c.alpha = 1;
    c.eta = 1;
    c.seed = 5;
    madc::round_result round = madc::run_round(c, {}, 3);
    CHECK(round.loads.l_measured == rational(3, 8));
    CHECK(round.loads.matches);
}

TEST_CASE("rounds are deterministic in the seed", "[protocol]") {
    instance_config c = three_by_three();
    madc::round_result a = madc::run_round(c, {}, 42);
    madc::round_result b = madc::run_round(c, {}, 42);
    CHECK(a.queries == b.queries);
    REQUIRE(a.transcript.entries.size() == b.transcript.entries.size());
    for (std::size_t i = 0; i < a.transcript.entries.size(); ++i) {
        CHECK(a.transcript.entries[i].payload == b.transcript.entries[i].payload);
        CHECK(a.transcript.entries[i].packets == b.transcript.entries[i].packets);
    }

    bool any_difference = false;
    for (std::uint64_t seed = 43; seed < 48; ++seed)
        any_difference = any_difference || madc::run_round(c, {}, seed).queries != a.queries;
    CHECK(any_difference);
}

TEST_CASE("preset queries must pin the demand", "[protocol]") {
    madc::round_options opts;
    opts.privates = three_by_three_privates();
    opts.preset_queries = {{2, 3, 1}, {1, 3, 2}, {2, 1, 3}};  // slot 1 of query 1 is not d_1
    CHECK_THROWS_AS(madc::run_round(three_by_three(), opts, 1), madc::param_error);

    opts.preset_queries = {{1, 1, 2}, {1, 3, 2}, {2, 1, 3}};  // not a permutation
    CHECK_THROWS_AS(madc::run_round(three_by_three(), opts, 1), madc::param_error);
}

TEST_CASE("random rounds succeed across both models", "[protocol]") {
    for (int trial = 0; trial < 20; ++trial) {
        instance_config c;
        c.model = model_kind::connect;
        c.reducers = 2 + trial % 4;
        c.inner_dim = 3 + trial % 3;
        c.alpha = 1 + trial % (c.inner_dim - 1);
        c.eta = 1 + trial % 2;
        c.seed = static_cast<std::uint64_t>(trial);
        madc::round_result r = madc::run_round(c, {}, static_cast<std::uint64_t>(trial));
        REQUIRE(r.loads.matches);
        REQUIRE(r.outputs.size() == static_cast<std::size_t>(c.reducers));
    }
    for (int trial = 0; trial < 20; ++trial) {
        instance_config c;
        c.model = model_kind::cyclic;
        c.reducers = 2 + trial % 4;
        c.inner_dim = 4 + trial % 5;
        c.alpha = 0;
        for (int a = 1; 2 * a < c.inner_dim; ++a)
            if ((c.inner_dim + a) % 2 == 0) c.alpha = a;
        if (c.alpha == 0) continue;
        c.eta = 1;
        c.seed = static_cast<std::uint64_t>(100 + trial);
        madc::round_result r = madc::run_round(c, {}, static_cast<std::uint64_t>(trial));
        REQUIRE(r.loads.matches);
    }
}

TEST_CASE("transcript size identity holds", "[protocol]") {
    madc::round_options opts;
    opts.privates = six_by_six_privates();
    madc::round_result r = madc::run_round(six_by_six(), opts, 9);
    const madc_instance& inst = r.instance;
    CHECK(r.transcript.total_bits == static_cast<long long>(inst.config.reducers) *
                                         inst.inner_params.s * inst.config.eta * inst.beta /
                                         (inst.config.reducers - 1));
    CHECK(r.transcript.entries.size() ==
          static_cast<std::size_t>(inst.config.reducers) *
              static_cast<std::size_t>(inst.inner_params.s));
}
