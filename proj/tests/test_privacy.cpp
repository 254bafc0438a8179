#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <vector>

#include "madc/privacy.hpp"

using madc::audit_independence;
using madc::empirical_query_check;
using madc::empirical_query_check_with;
using madc::exact_query_distribution;
using madc::joint_factorization_gap;
using madc::permutation_rank;
using madc::query_distribution;
using madc::rational;
using madc::tv_distance;

TEST_CASE("query law is uniform over all permutations", "[privacy]") {
    query_distribution d = exact_query_distribution(3, 1);
    CHECK(d.probabilities.size() == 6);
    for (const auto& [perm, mass] : d.probabilities) CHECK(mass == rational(1, 6));

    query_distribution single = exact_query_distribution(1, 1);
    REQUIRE(single.probabilities.size() == 1);
    CHECK(single.probabilities.begin()->second == rational(1));

    for (int q = 2; q <= 6; ++q) {
        rational uniform(1, static_cast<long long>(madc::detail::factorial(q)));
        for (int demand = 1; demand <= q; ++demand) {
            query_distribution dist = exact_query_distribution(q, demand);
            REQUIRE(dist.probabilities.size() == madc::detail::factorial(q));
            rational total(0);
            for (const auto& [perm, mass] : dist.probabilities) {
                REQUIRE(mass == uniform);
                total += mass;
            }
            REQUIRE(total == rational(1));
        }
    }
}

TEST_CASE("query laws coincide across demands", "[privacy]") {
    query_distribution a = exact_query_distribution(4, 2);
    query_distribution b = exact_query_distribution(4, 3);
    CHECK(a.probabilities == b.probabilities);
    CHECK(tv_distance(a, b) == rational(0));
}

TEST_CASE("tv_distance sees real gaps", "[privacy]") {
    query_distribution a = exact_query_distribution(2, 1);
    query_distribution skew;
    skew.functions = 2;
    skew.probabilities[{1, 2}] = rational(3, 4);
    skew.probabilities[{2, 1}] = rational(1, 4);
    CHECK(tv_distance(a, skew) == rational(1, 4));
}

TEST_CASE("audit_independence reports zero distances", "[privacy]") {
    for (auto [q, k] : std::vector<std::pair<int, int>>{{2, 2}, {3, 3}, {4, 3}, {5, 4}}) {
        madc::independence_report rep = audit_independence(q, k);
        CHECK(rep.max_tv == rational(0));
        CHECK(rep.uniform_gap == rational(0));
        CHECK(rep.pairs_checked == static_cast<long long>(q) * (q - 1) / 2);
        CHECK(rep.contexts == static_cast<long long>(q) * q);
    }
    CHECK_THROWS_AS(audit_independence(3, 1), madc::param_error);
}

TEST_CASE("joint law of independent reducers factorizes", "[privacy]") {
    for (int q = 1; q <= 3; ++q)
        for (int d1 = 1; d1 <= q; ++d1)
            for (int d2 = 1; d2 <= q; ++d2)
                REQUIRE(joint_factorization_gap(q, d1, d2) == rational(0));
}

TEST_CASE("permutation_rank is the lexicographic index", "[privacy]") {
    CHECK(permutation_rank({1, 2, 3}) == 0);
    CHECK(permutation_rank({1, 3, 2}) == 1);
    CHECK(permutation_rank({3, 2, 1}) == 5);
    std::vector<int> p{1, 2, 3, 4};
    long long rank = 0;
    do REQUIRE(permutation_rank(p) == rank++);
    while (std::next_permutation(p.begin(), p.end()));
}

TEST_CASE("sampled queries pass the chi-square check", "[privacy]") {
    double stat = empirical_query_check(3, 1, 60000, 2026);
    CHECK(stat < madc::chi_square_threshold_999(3));
    CHECK(empirical_query_check(1, 1, 100, 0) == 0.0);
}

TEST_CASE("a broken sampler fails the chi-square check", "[privacy]") {
    double stat = empirical_query_check_with(3, 1000, [] {
        return std::vector<int>{1, 2, 3};
    });
    CHECK(stat > madc::chi_square_threshold_999(3));
}

TEST_CASE("stored chi-square quantiles", "[privacy]") {
    CHECK(madc::chi_square_threshold_999(2) == Catch::Approx(10.827566));
    CHECK(madc::chi_square_threshold_999(3) == Catch::Approx(20.515006));
    CHECK(madc::chi_square_threshold_999(7) == Catch::Approx(5354.934176));
    CHECK_THROWS_AS(madc::chi_square_threshold_999(8), madc::param_error);
    CHECK_THROWS_AS(madc::chi_square_threshold_999(1), madc::param_error);
}
