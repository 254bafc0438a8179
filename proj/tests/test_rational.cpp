#include <catch2/catch_amalgamated.hpp>
#include <cstdint>

#include "madc/rational.hpp"

using madc::rational;

TEST_CASE("rational normalizes to lowest terms with positive denominator", "[rational]") {
    CHECK(rational(2, 4) == rational(1, 2));
    CHECK(rational(3, -6) == rational(-1, 2));
    CHECK(rational(-4, -8) == rational(1, 2));
    CHECK(rational(0, 5).den() == 1);
    CHECK(rational(7).den() == 1);
    CHECK_THROWS_AS(rational(1, 0), madc::param_error);
}

TEST_CASE("rational arithmetic is exact", "[rational]") {
    CHECK(rational(1, 2) + rational(1, 3) == rational(5, 6));
    CHECK(rational(1, 3) - rational(1, 2) == rational(-1, 6));
    CHECK(rational(2, 3) * rational(9, 4) == rational(3, 2));
    CHECK(rational(1, 2) / rational(1, 8) == rational(4));
    CHECK(-rational(1, 2) == rational(-1, 2));
    CHECK_THROWS_AS(rational(1, 2) / rational(0), madc::param_error);

    rational acc(0);
    for (int i = 0; i < 18; ++i) acc += rational(1, 18);
    CHECK(acc == rational(1));
}

TEST_CASE("rational ordering", "[rational]") {
    CHECK(rational(1, 3) < rational(1, 2));
    CHECK(rational(-1, 2) < rational(-1, 3));
    CHECK(rational(2, 4) <= rational(1, 2));
    CHECK(rational(5, 3) > rational(3, 2));
    CHECK(abs(rational(-3, 7)) == rational(3, 7));
}

TEST_CASE("rational string form", "[rational]") {
    CHECK(rational(1, 18).str() == "1/18");
    CHECK(rational(-1, 2).str() == "-1/2");
    CHECK(rational(7).str() == "7");
    CHECK(rational(0).str() == "0");
    CHECK(rational(1, 18).to_double() == Catch::Approx(1.0 / 18.0));
}

TEST_CASE("rational overflow is detected, not wrapped", "[rational]") {
    rational big(INT64_MAX, 1);
    CHECK_THROWS_AS(big + big, madc::overflow_error);
    CHECK_THROWS_AS(rational(1, INT64_MIN), madc::overflow_error);
}
