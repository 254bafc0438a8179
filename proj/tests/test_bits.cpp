#include <catch2/catch_amalgamated.hpp>

#include "madc/bits.hpp"

using madc::bit_vector;

TEST_CASE("bit_vector stores bits most significant first", "[bits]") {
    bit_vector v(8);
    v.set_bit(0, true);
    CHECK(v.bytes()[0] == 0x80);
    v.set_bit(7, true);
    CHECK(v.to_hex() == "81");
    CHECK(v.bit(0));
    CHECK_FALSE(v.bit(1));
    CHECK_THROWS_AS(v.bit(8), madc::param_error);
    CHECK_THROWS_AS(v.set_bit(8, true), madc::param_error);
}

TEST_CASE("bit_vector xor", "[bits]") {
    bit_vector a = bit_vector::from_bytes({0xa5, 0x0f}, 16);
    bit_vector b = bit_vector::from_bytes({0xff, 0xf0}, 16);
    CHECK((a ^ b).to_hex() == "5aff");
    CHECK((a ^ a).all_zero());
    bit_vector c(8);
    CHECK_THROWS_AS(a ^= c, madc::param_error);
}

TEST_CASE("bit_vector slice", "[bits]") {
    bit_vector v = bit_vector::from_bytes({0xab, 0xcd}, 16);
    CHECK(v.slice(0, 8).to_hex() == "ab");
    CHECK(v.slice(8, 8).to_hex() == "cd");
    CHECK(v.slice(4, 8).to_hex() == "bc");
    CHECK(v.slice(0, 16) == v);
    CHECK(v.slice(3, 0).size() == 0);
    CHECK_THROWS_AS(v.slice(9, 8), madc::param_error);
}

TEST_CASE("bit_vector append and slice round-trip", "[bits]") {
    bit_vector a = bit_vector::from_bytes({0xab, 0xc0}, 12);
    bit_vector b = bit_vector::from_bytes({0xa8}, 5);
    bit_vector joined = a;
    joined.append(b);
    CHECK(joined.size() == 17);
    CHECK(joined.slice(0, 12) == a);
    CHECK(joined.slice(12, 5) == b);

    bit_vector whole;
    whole.append(bit_vector::from_bytes({0x12}, 8));
    whole.append(bit_vector::from_bytes({0x34}, 8));
    CHECK(whole.to_hex() == "1234");
}

TEST_CASE("bit_vector keeps unused tail bits zeroed", "[bits]") {
    bit_vector v = bit_vector::from_bytes({0xff}, 5);
    CHECK(v.to_hex() == "f8");
    bit_vector w(5);
    for (std::size_t i = 0; i < 5; ++i) w.set_bit(i, true);
    CHECK(v == w);
    CHECK_THROWS_AS(bit_vector::from_bytes({0xff, 0xff}, 5), madc::param_error);
}
