#include "cantor/bitstring.hpp"
#include "cantor/dyadic.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <catch_amalgamated.hpp>

#include <random>

using namespace cantor;
using Rational = boost::multiprecision::cpp_rational;

namespace {

Rational as_rational(const Dyadic& d) {
    return Rational(d.numerator()) / Rational(BigInt(1) << d.exponent());
}

Dyadic random_dyadic(std::mt19937_64& rng) {
    std::uniform_int_distribution<long long> num(-1000000, 1000000);
    std::uniform_int_distribution<int> ex(0, 90);
    return Dyadic(BigInt(num(rng)), ex(rng));
}

}  // namespace

TEST_CASE("dyadic addition") {
    CHECK(Dyadic(1, 1) + Dyadic(1, 1) == Dyadic(1));
    CHECK(Dyadic(1, 2) + Dyadic(1, 3) == Dyadic(3, 3));
    Dyadic z = Dyadic(3, 3) + Dyadic(-3, 3);
    CHECK(z.is_zero());
    CHECK(z.exponent() == 0);
    CHECK((Dyadic(1, 2) + Dyadic(1, 3)).str() == "3/2^3");
}

TEST_CASE("dyadic comparison") {
    CHECK(dyadic_cmp(Dyadic(1, 1), Dyadic(1, 1)) == std::strong_ordering::equal);
    CHECK(dyadic_cmp(Dyadic(1, 2), Dyadic(3, 3)) == std::strong_ordering::less);
    CHECK(dyadic_cmp(Dyadic(1), Dyadic::pow2neg(20)) == std::strong_ordering::greater);
    CHECK(Dyadic(-1, 1) < Dyadic());
}

TEST_CASE("canonical form") {
    Dyadic a(BigInt(12), 5);
    CHECK(a.numerator() == 3);
    CHECK(a.exponent() == 3);
    CHECK(Dyadic(BigInt(0), 17).exponent() == 0);
    CHECK(Dyadic(BigInt(-8), 2) == Dyadic(-2));
    Dyadic b(a.numerator(), a.exponent());
    CHECK(b == a);
}

TEST_CASE("ceil_neg_log2") {
    CHECK(ceil_neg_log2(Dyadic(1, 3)) == 3);
    CHECK(ceil_neg_log2(Dyadic(3, 3)) == 2);
    CHECK(ceil_neg_log2(Dyadic(1)) == 0);
    CHECK(ceil_neg_log2(Dyadic(5, 4)) == 2);
    CHECK_THROWS_AS(ceil_neg_log2(Dyadic()), std::domain_error);
    CHECK_THROWS_AS(ceil_neg_log2(Dyadic(3, 1)), std::domain_error);
    CHECK_THROWS_AS(ceil_neg_log2(Dyadic(-1, 2)), std::domain_error);
    for (std::uint64_t n = 0; n < 300; ++n) CHECK(ceil_neg_log2(Dyadic::pow2neg(n)) == n);
}

TEST_CASE("ceil_neg_log2 agrees with a scan over powers of two") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        std::uint64_t e = rng() % 70;
        BigInt num = BigInt(1) + BigInt(rng() % ((std::uint64_t{1} << (e < 62 ? e : 62)) + 0));
        if (num > (BigInt(1) << e)) num = BigInt(1) << e;
        Dyadic q(num, e);
        std::uint64_t n = 0;
        while (!(Dyadic::pow2neg(n) <= q)) ++n;
        CHECK(ceil_neg_log2(q) == n);
    }
}

TEST_CASE("arithmetic matches rational oracle") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 1000; ++trial) {
        Dyadic a = random_dyadic(rng), b = random_dyadic(rng), c = random_dyadic(rng);
        CHECK(as_rational(a + b) == as_rational(a) + as_rational(b));
        CHECK(as_rational(a * b) == as_rational(a) * as_rational(b));
        CHECK((a + b) + c == a + (b + c));
        CHECK(a + b == b + a);
        bool lt = as_rational(a) < as_rational(b);
        CHECK((a < b) == lt);
        Dyadic s = a + b;
        CHECK((s.is_zero() ? s.exponent() == 0 : (s.exponent() == 0 || s.numerator() % 2 != 0)));
    }
}

TEST_CASE("dyadic text round trip") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        Dyadic a = random_dyadic(rng);
        CHECK(Dyadic::parse(a.str()) == a);
    }
    CHECK(Dyadic::parse("6/2^3") == Dyadic(3, 2));
    CHECK(Dyadic::parse("1") == Dyadic(1));
    CHECK_THROWS(Dyadic::parse("1/3"));
    CHECK_THROWS(Dyadic::parse("x/2^3"));
    CHECK_THROWS(Dyadic::parse("1/2^"));
}

TEST_CASE("bit strings") {
    CHECK(render_bits("") == "-");
    CHECK(parse_bits("-").empty());
    CHECK(parse_bits("0110") == "0110");
    CHECK_THROWS(parse_bits("012"));
    CHECK(is_prefix("01", "011"));
    CHECK_FALSE(is_prefix("011", "01"));
    CHECK(comparable("", "1"));
    CHECK_FALSE(comparable("00", "01"));
    CHECK(nth_string(5, 4) == "0101");
    CHECK(string_index("0101") == 5);
    CHECK(all_strings(3).size() == 8);
    CHECK(shortlex_less("1", "00"));
    CHECK(shortlex_less("00", "01"));
}
