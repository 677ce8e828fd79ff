#include "cantor/orders.hpp"
#include "staircase.hpp"

#include <catch_amalgamated.hpp>

using namespace cantor;

TEST_CASE("order construction rejects g(0) != 0") {
    CHECK_THROWS_AS(Order([](std::uint64_t n) { return n + 1; }, [](std::uint64_t n) { return n; }), OrderError);
    CHECK_THROWS_AS(orders::table({1, 2, 3}), OrderError);
    CHECK_THROWS_AS(orders::table({0, 2, 1}), OrderError);
}

TEST_CASE("order_inverse examples") {
    Order id = order_inverse(orders::identity());
    for (std::uint64_t n = 0; n <= 100; ++n) CHECK(id(n) == n);
    Order dbl = order_inverse(orders::linear(2));
    for (std::uint64_t n = 0; n <= 100; ++n) CHECK(dbl(n) == (n + 1) / 2);
    Order flat = orders::from_function([](std::uint64_t k) { return k < 4 ? 0 : k - 3; });
    CHECK(order_inverse(flat)(1) == 4);
}

TEST_CASE("inverse is a Galois adjoint") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        Order g = orders::table(staircase::rising(rng, 100, 3));
        Order gi = order_inverse(g);
        gi.validate(64);
        for (std::uint64_t n = 0; n <= 64; ++n) {
            std::uint64_t k = gi(n);
            CHECK(k == staircase::brute_inverse(g, n));
            CHECK(g(k) >= n);
            CHECK((k == 0 || g(k - 1) < n));
        }
    }
}

TEST_CASE("check_inverse_sandwich") {
    Order id = orders::identity();
    CHECK(bool(check_inverse_sandwich(id, id, 2, 50)));
    CHECK(check_inverse_sandwich(id, id, 2, 50).hypothesis);
    Order flat = orders::table({0, 0, 0, 1, 1, 2});
    auto r = check_inverse_sandwich(flat, flat, 1, 20);
    CHECK(bool(r));
    CHECK_FALSE(r.hypothesis);
    CHECK(r.hypothesis_failure.value() == 0);

    // f = 3n against g = n violates both hypothesis and conclusion for c = 1.
    auto bad = check_inverse_sandwich(orders::linear(3), id, 1, 20);
    CHECK_FALSE(bad.hypothesis);
    CHECK_FALSE(bad.conclusion);
}

TEST_CASE("check_inverse_shift") {
    Order id = orders::identity();
    CHECK(check_inverse_shift(id, id, 0, 64).hypothesis);
    CHECK(bool(check_inverse_shift(id, id, 0, 64)));
    Order plus_one = orders::from_function([](std::uint64_t n) { return n == 0 ? 0 : n + 1; });
    CHECK_FALSE(check_inverse_shift(plus_one, id, 0, 64).hypothesis);
    auto r = check_inverse_shift(plus_one, id, 1, 64);
    CHECK(r.hypothesis);
    CHECK(r.conclusion);
}

TEST_CASE("order lemmas on random staircases") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        auto p = staircase::sandwich_pair(rng);
        auto r = check_inverse_sandwich(orders::table(p.f), orders::table(p.g), p.c, 64);
        CHECK(r.hypothesis);
        CHECK(r.conclusion);
        auto q = staircase::shift_pair(rng);
        auto s = check_inverse_shift(orders::table(q.f), orders::table(q.g), q.c, 64);
        CHECK(s.hypothesis);
        CHECK(s.conclusion);
    }
}

TEST_CASE("finite_domination") {
    Order id = orders::identity();
    CHECK(finite_domination(id, id, 0, 100));
    CHECK(finite_domination(id, orders::linear(2), 1, 100));
    CHECK_FALSE(finite_domination(orders::linear(2), id, 1, 100));
    CHECK_THROWS(finite_domination(id, id, 5, 1));
}

TEST_CASE("order text forms") {
    CHECK(parse_order("order:identity")(7) == 7);
    CHECK(parse_order("order:linear:3")(7) == 21);
    CHECK(parse_order("order:linear:1,2")(7) == 3);
    Order lg = parse_order("order:log2floor+");
    CHECK(lg(0) == 0);
    CHECK(lg(1) == 1);
    CHECK(lg(6) == 2);
    CHECK(lg(7) == 3);
    lg.validate(60);
    Order t = parse_order("order:table:0,1,1,4");
    CHECK(t(3) == 4);
    CHECK(t(5) == 10);
    t.validate(50);
    CHECK_THROWS_AS(parse_order("order:cubic"), OrderError);
    CHECK_THROWS_AS(parse_order("order:linear:x"), OrderError);
    CHECK_THROWS_AS(parse_order("order:table:1,2"), OrderError);
}
