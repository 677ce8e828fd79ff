#include "cantor/measures.hpp"
#include "generated_measures.hpp"

#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

using namespace cantor;

namespace {

std::uint64_t brute_granularity(const MeasureTree& t, std::uint64_t n) {
    for (std::size_t l = 0; l <= t.depth(); ++l) {
        bool all = true;
        for (const auto& s : all_strings(l)) all = all && t.get(s) < Dyadic::pow2neg(n);
        if (all) return l;
    }
    throw NotFound("brute");
}

MeasureTree lebesgue_tree(std::size_t d) { return tree_from_oracle(measures::lebesgue(), d); }

bool no_double_zero(const BitString& s) { return s.find("00") == std::string::npos; }

}  // namespace

TEST_CASE("tree_validate") {
    CHECK(bool(tree_validate(lebesgue_tree(8))));
    MeasureTree bad(1);
    bad.set("", Dyadic(1));
    bad.set("0", Dyadic(1, 1));
    bad.set("1", Dyadic(1, 2));
    auto r = tree_validate(bad);
    CHECK_FALSE(r.ok);
    CHECK(r.offender.value().empty());
    MeasureTree neg(1);
    neg.set("", Dyadic(1));
    neg.set("0", Dyadic(3, 1));
    neg.set("1", Dyadic(-1, 1));
    CHECK_FALSE(tree_validate(neg).ok);
    MeasureTree noroot(1);
    CHECK_FALSE(tree_validate(noroot).ok);
}

TEST_CASE("cylinder_measure") {
    for (std::uint64_t i : {0, 5, 40}) CHECK(cylinder_measure(measures::lebesgue(), "010", i) == Dyadic(1, 3));
    auto pm = measures::point_mass_zeros();
    for (std::size_t k = 0; k < 20; ++k) CHECK(cylinder_measure(pm, BitString(k, '0'), 3) == Dyadic(1));
    CHECK(cylinder_measure(pm, "001", 3).is_zero());
}

TEST_CASE("tree-backed oracle extension rules") {
    MeasureTree t = lebesgue_tree(3);
    auto err = oracle_from_tree(t);
    CHECK(err.approx("010", 0) == Dyadic(1, 3));
    CHECK_THROWS_AS(err.approx("0101", 0), DepthExceeded);
    auto uni = oracle_from_tree(t, Extension::uniform_split);
    CHECK(uni.approx("01011", 0) == Dyadic(1, 5));
    CHECK(uni.level_max(6, 0) == Dyadic(1, 6));
    auto fz = oracle_from_tree(t, Extension::follow_zeros);
    CHECK(fz.approx("01000", 0) == Dyadic(1, 3));
    CHECK(fz.approx("01001", 0).is_zero());
    CHECK(bool(tree_validate(tree_from_oracle(fz, 7))));
}

TEST_CASE("granularity_exact") {
    MeasureTree leb = lebesgue_tree(16);
    CHECK(granularity_exact(leb, 5) == 6);
    CHECK(granularity_exact(leb, 0) == 1);
    for (std::uint64_t n = 0; n <= 12; ++n) {
        CHECK(granularity_exact(leb, n) == brute_granularity(leb, n));
        CHECK(granularity_exact(leb, n + 1) >= granularity_exact(leb, n) + 1);
    }
    MeasureTree pm = tree_from_oracle(measures::point_mass_zeros(), 12);
    CHECK_THROWS_AS(granularity_exact(pm, 1), NotFound);
    for (auto t : {generated::jitter(1), generated::skewed_levels(2), generated::tilted()})
        for (std::uint64_t n = 0; n <= 14; ++n) CHECK(granularity_exact(t, n) == brute_granularity(t, n));
}

TEST_CASE("pairing") {
    for (std::uint64_t c = 0; c < 5000; ++c) {
        auto [k, s] = unpair_code(c);
        CHECK(pair_code(k, s) == c);
    }
    CHECK(pair_code(0, 0) == 0);
    CHECK(pair_code(1, 0) == 1);
    CHECK(pair_code(0, 1) == 2);
}

TEST_CASE("granularity_sandwich") {
    auto leb = measures::lebesgue();
    std::uint64_t f5 = granularity_sandwich(leb, 5, 100000);
    CHECK((f5 == 6 || f5 == 7));
    MeasureTree lt = lebesgue_tree(16);
    for (std::uint64_t n = 0; n <= 10; ++n) {
        std::uint64_t f = granularity_sandwich(leb, n, 100000);
        CHECK(granularity_exact(lt, n) <= f);
        CHECK(f < granularity_exact(lt, n + 2));
    }
    CHECK_THROWS_AS(granularity_sandwich(measures::point_mass_zeros(), 1, 10000), BudgetExhausted);
    for (auto t : {generated::jitter(5), generated::skewed_levels(6), generated::tilted()}) {
        auto o = oracle_from_tree(t, Extension::uniform_split);
        for (std::uint64_t n = 0; n <= 12; ++n) {
            std::uint64_t f = granularity_sandwich(o, n, 100000);
            CHECK(granularity_exact(t, n) <= f);
            CHECK(f < granularity_exact(t, n + 2));
        }
    }
}

TEST_CASE("sandwich without a level fast path") {
    auto leb = measures::lebesgue();
    leb.level_max = nullptr;
    MeasureTree lt = lebesgue_tree(12);
    for (std::uint64_t n = 0; n <= 8; ++n) {
        std::uint64_t f = granularity_sandwich(leb, n, 100000);
        CHECK(granularity_exact(lt, n) <= f);
        CHECK(f < granularity_exact(lt, n + 2));
    }
}

TEST_CASE("local_granularity") {
    auto leb = measures::lebesgue();
    CHECK(local_granularity(leb, "0110100110", 4) == 5);
    auto quarter = measures::bernoulli(Dyadic(1, 2));  // P(1) = 1/4
    CHECK(quarter.approx("11", 0) == Dyadic(1, 4));
    CHECK(local_granularity(quarter, BitString(10, '1'), 6) == 4);
    CHECK_THROWS_AS(local_granularity(measures::point_mass_zeros(), BitString(40, '0'), 1), DepthExceeded);
}

TEST_CASE("local_granularity_bound_check") {
    auto leb = measures::lebesgue();
    BitString X = "01101001100101101001011001101001";
    CHECK(local_granularity_bound_check(leb, X, orders::from_function([](std::uint64_t n) { return n == 0 ? 0 : n + 1; }), 0, 10) == false);
    CHECK(local_granularity_bound_check(leb, X, orders::identity(), 1, 10));
    CHECK_FALSE(local_granularity_bound_check(leb, X, orders::linear(1, 2), 0, 10));
    CHECK_FALSE(local_granularity_bound_check(leb, X, orders::identity(), 0, 10));
}

TEST_CASE("remove_atoms") {
    auto leb = measures::lebesgue();
    auto same = remove_atoms(leb, [](const BitString&) { return true; });
    for (const auto& s : all_strings(6)) CHECK(same.approx(s, 0) == leb.approx(s, 0));

    auto nu = remove_atoms(measures::point_mass_zeros(), no_double_zero);
    CHECK(nu.approx("0", 0) == Dyadic(1));
    CHECK(nu.approx("00", 0) == Dyadic(1));
    for (std::size_t k = 2; k <= 16; ++k) CHECK(nu.approx(BitString(k, '0'), 0) == Dyadic::pow2neg(k - 2));
    MeasureTree t = tree_from_oracle(nu, 14);
    CHECK(bool(tree_validate(t)));
    for (std::size_t k = 1; k <= 10; ++k)
        for (const auto& s : all_strings(k)) {
            if (no_double_zero(s)) CHECK(t.get(s) == measures::point_mass_zeros().approx(s, 0));
            else if (!no_double_zero(parent(s))) CHECK(t.get(s) == t.get(parent(s)).half());
        }
    CHECK_FALSE(downward_closure_violation(no_double_zero, 8).has_value());
    auto odd = [](const BitString& s) { return s != "0"; };
    CHECK(downward_closure_violation(odd, 4).has_value());
    auto bad = remove_atoms(leb, odd);
    CHECK_THROWS_AS(bad.approx("00", 0), InvariantViolation);
}

TEST_CASE("global_complexity_bound") {
    MeasureTree lt = lebesgue_tree(16);
    Order h = global_complexity_bound(measures::lebesgue(), 100000);
    for (std::uint64_t n = 1; n <= 12; ++n) {
        std::uint64_t gi = n - 1;
        std::uint64_t k = 0;
        while (granularity_exact(lt, k) < n) ++k;
        CHECK(k == gi);
        CHECK(h(n) + 2 >= gi);
        CHECK(h(n) <= gi);
    }
    Order hp = global_complexity_bound(measures::point_mass_zeros(), 2000);
    CHECK_THROWS_AS(hp(3), BudgetExhausted);
}

TEST_CASE("noncomputable granularity measure") {
    auto never = noncomputable_granularity_measure([](std::uint64_t) { return std::nullopt; });
    MeasureTree tn = tree_from_oracle(never, 14, kFinalStage);
    CHECK(bool(tree_validate(tn)));
    for (std::uint64_t n = 1; n <= 6; ++n) CHECK(granularity_exact(tn, n) == 2 * n + 1);

    auto halts = noncomputable_granularity_measure([](std::uint64_t n) { return std::optional<std::uint64_t>(n + 3); });
    MeasureTree th = tree_from_oracle(halts, 14, kFinalStage);
    CHECK(bool(tree_validate(th)));
    for (std::uint64_t n = 1; n <= 7; ++n) CHECK(granularity_exact(th, n) == 2 * n);

    auto mixed_stub = [](std::uint64_t n) -> std::optional<std::uint64_t> {
        if (n % 3 == 0) return std::nullopt;
        return n % 3 == 1 ? 1 : 3 * n;
    };
    auto mixed = noncomputable_granularity_measure(mixed_stub);
    MeasureTree tm = tree_from_oracle(mixed, 12, kFinalStage);
    CHECK(bool(tree_validate(tm)));
    for (std::uint64_t n = 1; n <= 5; ++n) CHECK(granularity_exact(tm, n) == (mixed_stub(n) ? 2 * n : 2 * n + 1));

    // Stage approximations are within 2^-s of the limit and consistent across stages.
    for (std::uint64_t s = 0; s <= 20; ++s)
        for (std::size_t k = 0; k <= 8; ++k)
            for (const auto& sigma : all_strings(k)) {
                Dyadic lim = mixed.approx(sigma, kFinalStage);
                Dyadic a = mixed.approx(sigma, s), b = mixed.approx(sigma, s + 1);
                Dyadic d = a > lim ? a - lim : lim - a;
                CHECK(d <= Dyadic::pow2neg(s));
                Dyadic e = a > b ? a - b : b - a;
                CHECK(e <= Dyadic::pow2neg(s) + Dyadic::pow2neg(s + 1));
            }

    auto zero = noncomputable_granularity_measure([](std::uint64_t) { return std::optional<std::uint64_t>(0); });
    CHECK_THROWS_AS(zero.approx("11", 5), InvariantViolation);
}

TEST_CASE("ml_test_margin") {
    StagedOpenSet u;
    auto leb = measures::lebesgue();
    CHECK(ml_test_margin(u, leb, 2, 0).is_zero());
    u.stages[{3, 0}] = {"000"};
    CHECK(ml_test_margin(u, leb, 3, 0) == Dyadic::pow2neg(3));
    u.stages[{0, 1}] = {"00", "01", "10"};
    CHECK(ml_test_margin(u, leb, 0, 1) == Dyadic(3, 2));
    u.stages[{0, 2}] = {"0", "10"};
    CHECK_FALSE(staged_open_set_violation(u).has_value());
    u.stages[{0, 3}] = {"0"};
    CHECK(staged_open_set_violation(u).has_value());
    StagedOpenSet bad;
    bad.stages[{1, 0}] = {"0", "01"};
    CHECK_THROWS_AS(ml_test_margin(bad, leb, 1, 0), InvariantViolation);
    CHECK(staged_open_set_violation(bad).has_value());
}

TEST_CASE("mltest text round trip") {
    StagedOpenSet u;
    u.stages[{0, 1}] = {"00", "01"};
    u.stages[{2, 5}] = {""};
    std::stringstream ss;
    write_mltest(ss, u);
    CHECK(ss.str() == "mltest v1\ni=0 s=1 00\ni=0 s=1 01\ni=2 s=5 -\n");
    StagedOpenSet v = read_mltest(ss);
    CHECK(v.stages == u.stages);
    std::istringstream bad("mltest v1\ni=x s=1 0\n");
    CHECK_THROWS_AS(read_mltest(bad), ParseError);
}

TEST_CASE("triviality_mass") {
    MeasureTree pm = tree_from_oracle(measures::point_mass_zeros(), 10);
    auto r = triviality_mass(pm, Dyadic(1, 1));
    CHECK(r.lower == Dyadic(1));
    REQUIRE(r.candidates.size() == 1);
    CHECK(r.candidates[0] == BitString(10, '0'));
    auto l = triviality_mass(lebesgue_tree(10), Dyadic::pow2neg(11));
    CHECK(l.lower.is_zero());
    CHECK(l.candidates.empty());
}

TEST_CASE("measure tree text round trip") {
    MeasureTree t = generated::skewed_levels(9, 6);
    std::string text = tree_to_string(t);
    MeasureTree u = tree_from_string(text);
    CHECK(u == t);
    CHECK(tree_to_string(u) == text);
    CHECK(text.rfind("measuretree v1 depth=6\n- 1/2^0\n0 ", 0) == 0);
    CHECK_THROWS_AS(tree_from_string("measuretree v2 depth=3\n"), ParseError);
    CHECK_THROWS_AS(tree_from_string("measuretree v1 depth=3\n- 1/3\n"), ParseError);
    CHECK_THROWS_AS(tree_from_string("measuretree v1 depth=3\n0 1/2^1\n- 1\n"), ParseError);
    CHECK_THROWS_AS(tree_from_string("measuretree v1 depth=1\n000 1\n"), ParseError);
}
