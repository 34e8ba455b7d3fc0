#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "ringq/arrows.hpp"

using namespace ringq;

TEST_CASE("construction and counts") {
    ArrowState a(3);
    CHECK(a.n() == 3);
    CHECK(a.total() == 0);
    a.set(2, 4);
    CHECK(a.at(2) == 4);
    CHECK(a.total() == 4);
    a.add(2, -1);
    CHECK(a.at(2) == 3);
    CHECK_THROWS_AS(a.set(2, -1), std::domain_error);
    CHECK_THROWS_AS(a.at(4), std::domain_error);

    ArrowState b{1, 0, 2};
    CHECK(b.at(1) == 1);
    CHECK(b.at(3) == 2);
    CHECK(b.range_total(1, 2) == 1);
    CHECK(b.range_total(2, 3) == 2);
}

TEST_CASE("unit states") {
    ArrowState e0 = ArrowState::unit(2, 0);
    CHECK(e0 == ArrowState(2));
    ArrowState e2 = ArrowState::unit(2, 2);
    CHECK(e2.at(2) == 1);
    CHECK(e2.total() == 1);
    CHECK_THROWS_AS(ArrowState::unit(2, 3), std::domain_error);
}

TEST_CASE("saturated coordinate is a sum type, not a sentinel") {
    ArrowState a = ArrowState::with_saturation(ArrowState{5, 7}, 1);
    CHECK(a.is_saturated(1));
    CHECK_FALSE(a.finite());
    CHECK(a.at(2) == 7);
    CHECK_THROWS_AS(a.at(1), std::domain_error);
    CHECK_THROWS_AS(a.set(1, 3), std::domain_error);
    CHECK_THROWS_AS(a.total(), std::domain_error);
    CHECK_THROWS_AS(a.range_total(1, 2), std::domain_error);
    CHECK(a.range_total(2, 2) == 7);
    CHECK(a.str() == "(inf,7)");
}

TEST_CASE("sum and difference") {
    ArrowState a{1, 2}, b{0, 3};
    CHECK((a + b) == ArrowState{1, 5});
    CHECK(*sub(a + b, b) == a);
    CHECK_FALSE(sub(a, b).has_value());
}

TEST_CASE("state enumeration") {
    auto all = all_states(2, 2);
    CHECK(all.size() == 9);
    auto box = box_states({1, 2, 0});
    CHECK(box.size() == 6);
    for (const auto& s : box) {
        CHECK(s.at(1) <= 1);
        CHECK(s.at(2) <= 2);
        CHECK(s.at(3) == 0);
    }
}

TEST_CASE("ordered splittings") {
    ArrowState t{1, 2};
    auto pairs = split_pairs(t);
    CHECK(pairs.size() == 6);
    for (const auto& [c, d] : pairs) CHECK(c + d == t);
}
