#include <doctest.h>

#include <algorithm>

#include "lexsimp/ensemble.hpp"
#include "lexsimp/errors.hpp"
#include "oracles.hpp"

using namespace lexsimp;
using namespace lexsimp::ensemble;
using L = std::vector<CandidateList>;

TEST_SUITE("ensemble") {

TEST_CASE("position score") {
    CHECK(position_score(0) == 5.0);
    CHECK(position_score(9) == 0.5);
    CHECK(position_score(10) == 0.0);
    CHECK(position_score(25) == 0.0);
}

TEST_CASE("combine_score hand examples") {
    const L same{{"r", "s"}, {"r"}, {"r", "t"}};
    const auto out = combine_score(same);
    REQUIRE(out.size() == 3);
    CHECK(out[0] == ScoredCandidate{"r", 15.0});

    CandidateList deep;
    for (int i = 0; i < 9; ++i) deep.push_back("f" + std::to_string(i));
    deep.push_back("r");
    const auto single = combine_score(L{deep, {}, {}});
    const auto it = std::find_if(single.begin(), single.end(), [](const auto& c) { return c.text == "r"; });
    REQUIRE(it != single.end());
    CHECK(it->score == 0.5);

    const auto none = combine_score(L{{"a"}, {"b"}, {}});
    CHECK(std::none_of(none.begin(), none.end(), [](const auto& c) { return c.text == "z"; }));
    CHECK(combine_score(L{}).empty());
}

TEST_CASE("combine_score normalizes, keeps first surface and truncates to k") {
    const auto out = combine_score(L{{" Big ", "huge"}, {"big", "BIG", "large"}}, 2);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == ScoredCandidate{"Big", 10.0});
    CHECK(out[1] == ScoredCandidate{"huge", 4.5});
}

TEST_CASE("combine_score ties: best index then text") {
    // a: 5 + 0 (index 0, index 10) ; b: 4.5 + 0.5 -> both 5.0, a has best index 0.
    CandidateList l1{"a", "b"};
    CandidateList l2;
    for (int i = 0; i < 9; ++i) l2.push_back("p" + std::to_string(i));
    l2.push_back("b");
    const auto out = combine_score(L{l1, l2});
    const auto pos = [&](const std::string& t) {
        return std::find_if(out.begin(), out.end(), [&](const auto& c) { return c.text == t; }) - out.begin();
    };
    CHECK(out[pos("a")].score == out[pos("b")].score);
    CHECK(pos("a") < pos("b"));
    // p0 ties with a on score and best index; the text decides.
    CHECK(pos("a") < pos("p0"));
    const auto alpha = combine_score(L{{"zeta"}, {"alpha"}});
    CHECK(alpha[0].text == "alpha");
}

TEST_CASE("property: combine_score matches the brute-force oracle") {
    oracle::Rng rng(101);
    for (int trial = 0; trial < 300; ++trial) {
        L lists{oracle::random_list(rng), oracle::random_list(rng), oracle::random_list(rng)};
        const auto k = rng.between(1, 14);
        const auto got = combine_score(lists, k);
        const auto want = oracle::combine_score(lists, k);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].text == want[i].surface);
            CHECK(got[i].score == want[i].score);
        }
    }
}

TEST_CASE("property: combine_score is invariant under list permutation") {
    oracle::Rng rng(102);
    for (int trial = 0; trial < 200; ++trial) {
        // Surfaces are case-stable here so first-occurrence spelling cannot differ.
        L lists;
        for (int i = 0; i < 3; ++i) lists.push_back(oracle::distinct_keys(oracle::random_list(rng)));
        const auto base = combine_score(lists);
        std::swap(lists[0], lists[2]);
        CHECK(combine_score(lists) == base);
        std::swap(lists[0], lists[1]);
        CHECK(combine_score(lists) == base);
    }
}

TEST_CASE("majority_elements examples") {
    const L sets{{"a", "b"}, {"a", "c"}, {"d"}};
    CHECK(majority_elements(sets, {3, 2}) == std::vector<std::string>{"a"});
    CHECK(majority_elements(sets, {3, 1}) == std::vector<std::string>{"a", "b", "c", "d"});
    CHECK(majority_elements(L{{"x", "y"}, {"y", "x"}, {"Y"}}, {3, 3}) == std::vector<std::string>{"y"});
    CHECK_THROWS_AS(majority_elements(sets, {2, 1}), ArityError);
    CHECK_THROWS_AS(majority_elements(sets, {3, 4}), ConfigError);
    CHECK_THROWS_AS(majority_elements(sets, {3, 0}), ConfigError);
}

TEST_CASE("vote_rank examples") {
    const auto out = vote_rank(L{{"x", "y"}, {"x"}, {"y", "x"}}, {3, 2});
    REQUIRE(out.size() == 2);
    CHECK(out[0] == RankedCandidate{"x", 3, 0});
    CHECK(out[1] == RankedCandidate{"y", 2, 0});
    CHECK(vote_rank(L{{}, {}, {}}, {3, 2}).empty());
    const auto dup = vote_rank(L{{"a", "a", "A"}, {"b"}, {"c"}}, {3, 1});
    CHECK(dup[0] == RankedCandidate{"a", 1, 0});
    CHECK_THROWS_AS(vote_rank(L{{"a"}}, {3, 2}), ArityError);
}

TEST_CASE("property: voting matches enumeration oracles and is monotone in m") {
    oracle::Rng rng(103);
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = rng.between(1, 6);
        L lists;
        for (std::size_t i = 0; i < n; ++i) lists.push_back(oracle::random_list(rng, 8, 10));
        std::size_t previous = SIZE_MAX;
        for (std::size_t m = 1; m <= n; ++m) {
            const auto maj = majority_elements(lists, {n, m});
            CHECK(maj == oracle::majority_elements(lists, m));
            CHECK(maj.size() <= previous);
            previous = maj.size();

            const auto ranked = vote_rank(lists, {n, m});
            const auto want = oracle::vote_rank(lists, m);
            REQUIRE(ranked.size() == want.size());
            for (std::size_t i = 0; i < ranked.size(); ++i) {
                CHECK(ranked[i].text == want[i].surface);
                CHECK(ranked[i].votes == want[i].lists);
                CHECK(ranked[i].best_index == want[i].best);
                CHECK(ranked[i].votes >= m);
                if (i > 0) CHECK(ranked[i - 1].votes >= ranked[i].votes);
            }
        }
    }
}

TEST_CASE("vote config validation") {
    CHECK_NOTHROW((VoteConfig{3, 2}.validate()));
    CHECK_NOTHROW((VoteConfig{1, 1}.validate()));
    CHECK_THROWS_AS((VoteConfig{0, 0}.validate()), ConfigError);
    CHECK_THROWS_AS((VoteConfig{2, 3}.validate()), ConfigError);
}

}
