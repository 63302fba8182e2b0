#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "atlasforge/fintop.hpp"
#include "tests/fixture_spaces.hpp"

using namespace af;

// Independent oracle: a space is connected iff it has no proper clopen subset;
// enumerated straight from the open family.
static std::size_t component_count_oracle(const FinSpace& s) {
    if (s.size() == 0) return 0;
    // count components by splitting along clopen pieces recursively
    for (Mask u : s.opens()) {
        if (u == 0 || u == s.full_mask()) continue;
        if (s.is_open(s.full_mask() & ~u))
            return component_count_oracle(subspace(s, u)) + component_count_oracle(subspace(s, s.full_mask() & ~u));
    }
    return 1;
}

TEST_CASE("continuity by preimage enumeration") {
    FinSpace sierp = make_sierp();
    CHECK(is_continuous(identity_map(sierp)));

    FinSpace pc4 = make_pc4();
    // constant map to the closed point 0 of SIERP
    PointMap c(pc4.size(), static_cast<std::uint8_t>(sierp.point_index("0")));
    CHECK(is_continuous(pc4, sierp, c));

    // swap on SIERP: preimage of {1} is {0}, not open
    PointMap swap = {1, 0};
    int i1 = sierp.point_index("1");
    CHECK_FALSE(is_continuous(sierp, sierp, swap));
    // oracle: enumerate preimages of every open directly
    CMap f{sierp, sierp, swap};
    bool all_open = true;
    for (Mask v : sierp.opens())
        if (!sierp.is_open(f.preimage(v))) all_open = false;
    CHECK_FALSE(all_open);
    CHECK(i1 >= 0);
}

TEST_CASE("homeomorphisms") {
    FinSpace pc4 = make_pc4();
    CHECK(is_homeomorphism(identity_map(pc4)));

    // a<->b, c<->d is an automorphism of the pseudocircle
    PointMap swap(pc4.size());
    swap[pc4.point_index("a")] = static_cast<std::uint8_t>(pc4.point_index("b"));
    swap[pc4.point_index("b")] = static_cast<std::uint8_t>(pc4.point_index("a"));
    swap[pc4.point_index("c")] = static_cast<std::uint8_t>(pc4.point_index("d"));
    swap[pc4.point_index("d")] = static_cast<std::uint8_t>(pc4.point_index("c"));
    CMap f{pc4, pc4, swap};
    CHECK(is_homeomorphism(f));
    CHECK(is_homeomorphism(inverse(f)));

    FinSpace sierp = make_sierp();
    PointMap c(2, 0);
    CHECK_FALSE(is_homeomorphism(CMap{sierp, sierp, c}));
}

TEST_CASE("subspace") {
    FinSpace pc4 = make_pc4();
    Mask ab = mask_of(pc4, {"a", "b"});
    FinSpace sub = subspace(pc4, ab);
    CHECK(sub.size() == 2);
    CHECK(sub.opens().size() == 4);  // discrete

    CHECK(subspace(pc4, pc4.full_mask()) == pc4);
    FinSpace empty = subspace(pc4, 0);
    CHECK(empty.size() == 0);
    CHECK(empty.opens() == std::vector<Mask>{0});

    CHECK_THROWS_AS(subspace(sub, pc4.full_mask()), MalformedInput);
}

TEST_CASE("subspace transitivity") {
    FinSpace pc4 = make_pc4();
    Mask b = mask_of(pc4, {"a", "b", "c"});
    FinSpace sb = subspace(pc4, b);
    Mask a_in_b = mask_of(sb, {"a", "b"});
    CHECK(subspace(sb, a_in_b) == subspace(pc4, mask_of(pc4, {"a", "b"})));
}

TEST_CASE("products") {
    FinSpace sierp = make_sierp();
    FinSpace p = product(sierp, sierp);
    CHECK(p.size() == 4);
    CHECK(p.opens().size() == 6);

    FinSpace one({"x"}, {Mask(1)});
    FinSpace q = product(sierp, one);
    CHECK(q.size() == 2);
    CHECK(q.opens().size() == sierp.opens().size());

    FinSpace pc4 = make_pc4();
    FinSpace disc2 = make_disc2();
    FinSpace r = product(pc4, disc2);
    CHECK(r.size() == 8);
    // opens are unions of {open} x {subset}: up-sets of two disjoint copies
    CHECK(r.opens().size() == 49);
}

TEST_CASE("connected components against clopen oracle") {
    FinSpace pc4 = make_pc4();
    FinSpace disc2 = make_disc2();
    CHECK(connected_components(pc4).size() == 1);
    CHECK(connected_components(disc2).size() == 2);
    FinSpace pr = product(pc4, disc2);
    CHECK(connected_components(pr).size() == 2);

    for (const FinSpace* s : {&pc4, &disc2, &pr})
        CHECK(connected_components(*s).size() == component_count_oracle(*s));

    // component count of a product multiplies
    CHECK(connected_components(pr).size() ==
          connected_components(pc4).size() * connected_components(disc2).size());
}

TEST_CASE("composition of continuous maps is continuous on fixture pairs") {
    FinSpace sierp = make_sierp();
    FinSpace pc4 = make_pc4();
    auto maps1 = continuous_maps_between(pc4, pc4.full_mask(), sierp, sierp.full_mask());
    auto maps2 = continuous_maps_between(sierp, sierp.full_mask(), sierp, sierp.full_mask());
    for (const auto& f : maps1)
        for (const auto& g : maps2) {
            CMap cf{pc4, sierp, f}, cg{sierp, sierp, g};
            CHECK(is_continuous(compose(cg, cf)));
        }
}

TEST_CASE("malformed maps are rejected") {
    FinSpace sierp = make_sierp();
    PointMap bad = {0};  // not total
    CHECK_THROWS_AS(is_continuous(sierp, sierp, bad), MalformedInput);
    PointMap oob = {0, 7};
    CHECK_THROWS_AS(is_continuous(sierp, sierp, oob), MalformedInput);
}
