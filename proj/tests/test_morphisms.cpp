#include <doctest.h>

#include "atlasforge/morphisms.hpp"
#include "tests/fixture_atlases.hpp"

using namespace af;

namespace {

AtlasTriple fixture() { return make_pc4_atlas(); }
AtlasTriple closure() { return maximal_closure(make_pc4_atlas(), Budget{}, ExecMode::Serial); }

AtlasMorphism pair_morphism(const AtlasTriple& src, const AtlasTriple& dst, const PointMap& f0,
                            const PointMap& f1) {
    AtlasMorphism m;
    m.source = src;
    m.target = dst;
    m.f0 = f0;
    m.f1 = f1;
    return m;
}

}  // namespace

TEST_CASE("identity on the maximal closure is near, morphism, semi-strict, strict") {
    AtlasTriple c = closure();
    AtlasMorphism id = identity_morphism(c);
    MorphismClassification cls = classify(id);
    CHECK(cls.model_functions);
    CHECK(cls.near);
    CHECK(cls.morphism);
    CHECK(cls.semi_strict);
    CHECK(cls.strict);
    CHECK(cls.constrained);
}

TEST_CASE("identity on the plain fixture atlas is near but not a morphism") {
    AtlasTriple a = fixture();
    AtlasMorphism id = identity_morphism(a);
    MorphismClassification cls = classify(id);
    CHECK(cls.near);
    CHECK_FALSE(cls.morphism);  // the two-chart atlas has no subcharts to witness Def 11.4
    CHECK(cls.semi_strict);
}

TEST_CASE("identity into the maximal closure") {
    AtlasTriple a = fixture();
    AtlasTriple c = closure();
    AtlasMorphism incl = identity_morphism(a, c);
    MorphismClassification cls = classify(incl);
    CHECK(cls.near);
    // only the target is semi-maximal; Def 11.4 needs subchart witnesses in
    // the source atlas, which the two-chart atlas lacks
    CHECK_FALSE(cls.morphism);

    AtlasTriple not_contained = a;
    not_contained.charts.pop_back();
    CHECK_THROWS_AS(identity_morphism(c, not_contained), PreconditionError);
}

TEST_CASE("morphism implies near and strict implies semi-strict on enumerated pairs") {
    AtlasTriple c = closure();
    const FinSpace& pc4 = c.total.space();
    const FinSpace& w = c.coord.space();
    auto f0s = continuous_maps_between(pc4, pc4.full_mask(), pc4, pc4.full_mask());
    auto f1s = continuous_maps_between(w, w.full_mask(), w, w.full_mask());
    // a thinned sample; the acceptance suite runs the full grid
    std::size_t near_count = 0, morphism_count = 0;
    for (std::size_t i = 0; i < f0s.size(); i += 7)
        for (std::size_t j = 0; j < f1s.size(); j += 3) {
            AtlasMorphism m = pair_morphism(c, c, f0s[i], f1s[j]);
            MorphismClassification cls = classify(m);
            if (!cls.model_functions) continue;
            if (cls.morphism) CHECK(cls.near);
            if (cls.strict) CHECK(cls.semi_strict);
            if (cls.near) {
                ++near_count;
                CHECK(cls.morphism);  // Lemma 11.12 item 8 on semi-maximal atlases
            }
            if (cls.morphism) ++morphism_count;
        }
    CHECK(near_count == morphism_count);
    CHECK(near_count > 0);
}

TEST_CASE("equivalence ignores the coordinate component") {
    AtlasTriple c = closure();
    AtlasMorphism id = identity_morphism(c);
    CHECK(equivalent(id, id));

    // a different f1 with the same f0: postcompose with the p<->q swap
    const FinSpace& w = c.coord.space();
    PointMap swap(w.size());
    swap[w.point_index("p")] = static_cast<std::uint8_t>(w.point_index("q"));
    swap[w.point_index("q")] = static_cast<std::uint8_t>(w.point_index("p"));
    swap[w.point_index("r")] = static_cast<std::uint8_t>(w.point_index("r"));
    AtlasMorphism other = id;
    other.f1 = swap;
    CHECK(equivalent(id, other));

    AtlasMorphism moved = id;
    const FinSpace& pc4 = c.total.space();
    PointMap rot(pc4.size());
    rot[pc4.point_index("a")] = static_cast<std::uint8_t>(pc4.point_index("b"));
    rot[pc4.point_index("b")] = static_cast<std::uint8_t>(pc4.point_index("a"));
    rot[pc4.point_index("c")] = static_cast<std::uint8_t>(pc4.point_index("d"));
    rot[pc4.point_index("d")] = static_cast<std::uint8_t>(pc4.point_index("c"));
    moved.f0 = rot;
    CHECK_FALSE(equivalent(id, moved));

    AtlasMorphism elsewhere = id;
    elsewhere.target = fixture();
    CHECK_THROWS_AS(equivalent(id, elsewhere), PreconditionError);
}

TEST_CASE("composition identities and closure") {
    AtlasTriple c = closure();
    AtlasMorphism id = identity_morphism(c);

    // a nontrivial automorphism pair: rotate the pseudocircle, swap W
    const FinSpace& pc4 = c.total.space();
    const FinSpace& w = c.coord.space();
    PointMap rot(pc4.size());
    rot[pc4.point_index("a")] = static_cast<std::uint8_t>(pc4.point_index("b"));
    rot[pc4.point_index("b")] = static_cast<std::uint8_t>(pc4.point_index("a"));
    rot[pc4.point_index("c")] = static_cast<std::uint8_t>(pc4.point_index("d"));
    rot[pc4.point_index("d")] = static_cast<std::uint8_t>(pc4.point_index("c"));
    PointMap swap(w.size());
    swap[w.point_index("p")] = static_cast<std::uint8_t>(w.point_index("q"));
    swap[w.point_index("q")] = static_cast<std::uint8_t>(w.point_index("p"));
    swap[w.point_index("r")] = static_cast<std::uint8_t>(w.point_index("r"));
    AtlasMorphism m = pair_morphism(c, c, rot, swap);
    MorphismClassification cls = classify(m);
    REQUIRE(cls.morphism);

    AtlasMorphism left = compose(id, m);
    AtlasMorphism right = compose(m, id);
    CHECK(left.f0 == m.f0);
    CHECK(left.f1 == m.f1);
    CHECK(right.f0 == m.f0);
    CHECK(right.f1 == m.f1);

    // morphism composed with morphism classifies as a morphism
    AtlasMorphism mm = compose(m, m);
    CHECK(classify(mm).morphism);

    // near-only factors over a non-semi-maximal middle are refused
    AtlasTriple a = fixture();
    AtlasMorphism ida = identity_morphism(a);
    CHECK_THROWS_AS(compose(ida, ida), CompositionUndefined);

    // endpoint mismatch
    CHECK_THROWS_AS(compose(ida, identity_morphism(c)), PreconditionError);
}

TEST_CASE("equivalence is a congruence for composition") {
    AtlasTriple c = closure();
    AtlasMorphism id = identity_morphism(c);
    const FinSpace& w = c.coord.space();
    PointMap swap(w.size());
    swap[w.point_index("p")] = static_cast<std::uint8_t>(w.point_index("q"));
    swap[w.point_index("q")] = static_cast<std::uint8_t>(w.point_index("p"));
    swap[w.point_index("r")] = static_cast<std::uint8_t>(w.point_index("r"));
    AtlasMorphism variant = id;
    variant.f1 = swap;  // equivalent to id, different f1
    REQUIRE(classify(variant).near);
    AtlasMorphism c1 = compose(id, id);
    AtlasMorphism c2 = compose(variant, variant);
    CHECK(equivalent(c1, c2));
}

TEST_CASE("equivalence preserves semi-strictness on full atlases (Lemma 11.14)") {
    AtlasTriple c = closure();
    REQUIRE(atlas_report(c).is_full);
    const FinSpace& w = c.coord.space();
    auto f1s = continuous_maps_between(w, w.full_mask(), w, w.full_mask());
    AtlasMorphism base = identity_morphism(c);
    MorphismClassification base_cls = classify(base);
    REQUIRE(base_cls.semi_strict);
    for (const auto& f1 : f1s) {
        AtlasMorphism g = base;
        g.f1 = f1;
        MorphismClassification cls = classify(g);
        if (!cls.model_functions || !cls.near) continue;
        CHECK(cls.semi_strict);
    }
}

TEST_CASE("classic morphisms") {
    AtlasTriple c = closure();
    AtlasMorphism id = identity_morphism(c);

    ClassicClassification idc = classify_classic(id.f0, c, c);
    CHECK(idc.classic);
    CHECK(idc.strict);
    CHECK(idc.semi_strict);
    CHECK(idc.constrained);

    // the total component of every enumerated morphism is classic
    const FinSpace& pc4 = c.total.space();
    const FinSpace& w = c.coord.space();
    auto f0s = continuous_maps_between(pc4, pc4.full_mask(), pc4, pc4.full_mask());
    auto f1s = continuous_maps_between(w, w.full_mask(), w, w.full_mask());
    std::size_t seen = 0;
    for (std::size_t i = 0; i < f0s.size(); i += 5)
        for (std::size_t j = 0; j < f1s.size(); j += 5) {
            AtlasMorphism m = pair_morphism(c, c, f0s[i], f1s[j]);
            MorphismClassification cls = classify(m);
            if (!cls.model_functions || !cls.morphism) continue;
            CHECK(classify_classic(m.f0, c, c).classic);
            ++seen;
        }
    CHECK(seen > 0);

    // a map whose composed chart representative leaves the designated arrows:
    // shrink the coordinate model space to kill the swap isomorphism
    FinSpace wsp = make_w();
    Mask p = mask_of(wsp, {"p"});
    Mask q = mask_of(wsp, {"q"});
    Mask pq = mask_of(wsp, {"p", "q"});
    Mask pqr = wsp.full_mask();
    ModelSpace skinny_coord = minimal_closure(wsp, {0, p, q, pq, pqr}, {});
    AtlasTriple skinny = fixture();
    skinny.coord = skinny_coord;
    REQUIRE(atlas_report(skinny).is_atlas);
    const FinSpace& e = skinny.total.space();
    PointMap rot(e.size());
    rot[e.point_index("a")] = static_cast<std::uint8_t>(e.point_index("b"));
    rot[e.point_index("b")] = static_cast<std::uint8_t>(e.point_index("a"));
    rot[e.point_index("c")] = static_cast<std::uint8_t>(e.point_index("d"));
    rot[e.point_index("d")] = static_cast<std::uint8_t>(e.point_index("c"));
    ClassicClassification bad = classify_classic(rot, skinny, skinny);
    CHECK_FALSE(bad.classic);
}

TEST_CASE("classic composition stays classic (Lemma 13.8)") {
    AtlasTriple c = closure();
    const FinSpace& pc4 = c.total.space();
    PointMap rot(pc4.size());
    rot[pc4.point_index("a")] = static_cast<std::uint8_t>(pc4.point_index("b"));
    rot[pc4.point_index("b")] = static_cast<std::uint8_t>(pc4.point_index("a"));
    rot[pc4.point_index("c")] = static_cast<std::uint8_t>(pc4.point_index("d"));
    rot[pc4.point_index("d")] = static_cast<std::uint8_t>(pc4.point_index("c"));
    REQUIRE(classify_classic(rot, c, c).classic);
    PointMap rot2(pc4.size());
    for (std::size_t i = 0; i < pc4.size(); ++i) rot2[i] = rot[rot[i]];
    CHECK(classify_classic(rot2, c, c).classic);
}
