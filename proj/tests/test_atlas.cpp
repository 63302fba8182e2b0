#include <doctest.h>

#include "atlasforge/atlas.hpp"
#include "tests/fixture_atlases.hpp"

using namespace af;

TEST_CASE("chart validity") {
    AtlasTriple a = make_pc4_atlas();
    for (const Chart& c : a.charts) CHECK(chart_check(c, a.total, a.coord).valid);

    Chart void_patch;
    void_patch.coord = PointMap(4, kNoPoint);
    CHECK_FALSE(chart_check(void_patch, a.total, a.coord).valid);

    // bijective but not open: map the discrete pair {a,b} onto the
    // non-discrete pair {p,r} of W
    FinSpace pc4 = a.total.space();
    FinSpace w = a.coord.space();
    Chart bad;
    bad.patch = mask_of(pc4, {"a", "b"});
    bad.codomain = mask_of(w, {"p", "r"});
    bad.coord = PointMap(4, kNoPoint);
    bad.coord[pc4.point_index("a")] = static_cast<std::uint8_t>(w.point_index("p"));
    bad.coord[pc4.point_index("b")] = static_cast<std::uint8_t>(w.point_index("r"));
    CHECK_FALSE(chart_check(bad, a.total, a.coord).valid);
}

TEST_CASE("subcharts") {
    AtlasTriple a = make_pc4_atlas();
    FinSpace pc4 = a.total.space();
    FinSpace w = a.coord.space();
    const Chart& uc_chart = a.charts.front();

    Mask ab = mask_of(pc4, {"a", "b"});
    Chart sc = subchart(uc_chart, ab, a.total, a.coord);
    CHECK(sc.patch == ab);
    CHECK(sc.codomain == mask_of(w, {"p", "q"}));
    CHECK(chart_check(sc, a.total, a.coord).valid);

    CHECK(subchart(uc_chart, uc_chart.patch, a.total, a.coord) == uc_chart);
    CHECK_THROWS_AS(subchart(uc_chart, 0, a.total, a.coord), PreconditionError);
    // {a,c} is not open in PC4, so not a model neighborhood
    CHECK_THROWS_AS(subchart(uc_chart, mask_of(pc4, {"a", "c"}), a.total, a.coord), PreconditionError);
}

TEST_CASE("transitions") {
    AtlasTriple a = make_pc4_atlas();
    FinSpace w = a.coord.space();
    auto t = transition(a.charts[0], a.charts[1], a.total, a.coord);
    REQUIRE(t.has_value());
    CHECK(t->dom == mask_of(w, {"p", "q"}));
    CHECK(t->cod == mask_of(w, {"p", "q"}));
    CHECK(maps_equal_on(t->map, identity_partial(w.size(), t->dom), t->dom));

    auto self = transition(a.charts[0], a.charts[0], a.total, a.coord);
    REQUIRE(self.has_value());
    CHECK(self->dom == a.charts[0].codomain);
    CHECK(maps_equal_on(self->map, identity_partial(w.size(), self->dom), self->dom));

    // disjoint patches: charts on {a} and {b}
    FinSpace pc4 = a.total.space();
    Chart ca, cb;
    ca.patch = mask_of(pc4, {"a"});
    ca.codomain = mask_of(w, {"p"});
    ca.coord = PointMap(4, kNoPoint);
    ca.coord[pc4.point_index("a")] = static_cast<std::uint8_t>(w.point_index("p"));
    cb.patch = mask_of(pc4, {"b"});
    cb.codomain = mask_of(w, {"q"});
    cb.coord = PointMap(4, kNoPoint);
    cb.coord[pc4.point_index("b")] = static_cast<std::uint8_t>(w.point_index("q"));
    CHECK_FALSE(transition(ca, cb, a.total, a.coord).has_value());
    CHECK(are_compatible(ca, cb, a.total, a.coord));
}

TEST_CASE("compatibility is symmetric and survives subcharts") {
    AtlasTriple a = make_pc4_atlas();
    FinSpace pc4 = a.total.space();

    std::vector<Chart> pool = a.charts;
    for (const Chart& c : a.charts)
        for (Mask u : a.total.objects())
            if (u != 0 && subset(u, c.patch)) pool.push_back(subchart(c, u, a.total, a.coord));

    for (const Chart& x : pool)
        for (const Chart& y : pool) {
            bool xy = are_compatible(x, y, a.total, a.coord);
            bool yx = are_compatible(y, x, a.total, a.coord);
            CHECK(xy == yx);
        }

    // subcharts of compatible charts are compatible
    for (const Chart& x : a.charts)
        for (const Chart& y : a.charts)
            for (Mask u : a.total.objects()) {
                if (u == 0 || !subset(u, x.patch)) continue;
                for (Mask v : a.total.objects()) {
                    if (v == 0 || !subset(v, y.patch)) continue;
                    CHECK(are_compatible(subchart(x, u, a.total, a.coord), subchart(y, v, a.total, a.coord),
                                         a.total, a.coord));
                }
            }

    // chart_vs_atlas accepts members and their subcharts (Lemma 10.4)
    for (const Chart& c : pool) CHECK(chart_vs_atlas(c, a));
    (void)pc4;
}

TEST_CASE("atlas report flags on the fixture") {
    AtlasTriple a = make_pc4_atlas();
    AtlasReport rep = atlas_report(a);
    CHECK(rep.is_atlas);
    CHECK(rep.is_full);
    CHECK_FALSE(rep.is_semi_maximal);
    CHECK_FALSE(rep.is_maximal);

    AtlasTriple single = a;
    single.charts.erase(single.charts.begin());
    single.canonicalize();
    // one chart cannot cover the pseudocircle
    AtlasReport rep1 = atlas_report(single);
    CHECK_FALSE(rep1.is_atlas);
}

TEST_CASE("maximal closure: extensive, idempotent, maximal, unique") {
    AtlasTriple a = make_pc4_atlas();
    AtlasTriple closed = maximal_closure(a, Budget{}, ExecMode::Serial);

    // extensive
    for (const Chart& c : a.charts)
        CHECK(std::binary_search(closed.charts.begin(), closed.charts.end(), c));
    CHECK(closed.charts.size() > a.charts.size());

    AtlasReport rep = atlas_report(closed);
    CHECK(rep.is_atlas);
    CHECK(rep.is_full);
    CHECK(rep.is_semi_maximal);
    CHECK(rep.is_maximal);

    // idempotent
    AtlasTriple again = maximal_closure(closed, Budget{}, ExecMode::Serial);
    CHECK(again == closed);

    // unique across compatible seeds: add a subchart to the seed
    AtlasTriple seeded = a;
    seeded.charts.push_back(subchart(a.charts.front(), mask_of(a.total.space(), {"a", "b"}), a.total, a.coord));
    seeded.canonicalize();
    AtlasTriple closed2 = maximal_closure(seeded, Budget{}, ExecMode::Serial);
    CHECK(closed2.charts == closed.charts);

    // serial and parallel enumerations agree
    AtlasTriple closed_par = maximal_closure(a, Budget{}, ExecMode::Parallel);
    CHECK(closed_par == closed);

    // precondition: input must be an atlas
    AtlasTriple nocover = a;
    nocover.charts.erase(nocover.charts.begin());
    CHECK_THROWS_AS(maximal_closure(nocover, Budget{}, ExecMode::Serial), PreconditionError);
}

TEST_CASE("maximal implies semi-maximal on enumerated sub-atlases") {
    AtlasTriple a = make_pc4_atlas();
    AtlasTriple closed = maximal_closure(a, Budget{}, ExecMode::Serial);
    AtlasReport rep = atlas_report(closed);
    CHECK((!rep.is_maximal || rep.is_semi_maximal));
    AtlasReport rep0 = atlas_report(a);
    CHECK((!rep0.is_maximal || rep0.is_semi_maximal));
}

TEST_CASE("search budget aborts candidate enumeration") {
    AtlasTriple a = make_pc4_atlas();
    Budget tiny;
    tiny.max_candidates = 1;
    CHECK_THROWS_AS(maximal_closure(a, tiny, ExecMode::Serial), BudgetExceeded);
}

TEST_CASE("atlases over a non-trivial total transfer to the trivialized total") {
    // Lemma 10.2: with a fine grained coordinate space the same chart set is
    // an atlas over the trivial total model space.
    AtlasTriple a = make_pc4_atlas();
    FinSpace pc4 = a.total.space();
    // total with all opens as objects but only the category closure of
    // inclusions as arrows
    std::vector<Mask> all_opens = pc4.opens();
    ModelSpace skinny = minimal_closure(pc4, all_opens, {});
    AtlasTriple b = a;
    b.total = skinny;
    REQUIRE(atlas_report(b).is_atlas);

    AtlasTriple trivialized = b;
    trivialized.total = trivial(pc4);
    CHECK(is_fine_grained(a.coord));
    CHECK(atlas_report(trivialized).is_atlas);
}
