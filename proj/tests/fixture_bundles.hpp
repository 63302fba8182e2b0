#pragma once

#include "atlasforge/bundles.hpp"
#include "tests/fixture_spaces.hpp"

// Bundle fixtures over the pseudocircle with the two-point fiber and the
// swap action of the two-element group: the product bundle TRIV and the
// twisted MOBIUS bundle (transition swaps the fiber over b).

inline af::FiniteGroup make_z2() {
    af::FiniteGroup g;
    g.elements = {"e", "s"};
    g.table = {{0, 1}, {1, 0}};
    g.inverses = {0, 1};
    return g;
}

inline af::GroupAction make_swap_action() {
    af::GroupAction a;
    a.group = make_z2();
    a.fiber = make_disc2();
    a.act = {{0, 1}, {1, 0}};
    return a;
}

namespace bundle_detail {

struct TotalSpec {
    af::FinSpace space;
    // index of the point labelled (x, i)
    std::uint8_t idx[4][2];
};

// Total space points x0, x1 for x in {a,b,c,d}; minimal neighborhoods are the
// chart preimages of the product minimal neighborhoods. `twist` encodes the
// Moebius gluing: the d-chart sees b-fibers flipped.
inline TotalSpec make_total(bool twist) {
    using namespace af;
    std::vector<std::string> names;
    const char* xs = "abcd";
    for (int x = 0; x < 4; ++x)
        for (int i = 0; i < 2; ++i) names.push_back(std::string(1, xs[x]) + std::to_string(i));
    FinSpace tmp(names, {});
    auto ix = [&](char x, int i) {
        return static_cast<std::uint8_t>(tmp.point_index(std::string(1, x) + std::to_string(i)));
    };
    auto bit = [&](char x, int i) { return Mask(1) << ix(x, i); };
    std::vector<Mask> subbasis;
    for (int i = 0; i < 2; ++i) {
        subbasis.push_back(bit('a', i));
        subbasis.push_back(bit('b', i));
        // c_i glues a_i and b_i
        subbasis.push_back(bit('a', i) | bit('b', i) | bit('c', i));
        // d_i glues a_i and b_i (trivial) or a_i and b_{1-i} (twisted)
        subbasis.push_back(bit('a', i) | bit('b', twist ? 1 - i : i) | bit('d', i));
    }
    TotalSpec out{FinSpace(names, subbasis), {}};
    for (int x = 0; x < 4; ++x)
        for (int i = 0; i < 2; ++i) out.idx[x][i] = ix(xs[x], i);
    return out;
}

}  // namespace bundle_detail

inline af::BundleAtlas make_bundle_fixture(bool twist) {
    using namespace af;
    bundle_detail::TotalSpec spec = bundle_detail::make_total(twist);
    FinSpace pc4 = make_pc4();
    FinSpace y = make_disc2();

    PointMap proj(spec.space.size());
    const char* xs = "abcd";
    for (int x = 0; x < 4; ++x)
        for (int i = 0; i < 2; ++i)
            proj[spec.idx[x][i]] = static_cast<std::uint8_t>(pc4.point_index(std::string(1, xs[x])));

    BundleAtlas a;
    a.bundle = make_protobundle(spec.space, pc4, y, proj, make_swap_action());

    auto xi = [&](const char* n) { return static_cast<std::uint8_t>(pc4.point_index(n)); };
    Mask uc = mask_of(pc4, {"a", "b", "c"});
    Mask ud = mask_of(pc4, {"a", "b", "d"});

    // chart over U_c: identity labelling
    BundleChart cc;
    cc.base_open = uc;
    cc.coord = PointMap(spec.space.size(), kNoPoint);
    for (char x : {'a', 'b', 'c'})
        for (int i = 0; i < 2; ++i) {
            std::uint8_t e = spec.idx[x == 'a' ? 0 : x == 'b' ? 1 : 2][i];
            cc.patch |= Mask(1) << e;
            cc.coord[e] = a.bundle.pair_index(xi(std::string(1, x).c_str()), static_cast<std::uint8_t>(i));
        }

    // chart over U_d: identity on a and d; over b it flips iff the total is
    // twisted, so that the transition's g is e on a and swap on b
    BundleChart cd;
    cd.base_open = ud;
    cd.coord = PointMap(spec.space.size(), kNoPoint);
    for (char x : {'a', 'b', 'd'})
        for (int i = 0; i < 2; ++i) {
            std::uint8_t e = spec.idx[x == 'a' ? 0 : x == 'b' ? 1 : 3][i];
            cd.patch |= Mask(1) << e;
            int label = (x == 'b' && twist) ? 1 - i : i;
            cd.coord[e] = a.bundle.pair_index(xi(std::string(1, x).c_str()), static_cast<std::uint8_t>(label));
        }

    a.charts = {cc, cd};
    a.canonicalize();
    return a;
}

inline af::BundleAtlas make_triv_bundle() { return make_bundle_fixture(false); }
inline af::BundleAtlas make_mobius_bundle() { return make_bundle_fixture(true); }
