// Acceptance suite: one line per criterion, exit nonzero when any fails.
// Every enumeration is exhaustive at fixture scale and every tolerance is
// pinned in this file.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "atlasforge/bundles.hpp"
#include "atlasforge/cats.hpp"
#include "atlasforge/diagrams.hpp"
#include "atlasforge/parallel.hpp"
#include "tests/fixture_atlases.hpp"
#include "tests/fixture_bundles.hpp"
#include "tests/fixture_ck.hpp"

using namespace af;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what) {
    std::printf("CRITERION %d %s - %s\n", criterion, pass ? "PASS" : "FAIL", what.c_str());
    if (!pass) ++failures;
}

bool require(bool cond, const char* note) {
    if (!cond) std::printf("    failed: %s\n", note);
    return cond;
}

// Criterion 1: trivial model spaces and minimal closures pass all six axioms;
// minimal closures are idempotent. Zero tolerance.
void criterion1() {
    bool ok = true;
    std::vector<FinSpace> spaces = {make_sierp(),  make_disc2(), make_pc4(),
                                    make_w(),      make_point(), product(make_sierp(), make_sierp())};
    for (const FinSpace& s : spaces)
        ok &= require(check_axioms(trivial(s)).passed(), "trivial model space fails an axiom");

    FinSpace pc4 = make_pc4();
    Mask uc = mask_of(pc4, {"a", "b", "c"});
    Mask ud = mask_of(pc4, {"a", "b", "d"});
    FinSpace sierp = make_sierp();
    std::vector<ModelSpace> closures = {
        minimal_closure(pc4, {uc, ud}, {}),
        minimal_closure(pc4, {0, mask_of(pc4, {"a", "b"}), uc, ud}, {}),
        minimal_closure(sierp, {mask_of(sierp, {"1"}), sierp.full_mask()}, {}),
        make_pc4_atlas_skinny_total().total,
    };
    for (const ModelSpace& m : closures) {
        ok &= require(check_axioms(m).passed(), "minimal closure fails an axiom");
        ModelSpace again = minimal_closure(m.space(), m.objects(), m.all_arrows());
        ok &= require(again == m, "minimal closure is not idempotent");
    }
    report(1, ok, "model-space axiom suite: trivial spaces and minimal closures, all six items");
}

// Criterion 2: m-compatibility is symmetric and inherited by subcharts, over
// every chart pair of the fixture atlases and all of their subcharts.
void criterion2() {
    bool ok = true;
    for (AtlasTriple a : {make_pc4_atlas(), maximal_closure(make_pc4_atlas(), Budget{}, ExecMode::Parallel),
                          make_pc4_atlas_skinny_total()}) {
        std::vector<Chart> pool = a.charts;
        for (const Chart& c : a.charts)
            for (Mask u : a.total.objects())
                if (u != 0 && subset(u, c.patch) && a.coord.is_object(map_image(c.coord, u)))
                    pool.push_back(subchart(c, u, a.total, a.coord));
        for (const Chart& x : pool)
            for (const Chart& y : pool) {
                bool xy = are_compatible(x, y, a.total, a.coord);
                bool yx = are_compatible(y, x, a.total, a.coord);
                ok &= require(xy == yx, "compatibility is not symmetric");
            }
        // subcharts of mutually compatible atlas charts stay compatible and
        // stay compatible with the whole atlas
        for (const Chart& c : pool) ok &= require(chart_vs_atlas(c, a), "subchart incompatible with atlas");
    }
    report(2, ok, "compatibility symmetry and subchart heredity on all fixture chart pairs");
}

// Criterion 3: maximal closure is extensive, idempotent, maximal, and unique
// across compatible seeds; maximal implies semi-maximal on every report.
void criterion3() {
    bool ok = true;
    AtlasTriple a = make_pc4_atlas();
    AtlasTriple closed = maximal_closure(a, Budget{}, ExecMode::Parallel);
    for (const Chart& c : a.charts)
        ok &= require(std::binary_search(closed.charts.begin(), closed.charts.end(), c),
                      "closure is not extensive");
    ok &= require(maximal_closure(closed, Budget{}, ExecMode::Parallel) == closed,
                  "closure is not idempotent");
    AtlasReport rep = atlas_report(closed, Budget{}, ExecMode::Parallel);
    ok &= require(rep.is_maximal, "closure is not maximal under re-enumeration");

    AtlasTriple seeded = a;
    seeded.charts.push_back(subchart(a.charts.front(), mask_of(a.total.space(), {"a", "b"}), a.total, a.coord));
    seeded.canonicalize();
    ok &= require(maximal_closure(seeded, Budget{}, ExecMode::Parallel).charts == closed.charts,
                  "closures of compatible seeds differ");

    for (const AtlasTriple* t : {&a, &closed, &seeded}) {
        AtlasReport r = atlas_report(*t, Budget{}, ExecMode::Parallel);
        ok &= require(!r.is_maximal || r.is_semi_maximal, "maximal without semi-maximal");
    }
    report(3, ok, "maximal closure: extensive, idempotent, maximal, unique; maximal => semi-maximal");
}

// Criterion 4: the morphism taxonomy on the pseudocircle closure, by full
// enumeration of candidate pairs; category laws with Def 11.11 identities.
void criterion4() {
    bool ok = true;
    AtlasTriple c = maximal_closure(make_pc4_atlas(), Budget{}, ExecMode::Parallel);
    const FinSpace& pc4 = c.total.space();
    const FinSpace& w = c.coord.space();
    auto f0s = continuous_maps_between(pc4, pc4.full_mask(), pc4, pc4.full_mask());
    auto f1s = continuous_maps_between(w, w.full_mask(), w, w.full_mask());

    struct Verdicts {
        bool near, morphism, semi_strict, strict, model_functions;
    };
    std::size_t total = f0s.size() * f1s.size();
    auto verdicts = filter_map_indexed<Verdicts>(total, ExecMode::Parallel,
        [&](std::size_t idx) -> std::optional<Verdicts> {
            AtlasMorphism m;
            m.source = c;
            m.target = c;
            m.f0 = f0s[idx / f1s.size()];
            m.f1 = f1s[idx % f1s.size()];
            MorphismClassification cls = classify(m);
            if (!cls.model_functions) return std::nullopt;
            return Verdicts{cls.near, cls.morphism, cls.semi_strict, cls.strict, cls.model_functions};
        });
    std::size_t near_count = 0, morphism_count = 0;
    for (const Verdicts& v : verdicts) {
        if (v.near) ++near_count;
        if (v.morphism) ++morphism_count;
        ok &= require(!v.morphism || v.near, "a morphism that is not near");
        ok &= require(!v.strict || v.semi_strict, "strict without semi-strict");
        ok &= require(!v.near || v.morphism, "a near morphism between semi-maximal atlases, not a morphism");
    }
    ok &= require(near_count == morphism_count && near_count > 0, "near/morphism counts differ");

    AtlasCategory cat = build_atlas_category({c}, ArrowMode::Morphism, {}, Budget{}, ExecMode::Parallel);
    CatLawReport laws = check_category_laws(cat.cat);
    ok &= require(laws.passed(), "atlas category violates a law");
    AtlasMorphism id = identity_morphism(c);
    const AtlasMorphism& cat_id = cat.morphisms[cat.cat.identities[0]];
    ok &= require(cat_id.f0 == id.f0 && cat_id.f1 == id.f1, "category identity is not the Def 11.11 pair");
    std::printf("    enumerated %zu model-function pairs, %zu morphisms\n", verdicts.size(),
                morphism_count);
    report(4, ok, "morphism taxonomy: near=morphism on closures, strict=>semi-strict, category laws");
}

// Criterion 5: functor laws and the Top/M round trip.
void criterion5() {
    bool ok = true;
    AtlasTriple c = maximal_closure(make_pc4_atlas(), Budget{}, ExecMode::Parallel);

    std::vector<AtlasTriple> top_objs = {c};
    for (auto& t : top_objs) t.total_is_topological = true;
    AtlasCategory top_cat = build_atlas_category(top_objs, ArrowMode::Morphism, {}, Budget{},
                                                 ExecMode::Parallel);
    AtlasFunctor up = functor_Top_M(top_cat, Budget{}, ExecMode::Parallel);
    ok &= require(check_functor_laws(up.data).passed(), "F_Top,M violates a functor law");
    AtlasFunctor down = functor_M_Top(up.target, true, Budget{}, ExecMode::Parallel);
    ok &= require(check_functor_laws(down.data).passed(), "F_M,Top violates a functor law");
    bool round = true;
    for (std::size_t o = 0; o < top_cat.objs.size(); ++o) {
        int mid = up.data.on_objects[o];
        if (mid < 0 || down.data.on_objects[mid] < 0 ||
            !(down.target.objs[down.data.on_objects[mid]] == top_cat.objs[o]))
            round = false;
    }
    for (std::size_t a = 0; a < top_cat.cat.arrows.size() && round; ++a) {
        int mid = up.data.on_arrows[a];
        if (mid < 0 || down.data.on_arrows[mid] < 0 ||
            down.target.cat.arrows[down.data.on_arrows[mid]].payload != top_cat.cat.arrows[a].payload)
            round = false;
    }
    ok &= require(round, "F_M,Top after F_Top,M is not the identity");

    AtlasCategory model_cat = build_atlas_category({c}, ArrowMode::Morphism, {}, Budget{},
                                                   ExecMode::Parallel);
    ok &= require(check_functor_laws(functor_M_Classic(model_cat, Budget{}, ExecMode::Parallel).data).passed(),
                  "F_M,Classic violates a functor law");

    // associated minimal model spaces over the skinny-total fixtures, where
    // every arrow action verifies as a model function
    AtlasTriple sk = maximal_closure(make_pc4_atlas_skinny_total(), Budget{}, ExecMode::Parallel);
    AtlasCategory skinny_cat = build_atlas_category({sk}, ArrowMode::Morphism, {}, Budget{},
                                                    ExecMode::Parallel);
    for (MinWhich which : {MinWhich::F1, MinWhich::F2}) {
        MinimalSpacesFunctor mf = minimal_space_functors(skinny_cat, which);
        ok &= require(check_functor_laws(mf.data).passed(), "a minimal-space functor violates a law");
        for (const ModelSpace& m : mf.object_images)
            ok &= require(check_axioms(m).passed(), "a minimal-space image fails the axioms");
    }
    report(5, ok, "functor laws for F_Top,M, F_M,Top, F1, F2, F_M,Classic; round trip is the identity");
}

// Criterion 6: the bundle track obligations.
void criterion6() {
    bool ok = true;
    BundleAtlas ct = bundle_maximal_closure(make_triv_bundle(), Budget{}, ExecMode::Parallel);
    BundleAtlas cm = bundle_maximal_closure(make_mobius_bundle(), Budget{}, ExecMode::Parallel);

    for (const BundleAtlas* a : {&ct, &cm}) {
        for (const BundleChart& c1 : a->charts)
            for (const BundleChart& c2 : a->charts) {
                GrhoCompatibility fwd = grho_compatible(c1, c2, a->bundle);
                GrhoCompatibility bwd = grho_compatible(c2, c1, a->bundle);
                ok &= require(fwd.compatible == bwd.compatible, "G-rho compatibility is asymmetric");
                for (auto& [x, g] : fwd.g_function) {
                    bool matched = false;
                    for (auto& [x2, g2] : bwd.g_function)
                        if (x2 == x) matched = g2 == a->bundle.action.group.inverses[g];
                    ok &= require(matched, "transition group maps are not pointwise inverse");
                }
            }
        PointMap pi = derive_projection(a->charts, a->bundle.total, a->bundle.base, a->bundle.product);
        ok &= require(pi == a->bundle.proj, "derived projection differs from the declared one");
        Mask hit = 0;
        for (auto v : pi) hit |= Mask(1) << v;
        ok &= require(hit == a->bundle.base.full_mask(), "derived projection is not surjective");
        for (std::size_t x = 0; x < a->bundle.base.size(); ++x) {
            Mask fiber_mask = 0;
            for (std::size_t e = 0; e < a->bundle.total.size(); ++e)
                if (a->bundle.proj[e] == x) fiber_mask |= Mask(1) << e;
            ok &= require(!homeomorphisms_between(a->bundle.total, fiber_mask, a->bundle.fiber,
                                                  a->bundle.fiber.full_mask())
                               .empty(),
                          "a fiber is not homeomorphic to the model fiber");
        }
    }

    BundleCategory cat = fiber_bundle_category({ct, cm}, Budget{}, ExecMode::Parallel);
    ok &= require(check_category_laws(cat.cat).passed(), "fiber bundle category violates a law");

    BundleFunctorPair pair = bundle_functors(cat, Budget{}, ExecMode::Parallel);
    ok &= require(check_functor_laws(pair.to_m).passed(), "F_Bun,M violates a functor law");
    ok &= require(check_functor_laws(pair.from_m).passed(), "F_M-G-rho,Bun violates a functor law");
    bool round = true;
    for (std::size_t o = 0; o < cat.objs.size(); ++o)
        if (pair.from_m.on_objects[pair.to_m.on_objects[o]] != static_cast<int>(o)) round = false;
    for (std::size_t a = 0; a < cat.cat.arrows.size() && round; ++a)
        if (pair.from_m.on_arrows[pair.to_m.on_arrows[a]] != static_cast<int>(a)) round = false;
    ok &= require(round, "the bundle round trip is not the identity");
    report(6, ok, "bundle track: symmetry, projection, fibers, functor round trip, category laws");
}

// Independent component-count oracle: split along proper clopen subsets.
std::size_t component_oracle(const FinSpace& s) {
    if (s.size() == 0) return 0;
    for (Mask u : s.opens()) {
        if (u == 0 || u == s.full_mask()) continue;
        if (s.is_open(s.full_mask() & ~u))
            return component_oracle(subspace(s, u)) + component_oracle(subspace(s, s.full_mask() & ~u));
    }
    return 1;
}

// Criterion 7: the Moebius distinguisher.
void criterion7() {
    bool ok = true;
    BundleAtlas ct = bundle_maximal_closure(make_triv_bundle(), Budget{}, ExecMode::Parallel);
    BundleAtlas cm = bundle_maximal_closure(make_mobius_bundle(), Budget{}, ExecMode::Parallel);
    ok &= require(connected_components(ct.bundle.total).size() == 2, "product total should split in two");
    ok &= require(connected_components(cm.bundle.total).size() == 1, "twisted total should be connected");
    ok &= require(component_oracle(ct.bundle.total) == 2, "component oracle disagrees on the product");
    ok &= require(component_oracle(cm.bundle.total) == 1, "component oracle disagrees on the twist");
    auto tuples = enumerate_bundle_morphisms(cm, ct, BundleMorphismKind::Morphism, true, Budget{},
                                             ExecMode::Parallel);
    ok &= require(tuples.empty(), "found a bijective bundle morphism from the twisted to the product");
    auto sanity = enumerate_bundle_morphisms(ct, ct, BundleMorphismKind::Morphism, true, Budget{},
                                             ExecMode::Parallel);
    ok &= require(!sanity.empty(), "the same search finds nothing at all");
    report(7, ok, "Moebius distinguisher: component counts 2 vs 1; no bijective bundle morphism");
}

// Criterion 8: the numeric track, all tolerances pinned here.
void criterion8() {
    bool ok = true;
    auto t0 = std::chrono::steady_clock::now();

    CkGluingData g = make_circle2();
    CkAtlasReport atlas = ck_atlas_report(g, kCInf, ExecMode::Parallel);
    ok &= require(atlas.is_atlas && atlas.non_degenerate, "the circle gluing data is not an atlas");

    // central difference of 1/x at 2, plain oracle stencil
    auto recip = [](double x) { return 1.0 / x; };
    double h = 1e-5;
    double fd = (recip(2 + h) - recip(2 - h)) / (2 * h);
    ok &= require(std::fabs(fd - (-0.25)) <= 1e-6, "finite difference of 1/x at 2 misses -0.25");

    TransitionReport tr = transition_diffeo_check(g, 0, kCInf, ExecMode::Parallel);
    ok &= require(tr.passes, "the reciprocal transition fails the diffeomorphism check");
    ok &= require(std::fabs(tr.min_jacobian_gram_det - 0.0625) <= 1e-9,
                  "min Jacobian Gram determinant misses 0.0625");

    CkTolerances tol;
    VectorFn abs_fn = [](const std::vector<double>& x) { return std::vector<double>{std::fabs(x[0])}; };
    SmoothnessReport sm =
        sampled_smoothness_check(abs_fn, 1, 1, sample_grid({Box{{-1.0, 1.0}}}, 17), 1, tol);
    ok &= require(!sm.ok && sm.failed_order == 1, "|x| slipped through the C^1 check");

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok &= require(secs < 1.0, "numeric track exceeded one second");
    std::printf("    numeric track runtime %.3fs\n", secs);
    report(8, ok, "C^k numerics: circle atlas, -0.25 within 1e-6, 0.0625 within 1e-9, |x| fails C^1");
}

// Criterion 9: vacuity of local near-commutativity, and stability of strong
// completions under ambient enlargement.
void criterion9() {
    bool ok = true;
    FinSpace sierp = make_sierp();
    ModelSpace small = minimal_closure(sierp, {0, mask_of(sierp, {"1"}), sierp.full_mask()}, {});
    ModelSpace big = trivial(sierp);

    PointMap empty_map(sierp.size(), kNoPoint);
    for (const ModelSpace* amb : {&small, &big}) {
        NcdProblem p{{ChainLink{0, 0, empty_map}}, {ChainLink{0, 0, empty_map}}, *amb};
        for (NcdFlavor f : {NcdFlavor::Left, NcdFlavor::Right, NcdFlavor::Strong}) {
            NcdLocalResult r = ncd_local(p, f);
            ok &= require(r.ok && r.points.empty(), "empty initial node is not vacuously commutative");
        }
    }

    // every strong completion in the small ambient survives enlargement;
    // exhaust all one-link diagrams over the small ambient's objects and maps
    std::size_t strong_checked = 0;
    for (Mask u0 : small.objects())
        for (const Arrow& l : small.all_arrows())
            for (const Arrow& r : small.all_arrows()) {
                if (l.dom != u0 || r.dom != u0) continue;
                NcdProblem p_small{{ChainLink{l.dom, l.cod, l.map}}, {ChainLink{r.dom, r.cod, r.map}}, small};
                NcdProblem p_big{{ChainLink{l.dom, l.cod, l.map}}, {ChainLink{r.dom, r.cod, r.map}}, big};
                NcdVerdict vs = complete_ncd(p_small);
                if (!vs.strong) continue;
                ++strong_checked;
                ok &= require(complete_ncd(p_big).strong, "a strong completion died in the larger ambient");
            }
    ok &= require(strong_checked > 0, "no strong completions were exercised");
    report(9, ok, "NCD vacuity on the empty node; strong completions survive ambient enlargement");
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    std::printf("ACCEPTANCE: %d/9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
