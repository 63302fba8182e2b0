#include "atlasforge/morphisms.hpp"

#include <algorithm>
#include <map>

namespace af {

void validate_atlas_morphism(const AtlasMorphism& m) {
    const FinSpace& e1 = m.source.total.space();
    const FinSpace& e2 = m.target.total.space();
    const FinSpace& c1 = m.source.coord.space();
    const FinSpace& c2 = m.target.coord.space();
    if (m.f0.size() != e1.size()) throw PreconditionError("atlas morphism: f0 not total on the source total");
    if (m.f1.size() != c1.size())
        throw PreconditionError("atlas morphism: f1 not total on the source coordinate space");
    for (auto v : m.f0)
        if (v == kNoPoint || v >= e2.size()) throw PreconditionError("atlas morphism: f0 leaves the target");
    for (auto v : m.f1)
        if (v == kNoPoint || v >= c2.size()) throw PreconditionError("atlas morphism: f1 leaves the target");
}

namespace {

PointMap chart_inverse(const Chart& c, std::size_t coord_size) {
    return invert_partial(c.coord, c.patch, coord_size);
}

// t = phi2 o f0 o phi1^{-1} on phi1[I], a partial map between the coordinate
// carriers.
struct LocalRep {
    Mask dom = 0;  // phi1[I] in C1
    PointMap map;  // C1 carrier -> C2 carrier
};

LocalRep local_representative(const Chart& c1, const Chart& c2, const PointMap& f0, Mask overlap,
                              std::size_t c1_size, std::size_t c2_size) {
    LocalRep r;
    r.dom = map_image(c1.coord, overlap);
    r.map = PointMap(c1_size, kNoPoint);
    PointMap inv1 = chart_inverse(c1, c1_size);
    for (std::size_t v = 0; v < c1_size; ++v)
        if (test_bit(r.dom, v)) r.map[v] = c2.coord[f0[inv1[v]]];
    (void)c2_size;
    return r;
}

// Per-call memo of coordinate-space isomorphisms; classifications of a single
// pair may probe the same object pair many times.
struct IsoCache {
    const ModelSpace* space = nullptr;
    std::map<std::pair<Mask, Mask>, std::vector<Arrow>> memo;
    const std::vector<Arrow>& get(Mask dom, Mask cod) {
        auto it = memo.find({dom, cod});
        if (it != memo.end()) return it->second;
        return memo.emplace(std::make_pair(dom, cod), space->isomorphisms_between(dom, cod)).first->second;
    }
};

bool near_at_point(const AtlasMorphism& m, const Chart& c1, const Chart& c2, Mask overlap, std::size_t u1,
                  MorphismClassification::NearWitness* w, IsoCache& isos) {
    const ModelSpace& e1 = m.source.total;
    const ModelSpace& e2 = m.target.total;
    for (Mask u1p : e1.objects()) {
        if (!test_bit(u1p, u1) || !subset(u1p, overlap)) continue;
        Mask f0img = map_image(m.f0, u1p);
        Mask v1p = map_image(c1.coord, u1p);
        Mask f1img = map_image(m.f1, v1p);
        for (Mask u2p : e2.objects()) {
            if (!subset(f0img, u2p) || !subset(u2p, c2.patch)) continue;
            Mask v2p = map_image(c2.coord, u2p);
            for (Mask vhat : m.target.coord.objects()) {
                if (!subset(f1img, vhat)) continue;
                for (const Arrow& iso : isos.get(v2p, vhat)) {
                    bool eq = true;
                    for (std::size_t x = 0; x < m.f0.size() && eq; ++x)
                        if (test_bit(u1p, x)) {
                            std::uint8_t lhs = iso.map[c2.coord[m.f0[x]]];
                            std::uint8_t rhs = m.f1[c1.coord[x]];
                            if (lhs != rhs) eq = false;
                        }
                    if (eq) {
                        if (w) {
                            w->point = u1;
                            w->u1p = u1p;
                            w->u2p = u2p;
                            w->vhat = vhat;
                            w->bridge = iso;
                        }
                        return true;
                    }
                }
            }
        }
    }
    return false;
}

bool chart_is_subchart_of(const Chart& sub, const Chart& super) {
    return subset(sub.patch, super.patch) && maps_equal_on(sub.coord, super.coord, sub.patch);
}

bool morphism_at_point(const AtlasMorphism& m, const Chart& c1, const Chart& c2, std::size_t u1,
                       MorphismClassification::MorphismWitness* w) {
    std::size_t u2 = m.f0[u1];
    for (const Chart& sc1 : m.source.charts) {
        if (!test_bit(sc1.patch, u1) || !chart_is_subchart_of(sc1, c1)) continue;
        Mask f0img = map_image(m.f0, sc1.patch);
        for (const Chart& tc : m.target.charts) {
            if (!test_bit(tc.patch, u2) || !subset(tc.patch, c2.patch)) continue;
            if (!subset(f0img, tc.patch)) continue;
            bool eq = true;
            for (std::size_t x = 0; x < m.f0.size() && eq; ++x)
                if (test_bit(sc1.patch, x))
                    if (tc.coord[m.f0[x]] != m.f1[c1.coord[x]]) eq = false;
            if (eq) {
                if (w) {
                    w->point = u1;
                    w->sub1 = sc1;
                    w->target = tc;
                }
                return true;
            }
        }
    }
    return false;
}

}  // namespace

MorphismClassification classify(const AtlasMorphism& m, const MorphismAmbient& ambient,
                                const ClassifyOptions& opts) {
    validate_atlas_morphism(m);
    MorphismClassification out;

    const ModelSpace& e1 = m.source.total;
    const ModelSpace& e2 = m.target.total;
    const ModelSpace& cs1 = m.source.coord;
    const ModelSpace& cs2 = m.target.coord;

    ModelFunctionReport rf0, rf1;
    try {
        rf0 = model_function_report(e1, e2, m.f0);
        rf1 = model_function_report(cs1, cs2, m.f1);
    } catch (const PreconditionError& e) {
        out.failures.push_back(std::string("pair is not continuous: ") + e.what());
        return out;
    }
    out.model_functions = rf0.is_model_function && rf1.is_model_function;
    if (!out.model_functions) {
        out.failures.push_back("pair is not a pair of model functions");
        return out;
    }

    out.constrained = rf0.is_constrained && rf1.is_constrained;

    IsoCache isos;
    isos.space = &cs2;

    // near (Def 11.1) and morphism (Def 11.4), chart pair by chart pair
    out.near = opts.want_near;
    out.morphism = opts.want_morphism;
    for (std::size_t i = 0; i < m.source.charts.size(); ++i) {
        const Chart& c1 = m.source.charts[i];
        for (std::size_t j = 0; j < m.target.charts.size(); ++j) {
            const Chart& c2 = m.target.charts[j];
            Mask overlap = c1.patch & map_preimage(m.f0, e1.space().full_mask(), c2.patch);
            if (overlap == 0) continue;
            for (std::size_t p = 0; p < e1.space().size(); ++p) {
                if (!test_bit(overlap, p)) continue;
                if (out.near) {
                    MorphismClassification::NearWitness w;
                    w.chart1 = i;
                    w.chart2 = j;
                    if (near_at_point(m, c1, c2, overlap, p, &w, isos)) {
                        out.near_witnesses.push_back(w);
                    } else {
                        out.near = false;
                        out.near_witnesses.clear();
                        out.failures.push_back("near fails for chart pair (" + std::to_string(i) + "," +
                                               std::to_string(j) + ") at point " +
                                               e1.space().point_name(p));
                    }
                }
                if (out.morphism) {
                    MorphismClassification::MorphismWitness w;
                    w.chart1 = i;
                    w.chart2 = j;
                    if (morphism_at_point(m, c1, c2, p, &w)) {
                        out.morphism_witnesses.push_back(w);
                    } else {
                        out.morphism = false;
                        out.morphism_witnesses.clear();
                        out.failures.push_back("morphism fails for chart pair (" + std::to_string(i) + "," +
                                               std::to_string(j) + ") at point " +
                                               e1.space().point_name(p));
                    }
                }
                if (!out.near && !out.morphism) break;
            }
            if (!out.near && !out.morphism) break;
        }
        if (!out.near && !out.morphism) break;
    }
    if (!opts.want_strictness) return out;

    // semi-strict and strict component conditions (Defs 11.8 / 11.9); the
    // ambient-category sub-definitions take over when categories are given.
    bool with_e_cats = ambient.e_cat_src != nullptr;
    bool with_c_cats = ambient.c_cat_src != nullptr;
    out.variant = std::string("pair") + (with_e_cats ? "+Ecat" : "") + (with_c_cats ? "+Ccat" : "");

    AmbientCategories e_amb, c_amb;
    if (with_e_cats) {
        e_amb.cat_a = ambient.e_cat_src;
        e_amb.cat_b = ambient.e_cat_dst;
    }
    if (with_c_cats) {
        c_amb.cat_a = ambient.c_cat_src;
        c_amb.cat_b = ambient.c_cat_dst;
    }

    auto f0_local = classify_m_morphism(e1, e2, m.f0, MorphismMode::Local,
                                        with_e_cats ? Strictness::Plain : Strictness::Strict, e_amb);
    auto f1_local = classify_m_morphism(cs1, cs2, m.f1, MorphismMode::Local,
                                        with_c_cats ? Strictness::Plain : Strictness::Strict, c_amb);
    bool charts_local = true;
    bool charts_global = true;
    for (const Chart& c1 : m.source.charts)
        for (const Chart& c2 : m.target.charts) {
            Mask overlap = c1.patch & map_preimage(m.f0, e1.space().full_mask(), c2.patch);
            if (overlap == 0) continue;
            LocalRep rep = local_representative(c1, c2, m.f0, overlap, cs1.space().size(), cs2.space().size());
            auto loc = classify_m_morphism(cs1, cs2, rep.map, MorphismMode::Local, Strictness::Plain, c_amb,
                                           rep.dom, c2.codomain);
            if (!loc.holds) charts_local = false;
            // strict clause: the representative is an arrow of Mod(V2, C2)
            bool ok = false;
            if (!with_c_cats) {
                // lift the domain into the target coordinate carrier
                Mask dom_in_c2 = 0;
                bool liftable = true;
                PointMap lifted(cs2.space().size(), kNoPoint);
                for (std::size_t v = 0; v < cs1.space().size() && liftable; ++v)
                    if (test_bit(rep.dom, v)) {
                        int tv = cs2.space().point_index(cs1.space().point_name(v));
                        if (tv < 0)
                            liftable = false;
                        else {
                            dom_in_c2 |= Mask(1) << tv;
                            lifted[tv] = rep.map[v];
                        }
                    }
                ok = liftable && cs2.has_arrow(dom_in_c2, c2.codomain, lifted);
            } else {
                ModelSpace md = relative(cs1, rep.dom);
                ModelSpace mc = relative(cs2, c2.codomain);
                PointMap rel_map(md.space().size(), kNoPoint);
                bool liftable = true;
                for (std::size_t v = 0; v < cs1.space().size() && liftable; ++v)
                    if (test_bit(rep.dom, v)) {
                        int dv = md.space().point_index(cs1.space().point_name(v));
                        int cv = mc.space().point_index(cs2.space().point_name(rep.map[v]));
                        if (dv < 0 || cv < 0)
                            liftable = false;
                        else
                            rel_map[dv] = static_cast<std::uint8_t>(cv);
                    }
                ok = liftable && ambient.c_cat_dst->has_arrow(md, mc, rel_map, md.space().full_mask());
            }
            if (!ok) charts_global = false;
        }
    out.semi_strict = f0_local.holds && f1_local.holds && charts_local;

    auto f0_global = classify_m_morphism(e1, e2, m.f0, MorphismMode::Global,
                                         with_e_cats ? Strictness::Plain : Strictness::Strict, e_amb);
    auto f1_global = classify_m_morphism(cs1, cs2, m.f1, MorphismMode::Global,
                                         with_c_cats ? Strictness::Plain : Strictness::Strict, c_amb);
    out.strict = f0_global.holds && f1_global.holds && charts_global;

    return out;
}

bool equivalent(const AtlasMorphism& m1, const AtlasMorphism& m2) {
    if (!(m1.source == m2.source) || !(m1.target == m2.target))
        throw PreconditionError("equivalent: morphisms have different endpoints");
    return m1.f0 == m2.f0;
}

AtlasMorphism compose(const AtlasMorphism& m2, const AtlasMorphism& m1, const Budget& budget) {
    if (!(m1.target == m2.source)) throw PreconditionError("compose: target of m1 is not the source of m2");
    ClassifyOptions opts;
    opts.want_strictness = false;
    MorphismClassification c1 = classify(m1, {}, opts);
    MorphismClassification c2 = classify(m2, {}, opts);
    if (!c1.near || !c2.near) throw CompositionUndefined("compose: both factors must be near morphisms");
    if (!c1.morphism) {
        AtlasReport mid = atlas_report(m1.target, budget);
        if (!mid.is_semi_maximal)
            throw CompositionUndefined(
                "compose: near morphisms compose only across a semi-maximal middle atlas");
    }
    AtlasMorphism out;
    out.source = m1.source;
    out.target = m2.target;
    out.f0.resize(m1.f0.size());
    out.f1.resize(m1.f1.size());
    for (std::size_t i = 0; i < m1.f0.size(); ++i) out.f0[i] = m2.f0[m1.f0[i]];
    for (std::size_t i = 0; i < m1.f1.size(); ++i) out.f1[i] = m2.f1[m1.f1[i]];
    return out;
}

AtlasMorphism identity_morphism(const AtlasTriple& a) {
    AtlasMorphism m;
    m.source = a;
    m.target = a;
    m.f0.resize(a.total.space().size());
    m.f1.resize(a.coord.space().size());
    for (std::size_t i = 0; i < m.f0.size(); ++i) m.f0[i] = static_cast<std::uint8_t>(i);
    for (std::size_t i = 0; i < m.f1.size(); ++i) m.f1[i] = static_cast<std::uint8_t>(i);
    return m;
}

AtlasMorphism identity_morphism(const AtlasTriple& a, const AtlasTriple& b) {
    SubspaceVerdict et = subspace_relation(a.total, b.total);
    SubspaceVerdict ct = subspace_relation(a.coord, b.coord);
    if (!et.mod || !ct.mod)
        throw PreconditionError("identity: the source spaces must be model subspaces of the target spaces");
    // charts(a) must be contained in charts(b), compared through point names
    for (const Chart& c : a.charts) {
        Chart lifted;
        lifted.coord = PointMap(b.total.space().size(), kNoPoint);
        for (std::size_t i = 0; i < a.total.space().size(); ++i)
            if (test_bit(c.patch, i)) {
                int ti = b.total.space().point_index(a.total.space().point_name(i));
                int tv = b.coord.space().point_index(a.coord.space().point_name(c.coord[i]));
                if (ti < 0 || tv < 0) throw PreconditionError("identity: chart points missing in the target");
                lifted.patch |= Mask(1) << ti;
                lifted.coord[ti] = static_cast<std::uint8_t>(tv);
            }
        for (std::size_t v = 0; v < a.coord.space().size(); ++v)
            if (test_bit(c.codomain, v))
                lifted.codomain |= Mask(1) << b.coord.space().point_index(a.coord.space().point_name(v));
        if (!std::binary_search(b.charts.begin(), b.charts.end(), lifted))
            throw PreconditionError("identity: source charts are not contained in the target charts");
    }
    AtlasMorphism m;
    m.source = a;
    m.target = b;
    m.f0.resize(a.total.space().size());
    m.f1.resize(a.coord.space().size());
    for (std::size_t i = 0; i < m.f0.size(); ++i)
        m.f0[i] = static_cast<std::uint8_t>(b.total.space().point_index(a.total.space().point_name(i)));
    for (std::size_t i = 0; i < m.f1.size(); ++i)
        m.f1[i] = static_cast<std::uint8_t>(b.coord.space().point_index(a.coord.space().point_name(i)));
    return m;
}

ClassicClassification classify_classic(const PointMap& f, const AtlasTriple& source, const AtlasTriple& target,
                                       const ClassicAmbient& ambient) {
    ClassicClassification out;
    const ModelSpace& e1 = source.total;
    const ModelSpace& e2 = target.total;
    const ModelSpace& cs1 = source.coord;
    const ModelSpace& cs2 = target.coord;

    ModelFunctionReport rf = model_function_report(e1, e2, f);
    if (!rf.is_model_function)
        throw PreconditionError("classify_classic: the map is not a model function between the totals");
    out.constrained = rf.is_constrained;

    bool with_cats = ambient.c_cat_src != nullptr;
    out.variant = with_cats ? "classic-cats" : "classic";

    bool coord_ok;
    if (with_cats) {
        coord_ok = is_full_subcategory(*ambient.c_cat_src, *ambient.c_cat_dst);
        if (!coord_ok) out.failures.push_back("ambient: source category not a full subcategory");
    } else {
        SubspaceVerdict sv = subspace_relation(cs1, cs2);
        coord_ok = sv.mod;
        if (!coord_ok) out.failures.push_back("coordinate spaces: not a model subspace");
    }

    out.classic = coord_ok;
    if (out.classic) {
        for (const Chart& c1 : source.charts) {
            for (const Chart& c2 : target.charts) {
                Mask overlap = c1.patch & map_preimage(f, e1.space().full_mask(), c2.patch);
                if (overlap == 0) continue;
                LocalRep rep =
                    local_representative(c1, c2, f, overlap, cs1.space().size(), cs2.space().size());
                bool ok = false;
                if (!with_cats) {
                    Mask dom_in_c2 = 0;
                    bool liftable = true;
                    PointMap lifted(cs2.space().size(), kNoPoint);
                    for (std::size_t v = 0; v < cs1.space().size() && liftable; ++v)
                        if (test_bit(rep.dom, v)) {
                            int tv = cs2.space().point_index(cs1.space().point_name(v));
                            if (tv < 0)
                                liftable = false;
                            else {
                                dom_in_c2 |= Mask(1) << tv;
                                lifted[tv] = rep.map[v];
                            }
                        }
                    ok = liftable && cs2.has_arrow(dom_in_c2, c2.codomain, lifted);
                } else {
                    ModelSpace md = relative(cs1, rep.dom);
                    ModelSpace mc = relative(cs2, c2.codomain);
                    PointMap rel_map(md.space().size(), kNoPoint);
                    bool liftable = true;
                    for (std::size_t v = 0; v < cs1.space().size() && liftable; ++v)
                        if (test_bit(rep.dom, v)) {
                            int dv = md.space().point_index(cs1.space().point_name(v));
                            int cv = mc.space().point_index(cs2.space().point_name(rep.map[v]));
                            if (dv < 0 || cv < 0)
                                liftable = false;
                            else
                                rel_map[dv] = static_cast<std::uint8_t>(cv);
                        }
                    ok = liftable && ambient.c_cat_dst->has_arrow(md, mc, rel_map, md.space().full_mask());
                }
                if (!ok) {
                    out.classic = false;
                    out.failures.push_back("composed chart map is not designated at " +
                                           mask_to_string(cs1.space(), rep.dom));
                    break;
                }
            }
            if (!out.classic) break;
        }
    }

    out.semi_strict =
        out.classic && classify_m_morphism(e1, e2, f, MorphismMode::Local, Strictness::Plain).holds;
    out.strict = out.classic && classify_m_morphism(e1, e2, f, MorphismMode::Global, Strictness::Plain).holds;
    return out;
}

}  // namespace af
