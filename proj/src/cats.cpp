#include "atlasforge/cats.hpp"

#include <algorithm>
#include <tuple>

#include "atlasforge/parallel.hpp"

namespace af {

int SmallCat::find_arrow(const std::string& payload, std::size_t dom, std::size_t cod) const {
    for (std::size_t i = 0; i < arrows.size(); ++i)
        if (arrows[i].dom == dom && arrows[i].cod == cod && arrows[i].payload == payload)
            return static_cast<int>(i);
    return -1;
}

CatLawReport check_category_laws(const SmallCat& c) {
    CatLawReport rep;
    rep.closure = true;
    for (std::size_t g = 0; g < c.arrows.size() && rep.closure; ++g)
        for (std::size_t f = 0; f < c.arrows.size(); ++f) {
            bool composable = c.arrows[f].cod == c.arrows[g].dom;
            auto it = c.compose.find({g, f});
            if (composable && it == c.compose.end()) {
                rep.closure = false;
                rep.counterexamples.push_back("closure: compose undefined for arrows " + std::to_string(f) +
                                              " then " + std::to_string(g));
                break;
            }
            if (!composable && it != c.compose.end()) {
                rep.closure = false;
                rep.counterexamples.push_back("closure: compose defined on a non-matching pair");
                break;
            }
            if (composable) {
                const auto& r = c.arrows[it->second];
                if (r.dom != c.arrows[f].dom || r.cod != c.arrows[g].cod) {
                    rep.closure = false;
                    rep.counterexamples.push_back("closure: composite has wrong endpoints");
                    break;
                }
            }
        }

    rep.associativity = true;
    if (rep.closure) {
        // dense table; the triple loop over composable arrows is hot
        const std::size_t n = c.arrows.size();
        std::vector<int> t(n * n, -1);
        for (auto& [pair, comp] : c.compose) t[pair.first * n + pair.second] = static_cast<int>(comp);
        for (std::size_t f = 0; f < n && rep.associativity; ++f)
            for (std::size_t g = 0; g < n && rep.associativity; ++g) {
                int gf = t[g * n + f];
                if (gf < 0) continue;
                for (std::size_t h = 0; h < n; ++h) {
                    int hg = t[h * n + g];
                    if (hg < 0) continue;
                    if (t[h * n + gf] != t[static_cast<std::size_t>(hg) * n + f]) {
                        rep.associativity = false;
                        rep.counterexamples.push_back("associativity: (" + std::to_string(h) + "∘" +
                                                      std::to_string(g) + ")∘" + std::to_string(f) +
                                                      " differs from h∘(g∘f)");
                        break;
                    }
                }
            }
    }

    rep.identity = c.identities.size() == c.objects.size();
    if (!rep.identity) rep.counterexamples.push_back("identity: identity table has the wrong shape");
    if (rep.identity) {
        for (std::size_t o = 0; o < c.objects.size() && rep.identity; ++o) {
            std::size_t id = c.identities[o];
            if (id >= c.arrows.size() || c.arrows[id].dom != o || c.arrows[id].cod != o) {
                rep.identity = false;
                rep.counterexamples.push_back("identity: no identity arrow on object " + std::to_string(o));
                break;
            }
        }
        if (rep.identity && rep.closure)
            for (std::size_t f = 0; f < c.arrows.size(); ++f) {
                std::size_t left = c.compose.at({c.identities[c.arrows[f].cod], f});
                std::size_t right = c.compose.at({f, c.identities[c.arrows[f].dom]});
                if (left != f || right != f) {
                    rep.identity = false;
                    rep.counterexamples.push_back("identity: not a two-sided unit for arrow " +
                                                  std::to_string(f));
                    break;
                }
            }
    }
    return rep;
}

FunctorLawReport check_functor_laws(const FunctorData& f) {
    FunctorLawReport rep;
    rep.endpoints = true;
    if (f.on_objects.size() != f.src.objects.size() || f.on_arrows.size() != f.src.arrows.size()) {
        rep.endpoints = false;
        rep.counterexamples.push_back("endpoints: object/arrow maps have the wrong shape");
        return rep;
    }
    for (std::size_t o = 0; o < f.src.objects.size() && rep.endpoints; ++o)
        if (f.on_objects[o] < 0 || f.on_objects[o] >= static_cast<int>(f.dst.objects.size())) {
            rep.endpoints = false;
            rep.counterexamples.push_back("endpoints: object " + std::to_string(o) +
                                          " maps outside the target category");
        }
    for (std::size_t a = 0; a < f.src.arrows.size() && rep.endpoints; ++a) {
        int ia = f.on_arrows[a];
        if (ia < 0 || ia >= static_cast<int>(f.dst.arrows.size())) {
            rep.endpoints = false;
            rep.counterexamples.push_back("endpoints: arrow " + std::to_string(a) +
                                          " maps outside the target category");
            break;
        }
        const auto& sa = f.src.arrows[a];
        const auto& da = f.dst.arrows[ia];
        if (da.dom != static_cast<std::size_t>(f.on_objects[sa.dom]) ||
            da.cod != static_cast<std::size_t>(f.on_objects[sa.cod])) {
            rep.endpoints = false;
            rep.counterexamples.push_back("endpoints: arrow " + std::to_string(a) + " endpoints not preserved");
            break;
        }
    }

    rep.identity = rep.endpoints;
    if (rep.identity)
        for (std::size_t o = 0; o < f.src.objects.size(); ++o) {
            std::size_t src_id = o < f.src.identities.size() ? f.src.identities[o] : std::size_t(-1);
            std::size_t tgt = static_cast<std::size_t>(f.on_objects[o]);
            std::size_t dst_id = tgt < f.dst.identities.size() ? f.dst.identities[tgt] : std::size_t(-1);
            if (src_id >= f.src.arrows.size() || dst_id >= f.dst.arrows.size() ||
                static_cast<std::size_t>(f.on_arrows[src_id]) != dst_id) {
                rep.identity = false;
                rep.counterexamples.push_back("identity: F(id) is not the identity on object " +
                                              std::to_string(o));
                break;
            }
        }

    rep.composition = rep.endpoints;
    if (rep.composition)
        for (auto& [pair, comp] : f.src.compose) {
            auto [g, a] = pair;
            auto it = f.dst.compose.find({static_cast<std::size_t>(f.on_arrows[g]),
                                          static_cast<std::size_t>(f.on_arrows[a])});
            if (it == f.dst.compose.end() ||
                it->second != static_cast<std::size_t>(f.on_arrows[comp])) {
                rep.composition = false;
                rep.counterexamples.push_back("composition: F(g∘f) differs from F(g)∘F(f)");
                break;
            }
        }
    return rep;
}

// ---------------------------------------------------------------------------
// building atlas categories

namespace {

std::string map_key(const PointMap& m, Mask domain) {
    std::string k;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (test_bit(domain, i)) k += std::to_string(i) + ":" + std::to_string(m[i]) + ";";
    return k;
}

std::string pair_key(const AtlasMorphism& m) {
    return "f0[" + map_key(m.f0, m.source.total.space().full_mask()) + "]f1[" +
           map_key(m.f1, m.source.coord.space().full_mask()) + "]";
}

bool passes_restriction(const MorphismClassification& cls, CatRestriction::Arrows r) {
    switch (r) {
        case CatRestriction::Arrows::Plain:
            return cls.morphism;
        case CatRestriction::Arrows::SemiStrict:
            return cls.morphism && cls.semi_strict;
        case CatRestriction::Arrows::Strict:
            return cls.morphism && cls.strict;
    }
    return false;
}

}  // namespace

int AtlasCategory::object_index(const AtlasTriple& t) const {
    for (std::size_t i = 0; i < objs.size(); ++i)
        if (objs[i] == t) return static_cast<int>(i);
    return -1;
}

AtlasCategory build_atlas_category(const std::vector<AtlasTriple>& objects, ArrowMode mode,
                                   CatRestriction restriction, const Budget& budget, ExecMode exec) {
    AtlasCategory out;
    out.mode = mode;
    out.restriction = restriction;
    out.objs = objects;
    for (std::size_t i = 0; i < objects.size(); ++i) {
        // validate only as deeply as the restriction demands; the maximality
        // flags need their own enumeration
        if (restriction.objects == CatRestriction::Objects::Plain ||
            restriction.objects == CatRestriction::Objects::Full) {
            if (!is_m_atlas(objects[i]))
                throw PreconditionError("build_atlas_category: object is not an m-atlas");
            if (restriction.objects == CatRestriction::Objects::Full) {
                Mask codcover = 0;
                for (const Chart& c : objects[i].charts) codcover |= c.codomain;
                if (codcover != objects[i].coord.space().full_mask())
                    throw PreconditionError("build_atlas_category: object is not full");
            }
        } else {
            AtlasReport rep = atlas_report(objects[i], budget);
            if (!rep.is_atlas) throw PreconditionError("build_atlas_category: object is not an m-atlas");
            if (restriction.objects == CatRestriction::Objects::SemiMax && !rep.is_semi_maximal)
                throw PreconditionError("build_atlas_category: object is not semi-maximal");
            if (restriction.objects == CatRestriction::Objects::Max && !rep.is_maximal)
                throw PreconditionError("build_atlas_category: object is not maximal");
        }
        out.cat.objects.push_back("o" + std::to_string(i));
    }

    // Enumerate arrows object pair by object pair. Candidate maps are the
    // continuous ones; classification filters to (classic) morphisms. The
    // candidate grid is the parallel kernel.
    for (std::size_t si = 0; si < objects.size(); ++si)
        for (std::size_t ti = 0; ti < objects.size(); ++ti) {
            const AtlasTriple& s = objects[si];
            const AtlasTriple& t = objects[ti];
            auto f0s = continuous_maps_between(s.total.space(), s.total.space().full_mask(), t.total.space(),
                                               t.total.space().full_mask(), budget.max_maps_per_pair);
            if (mode == ArrowMode::Morphism) {
                auto f1s = continuous_maps_between(s.coord.space(), s.coord.space().full_mask(),
                                                   t.coord.space(), t.coord.space().full_mask(),
                                                   budget.max_maps_per_pair);
                std::size_t total = f0s.size() * f1s.size();
                if (total > budget.max_candidates)
                    throw BudgetExceeded("build_atlas_category: candidate pair budget");
                auto kept = filter_map_indexed<AtlasMorphism>(total, exec,
                    [&](std::size_t idx) -> std::optional<AtlasMorphism> {
                        AtlasMorphism m;
                        m.source = s;
                        m.target = t;
                        m.f0 = f0s[idx / f1s.size()];
                        m.f1 = f1s[idx % f1s.size()];
                        ClassifyOptions opts;
                        opts.want_near = false;
                        opts.want_strictness = restriction.arrows != CatRestriction::Arrows::Plain;
                        MorphismClassification cls = classify(m, {}, opts);
                        if (!cls.model_functions || !passes_restriction(cls, restriction.arrows))
                            return std::nullopt;
                        return m;
                    });
                for (auto& m : kept) {
                    out.cat.arrows.push_back({pair_key(m), si, ti});
                    out.morphisms.push_back(std::move(m));
                }
            } else {
                auto kept = filter_map_indexed<PointMap>(f0s.size(), exec,
                    [&](std::size_t idx) -> std::optional<PointMap> {
                        ModelFunctionReport mf = model_function_report(s.total, t.total, f0s[idx]);
                        if (!mf.is_model_function) return std::nullopt;
                        ClassicClassification cls = classify_classic(f0s[idx], s, t);
                        bool ok = cls.classic;
                        if (restriction.arrows == CatRestriction::Arrows::SemiStrict) ok = ok && cls.semi_strict;
                        if (restriction.arrows == CatRestriction::Arrows::Strict) ok = ok && cls.strict;
                        if (!ok) return std::nullopt;
                        return f0s[idx];
                    });
                for (auto& f : kept) {
                    out.cat.arrows.push_back(
                        {"f0[" + map_key(f, s.total.space().full_mask()) + "]", si, ti});
                    out.classic_arrows.push_back(std::move(f));
                }
            }
        }

    // Identities and the composition table. A missing composite or identity is
    // recorded as-is; check_category_laws reports it rather than the builder
    // hiding it.
    out.cat.identities.assign(objects.size(), std::size_t(-1));
    for (std::size_t i = 0; i < objects.size(); ++i) {
        std::string key;
        if (mode == ArrowMode::Morphism) {
            AtlasMorphism id = identity_morphism(objects[i]);
            key = pair_key(id);
        } else {
            PointMap id(objects[i].total.space().size());
            for (std::size_t k = 0; k < id.size(); ++k) id[k] = static_cast<std::uint8_t>(k);
            key = "f0[" + map_key(id, objects[i].total.space().full_mask()) + "]";
        }
        int idx = out.cat.find_arrow(key, i, i);
        if (idx >= 0) out.cat.identities[i] = static_cast<std::size_t>(idx);
    }
    std::map<std::tuple<std::size_t, std::size_t, std::string>, std::size_t> index;
    for (std::size_t a = 0; a < out.cat.arrows.size(); ++a)
        index[{out.cat.arrows[a].dom, out.cat.arrows[a].cod, out.cat.arrows[a].payload}] = a;
    for (std::size_t f = 0; f < out.cat.arrows.size(); ++f)
        for (std::size_t g = 0; g < out.cat.arrows.size(); ++g) {
            if (out.cat.arrows[f].cod != out.cat.arrows[g].dom) continue;
            std::string key;
            if (mode == ArrowMode::Morphism) {
                const AtlasMorphism& mf = out.morphisms[f];
                const AtlasMorphism& mg = out.morphisms[g];
                AtlasMorphism comp;
                comp.source = mf.source;
                comp.target = mg.target;
                comp.f0.resize(mf.f0.size());
                comp.f1.resize(mf.f1.size());
                for (std::size_t i = 0; i < mf.f0.size(); ++i) comp.f0[i] = mg.f0[mf.f0[i]];
                for (std::size_t i = 0; i < mf.f1.size(); ++i) comp.f1[i] = mg.f1[mf.f1[i]];
                key = pair_key(comp);
            } else {
                const PointMap& ff = out.classic_arrows[f];
                const PointMap& fg = out.classic_arrows[g];
                PointMap comp(ff.size());
                for (std::size_t i = 0; i < ff.size(); ++i) comp[i] = fg[ff[i]];
                key = "f0[" + map_key(comp, out.objs[out.cat.arrows[f].dom].total.space().full_mask()) + "]";
            }
            auto it = index.find({out.cat.arrows[f].dom, out.cat.arrows[g].cod, key});
            if (it != index.end()) out.cat.compose[{g, f}] = it->second;
        }
    return out;
}

// ---------------------------------------------------------------------------
// functors between atlas categories

namespace {

AtlasFunctor map_category(const AtlasCategory& src, const AtlasCategory& dst,
                          const std::vector<AtlasTriple>& mapped_objects,
                          const std::vector<AtlasMorphism>* mapped_pairs,
                          const std::vector<PointMap>* mapped_classics) {
    AtlasFunctor f;
    f.source = src;
    f.target = dst;
    f.data.src = src.cat;
    f.data.dst = dst.cat;
    for (const AtlasTriple& t : mapped_objects) f.data.on_objects.push_back(dst.object_index(t));
    for (std::size_t a = 0; a < src.cat.arrows.size(); ++a) {
        int idx = -1;
        std::size_t dom = src.cat.arrows[a].dom, cod = src.cat.arrows[a].cod;
        if (f.data.on_objects[dom] >= 0 && f.data.on_objects[cod] >= 0) {
            std::string key;
            if (mapped_pairs) {
                const AtlasMorphism& m = (*mapped_pairs)[a];
                key = "f0[" + map_key(m.f0, m.source.total.space().full_mask()) + "]f1[" +
                      map_key(m.f1, m.source.coord.space().full_mask()) + "]";
            } else {
                const PointMap& p = (*mapped_classics)[a];
                key = "f0[" + map_key(p, mapped_objects[dom].total.space().full_mask()) + "]";
            }
            idx = dst.cat.find_arrow(key, static_cast<std::size_t>(f.data.on_objects[dom]),
                                     static_cast<std::size_t>(f.data.on_objects[cod]));
        }
        f.data.on_arrows.push_back(idx);
    }
    return f;
}

}  // namespace

AtlasFunctor functor_M_Top(const AtlasCategory& src, bool enforce_fine_grained, const Budget& budget,
                           ExecMode exec) {
    std::vector<AtlasTriple> mapped;
    for (const AtlasTriple& t : src.objs) {
        if (enforce_fine_grained && !is_fine_grained(t.coord))
            throw PreconditionError("functor_M_Top: coordinate model space over " +
                                    (t.coord.space().size() ? t.coord.space().point_name(0) : std::string()) +
                                    "... is not fine grained");
        AtlasTriple m = t;
        m.total = trivial(t.total.space());
        m.total_is_topological = true;
        mapped.push_back(std::move(m));
    }
    // Target category: atlases over topological totals. Objects that fail to
    // be atlases there (non-fine-grained coordinate spaces) are dropped, which
    // the law check reports as an endpoint failure.
    std::vector<AtlasTriple> valid;
    for (const AtlasTriple& t : mapped)
        if (atlas_report(t, budget).is_atlas) valid.push_back(t);
    AtlasCategory dst = build_atlas_category(valid, src.mode, src.restriction, budget, exec);
    std::vector<AtlasMorphism> mapped_pairs;
    if (src.mode == ArrowMode::Morphism) {
        for (const AtlasMorphism& m : src.morphisms) {
            AtlasMorphism n = m;
            n.source = mapped[src.cat.arrows[&m - src.morphisms.data()].dom];
            n.target = mapped[src.cat.arrows[&m - src.morphisms.data()].cod];
            mapped_pairs.push_back(std::move(n));
        }
        return map_category(src, dst, mapped, &mapped_pairs, nullptr);
    }
    return map_category(src, dst, mapped, nullptr, &src.classic_arrows);
}

AtlasFunctor functor_Top_M(const AtlasCategory& src, const Budget& budget, ExecMode exec) {
    std::vector<AtlasTriple> mapped;
    for (const AtlasTriple& t : src.objs) {
        AtlasTriple m = t;
        m.total = trivial(t.total.space());
        m.total_is_topological = false;
        mapped.push_back(std::move(m));
    }
    AtlasCategory dst = build_atlas_category(mapped, src.mode, src.restriction, budget, exec);
    if (src.mode == ArrowMode::Morphism) {
        std::vector<AtlasMorphism> mapped_pairs;
        for (std::size_t a = 0; a < src.morphisms.size(); ++a) {
            AtlasMorphism n = src.morphisms[a];
            n.source = mapped[src.cat.arrows[a].dom];
            n.target = mapped[src.cat.arrows[a].cod];
            mapped_pairs.push_back(std::move(n));
        }
        return map_category(src, dst, mapped, &mapped_pairs, nullptr);
    }
    return map_category(src, dst, mapped, nullptr, &src.classic_arrows);
}

AtlasFunctor functor_M_Classic(const AtlasCategory& src, const Budget& budget, ExecMode exec) {
    if (src.mode != ArrowMode::Morphism)
        throw PreconditionError("functor_M_Classic: source must be a pair-morphism category");
    AtlasCategory dst = build_atlas_category(src.objs, ArrowMode::Classic, src.restriction, budget, exec);
    AtlasFunctor f;
    f.source = src;
    f.target = dst;
    f.data.src = src.cat;
    f.data.dst = dst.cat;
    for (std::size_t i = 0; i < src.objs.size(); ++i) f.data.on_objects.push_back(static_cast<int>(i));
    for (std::size_t a = 0; a < src.cat.arrows.size(); ++a) {
        const AtlasMorphism& m = src.morphisms[a];
        std::string key = "f0[" + map_key(m.f0, m.source.total.space().full_mask()) + "]";
        f.data.on_arrows.push_back(dst.cat.find_arrow(key, src.cat.arrows[a].dom, src.cat.arrows[a].cod));
    }
    return f;
}

// ---------------------------------------------------------------------------
// associated minimal model spaces

namespace {

struct MinSeeds {
    std::vector<Mask> objects;
    std::vector<Arrow> arrows;
};

MinSeeds f2_seeds(const AtlasTriple& a) {
    MinSeeds s;
    const std::size_t n = a.coord.space().size();
    for (const Chart& c : a.charts) s.objects.push_back(c.codomain);
    for (const Chart& c : a.charts)
        for (const Chart& d : a.charts) {
            Mask overlap = c.patch & d.patch;
            if (overlap == 0) continue;
            auto t = transition(c, d, a.total, a.coord);
            Arrow ar;
            ar.dom = t->dom;
            ar.cod = t->cod;
            ar.map = t->map;
            // the transition's endpoints are overlap images, which need not be
            // codomains; they are model neighborhoods, so seed them too
            s.objects.push_back(ar.dom);
            s.objects.push_back(ar.cod);
            ar.map.resize(n, kNoPoint);
            s.arrows.push_back(std::move(ar));
        }
    return s;
}

MinSeeds f1_seeds(const AtlasTriple& a) {
    MinSeeds s;
    const std::size_t n = a.total.space().size();
    for (const Chart& c : a.charts) s.objects.push_back(c.patch);
    for (const Chart& c : a.charts)
        for (const Chart& d : a.charts) {
            if ((c.patch & d.patch) == 0) continue;
            // phi'^{-1} o phi on the preimage of the shared codomain part
            Mask dom = map_preimage(c.coord, c.patch, c.codomain & d.codomain);
            Arrow ar;
            ar.dom = dom;
            ar.cod = d.patch;
            ar.map = PointMap(n, kNoPoint);
            PointMap invd = invert_partial(d.coord, d.patch, a.coord.space().size());
            for (std::size_t i = 0; i < n; ++i)
                if (test_bit(dom, i)) ar.map[i] = invd[c.coord[i]];
            s.objects.push_back(dom);
            s.arrows.push_back(std::move(ar));
        }
    return s;
}

}  // namespace

ModelSpace minimal_space_functor_object(const AtlasTriple& a, MinWhich which, const Budget& budget) {
    MinSeeds s = which == MinWhich::F2 ? f2_seeds(a) : f1_seeds(a);
    const FinSpace& base = which == MinWhich::F2 ? a.coord.space() : a.total.space();
    return minimal_closure(base, s.objects, s.arrows, budget);
}

PointMap minimal_space_functor_arrow(const AtlasMorphism& m, MinWhich which, const Budget& budget) {
    MorphismClassification cls = classify(m);
    if (which == MinWhich::F2 && !cls.morphism) {
        AtlasReport r1 = atlas_report(m.source, budget);
        AtlasReport r2 = atlas_report(m.target, budget);
        if (!(r1.is_semi_maximal && r2.is_semi_maximal))
            throw CompositionUndefined(
                "minimal_space_functor_arrow: the coordinate action needs a morphism or semi-maximal atlases");
    }
    ModelSpace src = minimal_space_functor_object(m.source, which, budget);
    ModelSpace dst = minimal_space_functor_object(m.target, which, budget);
    const FinSpace& from_carrier = which == MinWhich::F2 ? m.source.coord.space() : m.source.total.space();
    const FinSpace& to_carrier = which == MinWhich::F2 ? m.target.coord.space() : m.target.total.space();
    const PointMap& f = which == MinWhich::F2 ? m.f1 : m.f0;

    PointMap out(src.space().size(), kNoPoint);
    for (std::size_t i = 0; i < src.space().size(); ++i) {
        int gi = from_carrier.point_index(src.space().point_name(i));
        if (gi < 0) throw InternalConsistencyError("minimal space carrier escaped the coordinate space");
        std::uint8_t tv = f[gi];
        int di = dst.space().point_index(to_carrier.point_name(tv));
        if (di < 0)
            throw PreconditionError("minimal_space_functor_arrow: the map leaves the target minimal space");
        out[i] = static_cast<std::uint8_t>(di);
    }
    ModelFunctionReport rep = model_function_report(src, dst, out);
    if (!rep.is_model_function)
        throw PreconditionError("minimal_space_functor_arrow: induced map is not a model function");
    return out;
}

MinimalSpacesFunctor minimal_space_functors(const AtlasCategory& src, MinWhich which, const Budget& budget) {
    if (src.mode != ArrowMode::Morphism)
        throw PreconditionError("minimal_space_functors: source must be a pair-morphism category");
    MinimalSpacesFunctor out;
    for (const AtlasTriple& t : src.objs) out.object_images.push_back(minimal_space_functor_object(t, which, budget));
    for (const AtlasMorphism& m : src.morphisms)
        out.arrow_images.push_back(minimal_space_functor_arrow(m, which, budget));

    // Combinatorial shadow: objects are the distinct minimal spaces, arrows
    // the distinct (map, dom, cod) images plus whatever identities are needed.
    out.data.src = src.cat;
    SmallCat& d = out.data.dst;
    std::vector<ModelSpace> objs;
    auto obj_of = [&](const ModelSpace& ms) {
        for (std::size_t i = 0; i < objs.size(); ++i)
            if (objs[i] == ms) return i;
        objs.push_back(ms);
        d.objects.push_back("m" + std::to_string(objs.size() - 1));
        return objs.size() - 1;
    };
    for (const ModelSpace& ms : out.object_images) out.data.on_objects.push_back(static_cast<int>(obj_of(ms)));
    auto arrow_of = [&](const PointMap& map, std::size_t dom, std::size_t cod) {
        std::string key = map_key(map, objs[dom].space().full_mask());
        int idx = d.find_arrow(key, dom, cod);
        if (idx >= 0) return static_cast<std::size_t>(idx);
        d.arrows.push_back({key, dom, cod});
        return d.arrows.size() - 1;
    };
    for (std::size_t a = 0; a < src.cat.arrows.size(); ++a)
        out.data.on_arrows.push_back(static_cast<int>(
            arrow_of(out.arrow_images[a], static_cast<std::size_t>(out.data.on_objects[src.cat.arrows[a].dom]),
                     static_cast<std::size_t>(out.data.on_objects[src.cat.arrows[a].cod]))));
    d.identities.assign(d.objects.size(), std::size_t(-1));
    for (std::size_t o = 0; o < objs.size(); ++o) {
        PointMap id(objs[o].space().size());
        for (std::size_t i = 0; i < id.size(); ++i) id[i] = static_cast<std::uint8_t>(i);
        d.identities[o] = arrow_of(id, o, o);
    }
    // compose table on the image arrows
    for (std::size_t f = 0; f < d.arrows.size(); ++f)
        for (std::size_t g = 0; g < d.arrows.size(); ++g) {
            if (d.arrows[f].cod != d.arrows[g].dom) continue;
            // recover the maps from their keys is avoidable: compose the
            // underlying point maps directly
            // find representatives
            PointMap pf, pg;
            auto find_rep = [&](std::size_t idx, PointMap& slot) {
                for (std::size_t a = 0; a < out.data.on_arrows.size(); ++a)
                    if (out.data.on_arrows[a] == static_cast<int>(idx)) {
                        slot = out.arrow_images[a];
                        return true;
                    }
                // identity arrows
                for (std::size_t o = 0; o < objs.size(); ++o)
                    if (d.identities[o] == idx) {
                        slot.resize(objs[o].space().size());
                        for (std::size_t i = 0; i < slot.size(); ++i) slot[i] = static_cast<std::uint8_t>(i);
                        return true;
                    }
                return false;
            };
            if (!find_rep(f, pf) || !find_rep(g, pg)) continue;
            PointMap comp(pf.size());
            for (std::size_t i = 0; i < pf.size(); ++i) comp[i] = pg[pf[i]];
            std::string key = map_key(comp, objs[d.arrows[f].dom].space().full_mask());
            int idx = d.find_arrow(key, d.arrows[f].dom, d.arrows[g].cod);
            if (idx >= 0) d.compose[{g, f}] = static_cast<std::size_t>(idx);
        }
    return out;
}

}  // namespace af
