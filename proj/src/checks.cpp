#include <algorithm>

#include "atlasforge/cats.hpp"
#include "atlasforge/doc.hpp"

namespace af {

namespace {

// Subset match: every key in `expect` must appear in `got` with that value.
bool matches(const Json& got, const Json& expect) {
    if (!expect.is_object()) return got == expect;
    for (auto it = expect.begin(); it != expect.end(); ++it) {
        if (!got.contains(it.key()) || got.at(it.key()) != it.value()) return false;
    }
    return true;
}

PointMap map_arg(const FixtureDocument& doc, const Json& spec, const FinSpace& dom, const FinSpace& cod) {
    (void)doc;
    PointMap m(dom.size(), kNoPoint);
    for (auto it = spec.begin(); it != spec.end(); ++it) {
        int i = dom.point_index(it.key());
        int j = cod.point_index(it.value().get<std::string>());
        if (i < 0 || j < 0) throw MalformedInput("check map: unknown point");
        m[i] = static_cast<std::uint8_t>(j);
    }
    return m;
}

Mask mask_arg(const FinSpace& s, const Json& arr) {
    Mask m = 0;
    for (const auto& v : arr) {
        int i = s.point_index(v.get<std::string>());
        if (i < 0) throw MalformedInput("check: unknown point \"" + v.get<std::string>() + "\"");
        m |= Mask(1) << i;
    }
    return m;
}

int k_arg(const Json& v) {
    if (v.is_number_integer()) return v.get<int>();
    std::string s = v.get<std::string>();
    if (s == "inf") return kCInf;
    if (s == "omega") return kCOmega;
    throw MalformedInput("check: bad smoothness order");
}

Json axiom_report_json(const AxiomReport& rep) {
    Json r;
    r["cover"] = rep.cover;
    r["intersections"] = rep.intersections;
    r["arrows_continuous"] = rep.arrows_continuous;
    r["restriction_closed"] = rep.restriction_closed;
    r["inclusions_present"] = rep.inclusions_present;
    r["sheaf"] = rep.sheaf;
    r["category_ok"] = rep.category_ok;
    r["passed"] = rep.passed();
    r["counterexamples"] = rep.counterexamples;
    return r;
}

Json atlas_report_json(const AtlasReport& rep) {
    Json r;
    r["is_atlas"] = rep.is_atlas;
    r["is_full"] = rep.is_full;
    r["is_semi_maximal"] = rep.is_semi_maximal;
    r["is_maximal"] = rep.is_maximal;
    r["failures"] = rep.failures;
    return r;
}

Json charts_json(const AtlasTriple& t) {
    Json arr = Json::array();
    for (const Chart& c : t.charts) {
        Json jc;
        jc["patch"] = mask_to_json(t.total.space(), c.patch);
        jc["codomain"] = mask_to_json(t.coord.space(), c.codomain);
        jc["map"] = map_to_json(t.total.space(), t.coord.space(), c.coord, c.patch);
        arr.push_back(jc);
    }
    return arr;
}

Json bundle_charts_json(const BundleAtlas& a) {
    Json arr = Json::array();
    for (const BundleChart& c : a.charts) {
        Json jc;
        jc["patch"] = mask_to_json(a.bundle.total, c.patch);
        jc["base_open"] = mask_to_json(a.bundle.base, c.base_open);
        Json m = Json::object();
        for (std::size_t i = 0; i < a.bundle.total.size(); ++i)
            if (test_bit(c.patch, i))
                m[a.bundle.total.point_name(i)] =
                    Json::array({a.bundle.base.point_name(a.bundle.pair_base(c.coord[i])),
                                 a.bundle.fiber.point_name(a.bundle.pair_fiber(c.coord[i]))});
        jc["map"] = m;
        arr.push_back(jc);
    }
    return arr;
}

std::vector<ChainLink> chain_arg(const FixtureDocument& doc, const ModelSpace& amb, const Json& arr) {
    (void)doc;
    std::vector<ChainLink> out;
    for (const auto& jl : arr) {
        ChainLink l;
        l.dom = mask_arg(amb.space(), jl.at("dom"));
        l.cod = mask_arg(amb.space(), jl.at("cod"));
        l.map = PointMap(amb.space().size(), kNoPoint);
        for (auto it = jl.at("map").begin(); it != jl.at("map").end(); ++it) {
            int i = amb.space().point_index(it.key());
            int j = amb.space().point_index(it.value().get<std::string>());
            if (i < 0 || j < 0) throw MalformedInput("ncd link: unknown point");
            l.map[i] = static_cast<std::uint8_t>(j);
        }
        out.push_back(std::move(l));
    }
    return out;
}

Json run_one(const FixtureDocument& doc, const Json& c, const RunOptions& opts) {
    std::string kind = c.at("check").get<std::string>();
    Json result;

    if (kind == "is_continuous") {
        const FinSpace& dom = doc.space(c.at("dom").get<std::string>());
        const FinSpace& cod = doc.space(c.at("cod").get<std::string>());
        result["value"] = is_continuous(dom, cod, map_arg(doc, c.at("map"), dom, cod));
    } else if (kind == "is_homeomorphism") {
        const FinSpace& dom = doc.space(c.at("dom").get<std::string>());
        const FinSpace& cod = doc.space(c.at("cod").get<std::string>());
        result["value"] = is_homeomorphism(CMap{dom, cod, map_arg(doc, c.at("map"), dom, cod)});
    } else if (kind == "subspace") {
        const FinSpace& s = doc.space(c.at("space").get<std::string>());
        FinSpace sub = subspace(s, mask_arg(s, c.at("carrier")));
        result["points"] = sub.size();
        result["opens"] = sub.opens().size();
    } else if (kind == "product") {
        FinSpace p = product(doc.space(c.at("left").get<std::string>()),
                             doc.space(c.at("right").get<std::string>()));
        result["points"] = p.size();
        result["opens"] = p.opens().size();
        result["components"] = connected_components(p).size();
    } else if (kind == "connected_components") {
        const FinSpace& s = doc.space(c.at("space").get<std::string>());
        auto comps = connected_components(s);
        result["count"] = comps.size();
        Json arr = Json::array();
        for (Mask m : comps) arr.push_back(mask_to_json(s, m));
        result["components"] = arr;
    } else if (kind == "check_axioms") {
        AxiomReport rep = check_axioms(doc.model_space(c.at("model_space").get<std::string>()), opts.budget);
        result = axiom_report_json(rep);
    } else if (kind == "is_fine_grained") {
        result["value"] = is_fine_grained(doc.model_space(c.at("model_space").get<std::string>()));
    } else if (kind == "m_paracompactness") {
        auto rep = m_paracompactness_report(doc.model_space(c.at("model_space").get<std::string>()),
                                            opts.budget);
        result["regular"] = rep.regular;
        result["refinement_ok"] = rep.refinement_ok;
        result["m_paracompact"] = rep.m_paracompact;
        result["model_topology_opens"] = rep.model_topology.opens().size();
    } else if (kind == "subspace_relation") {
        SubspaceVerdict v = subspace_relation(doc.model_space(c.at("smaller").get<std::string>()),
                                              doc.model_space(c.at("larger").get<std::string>()));
        result["mod"] = v.mod;
        result["full_mod"] = v.full_mod;
        result["strict_mod"] = v.strict_mod;
        result["failures"] = v.failures;
    } else if (kind == "model_function") {
        const ModelSpace& a = doc.model_space(c.at("from").get<std::string>());
        const ModelSpace& b = doc.model_space(c.at("to").get<std::string>());
        auto rep = model_function_report(a, b, map_arg(doc, c.at("map"), a.space(), b.space()));
        result["is_model_function"] = rep.is_model_function;
        result["is_constrained"] = rep.is_constrained;
        result["is_homeomorphism"] = rep.is_homeomorphism;
        result["witness_failures"] = rep.witness_failures;
    } else if (kind == "classify_m_morphism") {
        const ModelSpace& a = doc.model_space(c.at("from").get<std::string>());
        const ModelSpace& b = doc.model_space(c.at("to").get<std::string>());
        MorphismMode mode = c.value("mode", "local") == std::string("global") ? MorphismMode::Global
                                                                              : MorphismMode::Local;
        Strictness strict = c.value("strict", false) ? Strictness::Strict : Strictness::Plain;
        auto v = classify_m_morphism(a, b, map_arg(doc, c.at("map"), a.space(), b.space()), mode, strict);
        result["holds"] = v.holds;
        result["variant"] = v.variant;
        if (!v.failure.empty()) result["failure"] = v.failure;
    } else if (kind == "complete_ncd" || kind == "ncd_local") {
        const ModelSpace& amb = doc.model_space(c.at("ambient").get<std::string>());
        NcdProblem p{chain_arg(doc, amb, c.at("left")), chain_arg(doc, amb, c.at("right")), amb};
        if (kind == "complete_ncd") {
            NcdVerdict v = complete_ncd(p);
            result["left"] = v.left;
            result["right"] = v.right;
            result["strong"] = v.strong;
            if (v.witness) {
                result["witness"] = Json{{"dom", mask_to_json(amb.space(), v.witness->dom)},
                                         {"cod", mask_to_json(amb.space(), v.witness->cod)},
                                         {"map", map_to_json(amb.space(), amb.space(), v.witness->map,
                                                             v.witness->dom)}};
            }
        } else {
            std::string fl = c.value("flavor", "strong");
            NcdFlavor flavor = fl == "left"    ? NcdFlavor::Left
                               : fl == "right" ? NcdFlavor::Right
                                               : NcdFlavor::Strong;
            NcdLocalResult r = ncd_local(p, flavor);
            result["ok"] = r.ok;
            result["points_checked"] = r.points.size();
        }
    } else if (kind == "chart_check") {
        const AtlasTriple& t = doc.atlas(c.at("atlas").get<std::string>());
        std::size_t idx = c.at("chart").get<std::size_t>();
        if (idx >= t.charts.size()) throw MalformedInput("chart_check: chart index out of range");
        ChartCheck cc = chart_check(t.charts[idx], t.total, t.coord, t.flavor);
        result["valid"] = cc.valid;
        result["failures"] = cc.failures;
    } else if (kind == "are_compatible") {
        const AtlasTriple& t = doc.atlas(c.at("atlas").get<std::string>());
        std::size_t i = c.at("chart1").get<std::size_t>();
        std::size_t k2 = c.at("chart2").get<std::size_t>();
        result["value"] = are_compatible(t.charts.at(i), t.charts.at(k2), t.total, t.coord);
    } else if (kind == "atlas_report") {
        result = atlas_report_json(atlas_report(doc.atlas(c.at("atlas").get<std::string>()), opts.budget,
                                                opts.exec));
    } else if (kind == "maximal_closure") {
        AtlasTriple closed = maximal_closure(doc.atlas(c.at("atlas").get<std::string>()), opts.budget,
                                             opts.exec);
        result["charts"] = charts_json(closed);
        result["chart_count"] = closed.charts.size();
        AtlasTriple again = maximal_closure(closed, opts.budget, opts.exec);
        result["idempotent"] = again == closed;
    } else if (kind == "classify_morphism") {
        auto it = doc.morphisms.find(c.at("morphism").get<std::string>());
        if (it == doc.morphisms.end()) throw MalformedInput("undefined morphism");
        MorphismClassification cls = classify(it->second);
        result["near"] = cls.near;
        result["morphism"] = cls.morphism;
        result["constrained"] = cls.constrained;
        result["semi_strict"] = cls.semi_strict;
        result["strict"] = cls.strict;
    } else if (kind == "classify_classic") {
        const AtlasTriple& s = doc.atlas(c.at("source").get<std::string>());
        const AtlasTriple& t = doc.atlas(c.at("target").get<std::string>());
        auto cls = classify_classic(map_arg(doc, c.at("map"), s.total.space(), t.total.space()), s, t);
        result["classic"] = cls.classic;
        result["semi_strict"] = cls.semi_strict;
        result["strict"] = cls.strict;
        result["constrained"] = cls.constrained;
    } else if (kind == "category_laws") {
        std::vector<AtlasTriple> objs;
        for (const auto& n : c.at("objects")) objs.push_back(doc.atlas(n.get<std::string>()));
        ArrowMode mode = c.value("arrow_mode", "morphism") == std::string("classic") ? ArrowMode::Classic
                                                                                     : ArrowMode::Morphism;
        AtlasCategory cat = build_atlas_category(objs, mode, {}, opts.budget, opts.exec);
        CatLawReport rep = check_category_laws(cat.cat);
        result["closure"] = rep.closure;
        result["associativity"] = rep.associativity;
        result["identity"] = rep.identity;
        result["passed"] = rep.passed();
        result["arrows"] = cat.cat.arrows.size();
        result["counterexamples"] = rep.counterexamples;
    } else if (kind == "functor_laws") {
        std::vector<AtlasTriple> objs;
        for (const auto& n : c.at("objects")) objs.push_back(doc.atlas(n.get<std::string>()));
        AtlasCategory cat = build_atlas_category(objs, ArrowMode::Morphism, {}, opts.budget, opts.exec);
        std::string which = c.at("functor").get<std::string>();
        FunctorLawReport rep;
        if (which == "M_Top") {
            rep = check_functor_laws(functor_M_Top(cat, true, opts.budget, opts.exec).data);
        } else if (which == "Top_M") {
            rep = check_functor_laws(functor_Top_M(cat, opts.budget, opts.exec).data);
        } else if (which == "M_Classic") {
            rep = check_functor_laws(functor_M_Classic(cat, opts.budget, opts.exec).data);
        } else if (which == "F1" || which == "F2") {
            rep = check_functor_laws(
                minimal_space_functors(cat, which == "F1" ? MinWhich::F1 : MinWhich::F2, opts.budget).data);
        } else {
            throw MalformedInput("functor_laws: unknown functor \"" + which + "\"");
        }
        result["endpoints"] = rep.endpoints;
        result["identity"] = rep.identity;
        result["composition"] = rep.composition;
        result["passed"] = rep.passed();
        result["counterexamples"] = rep.counterexamples;
    } else if (kind == "top_m_round_trip") {
        std::vector<AtlasTriple> objs;
        for (const auto& n : c.at("objects")) objs.push_back(doc.atlas(n.get<std::string>()));
        for (auto& t : objs) t.total_is_topological = true;
        AtlasCategory cat = build_atlas_category(objs, ArrowMode::Morphism, {}, opts.budget, opts.exec);
        AtlasFunctor up = functor_Top_M(cat, opts.budget, opts.exec);
        AtlasFunctor down = functor_M_Top(up.target, true, opts.budget, opts.exec);
        bool identity_ok = true;
        for (std::size_t o = 0; o < cat.objs.size(); ++o) {
            int mid = up.data.on_objects[o];
            if (mid < 0 || down.data.on_objects[mid] < 0 ||
                !(down.target.objs[down.data.on_objects[mid]] == cat.objs[o]))
                identity_ok = false;
        }
        for (std::size_t a = 0; a < cat.cat.arrows.size() && identity_ok; ++a) {
            int mid = up.data.on_arrows[a];
            if (mid < 0 || down.data.on_arrows[mid] < 0 ||
                down.target.cat.arrows[down.data.on_arrows[mid]].payload != cat.cat.arrows[a].payload)
                identity_ok = false;
        }
        result["up_laws"] = check_functor_laws(up.data).passed();
        result["down_laws"] = check_functor_laws(down.data).passed();
        result["round_trip_identity"] = identity_ok;
    } else if (kind == "group_axioms") {
        auto it = doc.groups.find(c.at("group").get<std::string>());
        if (it == doc.groups.end()) throw MalformedInput("undefined group");
        check_group_axioms(it->second);  // throws on failure; load already checked
        result["value"] = true;
    } else if (kind == "grho_morphism") {
        const BundleAtlas& s = doc.bundle(c.at("from").get<std::string>());
        const BundleAtlas& t = doc.bundle(c.at("to").get<std::string>());
        GrhoSpec g1{s.bundle.base, s.bundle.fiber, s.bundle.action};
        GrhoSpec g2{t.bundle.base, t.bundle.fiber, t.bundle.action};
        PointMap fc(s.bundle.product.size(), kNoPoint);
        for (auto it2 = c.at("map").begin(); it2 != c.at("map").end(); ++it2) {
            int p = s.bundle.product.point_index(it2.key());
            int q = t.bundle.product.point_index(it2.value().get<std::string>());
            if (p < 0 || q < 0) throw MalformedInput("grho_morphism: unknown product point");
            fc[p] = static_cast<std::uint8_t>(q);
        }
        auto rep = grho_morphism_report(g1, g2, fc);
        result["is_grho_morphism"] = rep.is_grho_morphism;
        if (!rep.witness.empty()) result["witness"] = rep.witness;
    } else if (kind == "bundle_atlas_report") {
        const BundleAtlas& a = doc.bundle(c.at("bundle").get<std::string>());
        BundleAtlasReport rep = bundle_atlas_report(a, opts.budget, opts.exec);
        result["is_atlas"] = rep.is_atlas;
        result["is_full"] = rep.is_full;
        result["is_semi_maximal"] = rep.is_semi_maximal;
        result["is_maximal"] = rep.is_maximal;
        result["failures"] = rep.failures;
    } else if (kind == "bundle_maximal_closure") {
        BundleAtlas closed = bundle_maximal_closure(doc.bundle(c.at("bundle").get<std::string>()),
                                                    opts.budget, opts.exec);
        result["chart_count"] = closed.charts.size();
        result["charts"] = bundle_charts_json(closed);
        result["total_components"] = connected_components(closed.bundle.total).size();
    } else if (kind == "derive_projection") {
        const BundleAtlas& a = doc.bundle(c.at("bundle").get<std::string>());
        PointMap pi = derive_projection(a.charts, a.bundle.total, a.bundle.base, a.bundle.product);
        result["matches_declared"] = pi == a.bundle.proj;
        result["projection"] = map_to_json(a.bundle.total, a.bundle.base, pi, a.bundle.total.full_mask());
    } else if (kind == "bundle_morphism_search") {
        const BundleAtlas& s = doc.bundle(c.at("from").get<std::string>());
        const BundleAtlas& t = doc.bundle(c.at("to").get<std::string>());
        bool bij = c.value("bijective_fe", false);
        BundleAtlas cs = bundle_maximal_closure(s, opts.budget, opts.exec);
        BundleAtlas ct2 = bundle_maximal_closure(t, opts.budget, opts.exec);
        auto found = enumerate_bundle_morphisms(cs, ct2, BundleMorphismKind::Morphism, bij, opts.budget,
                                                opts.exec);
        result["count"] = found.size();
    } else if (kind == "bundle_category_laws") {
        std::vector<BundleAtlas> objs;
        for (const auto& n : c.at("bundles"))
            objs.push_back(bundle_maximal_closure(doc.bundle(n.get<std::string>()), opts.budget, opts.exec));
        BundleCategory cat = fiber_bundle_category(objs, opts.budget, opts.exec);
        CatLawReport rep = check_category_laws(cat.cat);
        result["passed"] = rep.passed();
        result["arrows"] = cat.cat.arrows.size();
        result["counterexamples"] = rep.counterexamples;
    } else if (kind == "bundle_round_trip") {
        std::vector<BundleAtlas> objs;
        for (const auto& n : c.at("bundles"))
            objs.push_back(bundle_maximal_closure(doc.bundle(n.get<std::string>()), opts.budget, opts.exec));
        BundleCategory cat = fiber_bundle_category(objs, opts.budget, opts.exec);
        BundleFunctorPair pair = bundle_functors(cat, opts.budget, opts.exec);
        bool identity_ok = true;
        for (std::size_t o = 0; o < cat.objs.size(); ++o)
            if (pair.from_m.on_objects[pair.to_m.on_objects[o]] != static_cast<int>(o)) identity_ok = false;
        for (std::size_t a = 0; a < cat.cat.arrows.size() && identity_ok; ++a)
            if (pair.from_m.on_arrows[pair.to_m.on_arrows[a]] != static_cast<int>(a)) identity_ok = false;
        result["to_m_laws"] = check_functor_laws(pair.to_m).passed();
        result["from_m_laws"] = check_functor_laws(pair.from_m).passed();
        result["round_trip_identity"] = identity_ok;
    } else if (kind == "transition_diffeo") {
        CkGluingData g = doc.ck(c.at("ck").get<std::string>());
        if (opts.tol >= 0) g.tol.inverse_tol = opts.tol;
        int idx = g.transition_index(c.at("from").get<std::string>(), c.at("to").get<std::string>());
        if (idx < 0) throw MalformedInput("transition_diffeo: no such transition");
        TransitionReport rep = transition_diffeo_check(g, static_cast<std::size_t>(idx),
                                                       c.contains("k") ? k_arg(c.at("k")) : kCInf,
                                                       opts.exec);
        result["passes"] = rep.passes;
        result["exact_mode"] = rep.exact_mode;
        result["max_inverse_residual"] = rep.max_inverse_residual;
        result["min_abs_jacobian_det"] = rep.min_abs_jacobian_det;
        result["min_jacobian_gram_det"] = rep.min_jacobian_gram_det;
        result["verdict"] = rep.verdict;
        result["failures"] = rep.failures;
    } else if (kind == "ck_atlas_report") {
        CkGluingData g = doc.ck(c.at("ck").get<std::string>());
        if (opts.tol >= 0) g.tol.inverse_tol = opts.tol;
        CkAtlasReport rep = ck_atlas_report(g, c.contains("k") ? k_arg(c.at("k")) : kCInf, opts.exec);
        result["is_atlas"] = rep.is_atlas;
        result["is_full"] = rep.is_full;
        result["non_degenerate"] = rep.non_degenerate;
        result["failures"] = rep.failures;
    } else if (kind == "manifold_check") {
        CkGluingData g = doc.ck(c.at("ck").get<std::string>());
        ManifoldReport rep = manifold_check(g, c.contains("k") ? k_arg(c.at("k")) : kCInf, opts.exec);
        result["is_manifold_data"] = rep.is_manifold_data;
        result["is_full"] = rep.is_full;
        result["maximality"] = rep.maximality;
    } else {
        throw MalformedInput("unknown check name \"" + kind + "\"");
    }
    return result;
}

}  // namespace

Json run_checks(const FixtureDocument& doc, const RunOptions& opts) {
    Json report;
    report["version"] = 1;
    Json checks = Json::array();
    bool overall = true;
    for (const auto& c : doc.checks) {
        Json entry;
        entry["check"] = c.at("check");
        if (c.contains("name")) entry["name"] = c.at("name");
        bool pass = true;
        try {
            Json result = run_one(doc, c, opts);
            entry["result"] = result;
            if (c.contains("expect")) {
                pass = matches(result.contains("value") && !c.at("expect").is_object() ? result.at("value")
                                                                                       : result,
                               c.at("expect"));
                if (!pass) entry["details"] = Json{{"expected", c.at("expect")}};
            }
        } catch (const MalformedInput&) {
            throw;  // document-level problems abort the run (exit class 2)
        } catch (const BudgetExceeded&) {
            throw;  // never report a partial search as a verdict
        } catch (const std::exception& e) {
            pass = false;
            entry["details"] = Json{{"error", e.what()}};
        }
        entry["pass"] = pass;
        overall = overall && pass;
        checks.push_back(entry);
    }
    report["checks"] = checks;
    report["overall"] = overall;
    return report;
}

}  // namespace af
