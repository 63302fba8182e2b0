#include "atlasforge/modelspace.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace af {

bool operator<(const Arrow& a, const Arrow& b) {
    if (a.dom != b.dom) return a.dom < b.dom;
    if (a.cod != b.cod) return a.cod < b.cod;
    for (std::size_t i = 0; i < 64; ++i)
        if (test_bit(a.dom, i)) {
            if (a.map[i] != b.map[i]) return a.map[i] < b.map[i];
        }
    return false;
}

namespace {

Arrow canonical_arrow(std::size_t carrier, Mask dom, Mask cod, const PointMap& map) {
    Arrow a;
    a.dom = dom;
    a.cod = cod;
    a.map.assign(carrier, kNoPoint);
    for (std::size_t i = 0; i < carrier && i < map.size(); ++i)
        if (test_bit(dom, i)) a.map[i] = map[i];
    return a;
}

}  // namespace

ModelSpace::ModelSpace(FinSpace space, std::vector<Mask> objects, std::vector<Arrow> arrows)
    : space_(std::move(space)), kind_(Kind::Explicit) {
    std::set<Mask> objs;
    for (Mask o : objects) {
        if (!space_.is_open(o)) throw MalformedInput("ModelSpace: object is not an open set");
        objs.insert(o);
    }
    objects_.assign(objs.begin(), objs.end());
    std::set<Arrow> arrs;
    for (const Arrow& a : arrows) {
        if (!std::binary_search(objects_.begin(), objects_.end(), a.dom) ||
            !std::binary_search(objects_.begin(), objects_.end(), a.cod))
            throw MalformedInput("ModelSpace: arrow endpoints are not objects");
        for (std::size_t i = 0; i < space_.size(); ++i)
            if (test_bit(a.dom, i)) {
                if (i >= a.map.size() || a.map[i] == kNoPoint || a.map[i] >= space_.size() ||
                    !test_bit(a.cod, a.map[i]))
                    throw MalformedInput("ModelSpace: arrow map is not a total map into its codomain");
            }
        arrs.insert(canonical_arrow(space_.size(), a.dom, a.cod, a.map));
    }
    arrows_.assign(arrs.begin(), arrs.end());
}

ModelSpace ModelSpace::trivial_all(FinSpace space) {
    ModelSpace m;
    m.space_ = std::move(space);
    m.objects_ = m.space_.opens();
    m.kind_ = Kind::TrivialAll;
    return m;
}

bool ModelSpace::is_object(Mask m) const {
    return std::binary_search(objects_.begin(), objects_.end(), m);
}

bool ModelSpace::has_arrow(Mask dom, Mask cod, const PointMap& map) const {
    if (!is_object(dom) || !is_object(cod)) return false;
    if ((map_image(map, dom) & ~cod) != 0) return false;
    if (kind_ == Kind::TrivialAll) return is_continuous_between(space_, dom, space_, cod, map);
    Arrow probe = canonical_arrow(space_.size(), dom, cod, map);
    return std::binary_search(arrows_.begin(), arrows_.end(), probe);
}

std::vector<Arrow> ModelSpace::arrows_between(Mask dom, Mask cod, std::size_t cap) const {
    std::vector<Arrow> out;
    if (!is_object(dom) || !is_object(cod)) return out;
    if (kind_ == Kind::TrivialAll) {
        for (auto& m : continuous_maps_between(space_, dom, space_, cod, cap))
            out.push_back(canonical_arrow(space_.size(), dom, cod, m));
        return out;
    }
    for (const Arrow& a : arrows_)
        if (a.dom == dom && a.cod == cod) out.push_back(a);
    return out;
}

std::vector<Arrow> ModelSpace::all_arrows(std::size_t cap) const {
    if (kind_ == Kind::Explicit) return arrows_;
    std::vector<Arrow> out;
    for (Mask d : objects_)
        for (Mask c : objects_) {
            auto batch = arrows_between(d, c, cap);
            out.insert(out.end(), batch.begin(), batch.end());
            if (out.size() > cap) throw BudgetExceeded("all_arrows: trivial model space too large");
        }
    std::sort(out.begin(), out.end());
    return out;
}

bool ModelSpace::arrow_is_isomorphism(const Arrow& a) const {
    if (!has_arrow(a)) return false;
    if (popcount(a.dom) != popcount(a.cod)) return false;
    if (map_image(a.map, a.dom) != a.cod) return false;
    Mask seen = 0;
    for (std::size_t i = 0; i < space_.size(); ++i)
        if (test_bit(a.dom, i)) seen |= Mask(1) << a.map[i];
    if (popcount(seen) != popcount(a.dom)) return false;
    PointMap inv = invert_partial(a.map, a.dom, space_.size());
    return has_arrow(a.cod, a.dom, inv);
}

std::vector<Arrow> ModelSpace::isomorphisms_between(Mask dom, Mask cod) const {
    std::vector<Arrow> out;
    for (const Arrow& a : arrows_between(dom, cod))
        if (arrow_is_isomorphism(a)) out.push_back(a);
    return out;
}

bool ModelSpace::operator==(const ModelSpace& other) const {
    if (space_ != other.space_ || objects_ != other.objects_) return false;
    if (kind_ == other.kind_)
        return kind_ == Kind::TrivialAll || arrows_ == other.arrows_;
    // Mixed kinds: compare arrow sets extensionally.
    return all_arrows() == other.all_arrows();
}

// ---------------------------------------------------------------------------
// check_axioms

namespace {

// The restricted sheaf condition, checked per target object pair. A continuous
// f: U -> V violates it iff the arrows it extends cover U and V exactly while
// f itself is missing from the arrow set. Any witness family is contained in
// the maximal compatible family, so only that one needs to be inspected.
bool sheaf_violation(const ModelSpace& m, Mask u, Mask v, const std::vector<Arrow>& arrows,
                     const PointMap& f, std::string* note) {
    if (m.has_arrow(u, v, f)) return false;
    Mask dom_union = 0, cod_union = 0;
    for (const Arrow& g : arrows) {
        if (!subset(g.dom, u) || !subset(g.cod, v)) continue;
        if (!maps_equal_on(g.map, f, g.dom)) continue;
        dom_union |= g.dom;
        cod_union |= g.cod;
    }
    if (dom_union == u && cod_union == v) {
        if (note) *note = "gluable map missing from arrows on " + mask_to_string(m.space(), u);
        return true;
    }
    return false;
}

}  // namespace

AxiomReport check_axioms(const ModelSpace& m, const Budget& budget) {
    AxiomReport rep;
    const FinSpace& s = m.space();
    const auto& objs = m.objects();

    Mask cover = 0;
    for (Mask o : objs) cover |= o;
    rep.cover = (cover == s.full_mask());
    if (!rep.cover) rep.counterexamples.push_back("item1: objects do not cover the carrier");

    rep.intersections = true;
    for (Mask a : objs)
        for (Mask b : objs)
            if (!m.is_object(a & b)) {
                rep.intersections = false;
                rep.counterexamples.push_back("item2: intersection of " + mask_to_string(s, a) + " and " +
                                              mask_to_string(s, b) + " is not an object");
                goto after_item2;
            }
after_item2:;

    std::vector<Arrow> arrows = m.all_arrows(budget.max_candidates);

    rep.arrows_continuous = true;
    for (const Arrow& a : arrows)
        if (!is_continuous_between(s, a.dom, s, a.cod, a.map)) {
            rep.arrows_continuous = false;
            rep.counterexamples.push_back("item3: discontinuous arrow from " + mask_to_string(s, a.dom));
            break;
        }

    rep.restriction_closed = true;
    for (const Arrow& a : arrows) {
        for (Mask d2 : objs) {
            if (!subset(d2, a.dom)) continue;
            for (Mask c2 : objs) {
                if (!subset(c2, a.cod)) continue;
                if ((map_image(a.map, d2) & ~c2) != 0) continue;
                if (!m.has_arrow(d2, c2, restrict_map(a.map, d2))) {
                    rep.restriction_closed = false;
                    rep.counterexamples.push_back("item4: missing restriction of an arrow to " +
                                                  mask_to_string(s, d2) + " -> " + mask_to_string(s, c2));
                    goto after_item4;
                }
            }
        }
    }
after_item4:;

    rep.inclusions_present = true;
    for (Mask a : objs)
        for (Mask b : objs) {
            if (!subset(a, b)) continue;
            if (!m.has_arrow(a, b, identity_partial(s.size(), a))) {
                rep.inclusions_present = false;
                rep.counterexamples.push_back("item5: missing inclusion " + mask_to_string(s, a) + " into " +
                                              mask_to_string(s, b));
                goto after_item5;
            }
        }
after_item5:;

    rep.sheaf = true;
    for (Mask u : objs) {
        for (Mask v : objs) {
            auto maps = continuous_maps_between(s, u, s, v, budget.max_maps_per_pair);
            for (const PointMap& f : maps) {
                std::string note;
                if (sheaf_violation(m, u, v, arrows, f, &note)) {
                    rep.sheaf = false;
                    rep.counterexamples.push_back("item6: " + note);
                    goto after_item6;
                }
            }
        }
    }
after_item6:;

    rep.category_ok = true;
    for (Mask o : objs)
        if (!m.has_arrow(o, o, identity_partial(s.size(), o))) {
            rep.category_ok = false;
            rep.counterexamples.push_back("category: missing identity on " + mask_to_string(s, o));
            break;
        }
    if (rep.category_ok)
        for (const Arrow& f : arrows) {
            for (const Arrow& g : arrows) {
                if (g.dom != f.cod) continue;
                PointMap comp = compose_partial(g.map, f.map, f.dom);
                if (!m.has_arrow(f.dom, g.cod, comp)) {
                    rep.category_ok = false;
                    rep.counterexamples.push_back("category: composite missing for arrows " +
                                                  mask_to_string(s, f.dom) + " -> " + mask_to_string(s, f.cod) +
                                                  " -> " + mask_to_string(s, g.cod));
                    goto after_cat;
                }
            }
        }
after_cat:;

    return rep;
}

// ---------------------------------------------------------------------------
// constructions

ModelSpace trivial(const FinSpace& space) { return ModelSpace::trivial_all(space); }

ModelSpace minimal_closure(const FinSpace& space, const std::vector<Mask>& seed_objects,
                           const std::vector<Arrow>& seed_arrows, const Budget& budget) {
    std::set<Mask> seed_set;
    for (Mask o : seed_objects) {
        if (!space.is_open(o)) throw MalformedInput("minimal_closure: seed object is not open");
        seed_set.insert(o);
    }
    for (const Arrow& a : seed_arrows)
        if (!seed_set.count(a.dom) || !seed_set.count(a.cod))
            throw MalformedInput("minimal_closure: seed arrow endpoints are not seed objects");

    // Carrier is the union of the seeds with the relative topology (Eq 5.1).
    Mask carrier_mask = 0;
    for (Mask o : seed_set) carrier_mask |= o;
    FinSpace carrier = subspace(space, carrier_mask);

    // Reindex masks/maps from `space` to `carrier`.
    std::vector<std::uint8_t> reindex(space.size(), kNoPoint);
    {
        std::uint8_t k = 0;
        for (std::size_t i = 0; i < space.size(); ++i)
            if (test_bit(carrier_mask, i)) reindex[i] = k++;
    }
    auto remask = [&](Mask m) {
        Mask r = 0;
        for (std::size_t i = 0; i < space.size(); ++i)
            if (test_bit(m & carrier_mask, i)) r |= Mask(1) << reindex[i];
        return r;
    };

    std::set<Mask> objs;
    for (Mask o : seed_set) objs.insert(remask(o));
    // Close objects under pairwise intersection.
    {
        bool changed = true;
        while (changed) {
            changed = false;
            std::vector<Mask> cur(objs.begin(), objs.end());
            for (std::size_t i = 0; i < cur.size(); ++i)
                for (std::size_t j = i + 1; j < cur.size(); ++j)
                    if (objs.insert(cur[i] & cur[j]).second) changed = true;
        }
    }
    std::vector<Mask> objects(objs.begin(), objs.end());

    std::set<Arrow> arrows;
    for (const Arrow& a : seed_arrows) {
        PointMap m(carrier.size(), kNoPoint);
        for (std::size_t i = 0; i < space.size(); ++i)
            if (test_bit(a.dom, i)) m[reindex[i]] = reindex[a.map[i]];
        arrows.insert(canonical_arrow(carrier.size(), remask(a.dom), remask(a.cod), m));
    }
    for (Mask o : objects) arrows.insert(canonical_arrow(carrier.size(), o, o, identity_partial(carrier.size(), o)));

    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<Arrow> cur(arrows.begin(), arrows.end());
        if (cur.size() > budget.max_candidates) throw BudgetExceeded("minimal_closure: arrow set too large");
        // inclusions (item 5)
        for (Mask a : objects)
            for (Mask b : objects)
                if (subset(a, b))
                    if (arrows.insert(canonical_arrow(carrier.size(), a, b, identity_partial(carrier.size(), a)))
                            .second)
                        changed = true;
        // restrictions (item 4)
        for (const Arrow& f : cur)
            for (Mask d2 : objects) {
                if (!subset(d2, f.dom)) continue;
                for (Mask c2 : objects) {
                    if (!subset(c2, f.cod)) continue;
                    if ((map_image(f.map, d2) & ~c2) != 0) continue;
                    if (arrows.insert(canonical_arrow(carrier.size(), d2, c2, restrict_map(f.map, d2))).second)
                        changed = true;
                }
            }
        // composition
        for (const Arrow& f : cur)
            for (const Arrow& g : cur) {
                if (g.dom != f.cod) continue;
                if (arrows.insert(canonical_arrow(carrier.size(), f.dom, g.cod,
                                                  compose_partial(g.map, f.map, f.dom)))
                        .second)
                    changed = true;
            }
        // gluing (item 6)
        std::vector<Arrow> now(arrows.begin(), arrows.end());
        for (Mask u : objects)
            for (Mask v : objects) {
                for (const PointMap& f : continuous_maps_between(carrier, u, carrier, v, budget.max_maps_per_pair)) {
                    Arrow probe = canonical_arrow(carrier.size(), u, v, f);
                    if (arrows.count(probe)) continue;
                    Mask dom_union = 0, cod_union = 0;
                    for (const Arrow& g : now) {
                        if (!subset(g.dom, u) || !subset(g.cod, v)) continue;
                        if (!maps_equal_on(g.map, f, g.dom)) continue;
                        dom_union |= g.dom;
                        cod_union |= g.cod;
                    }
                    if (dom_union == u && cod_union == v) {
                        arrows.insert(probe);
                        changed = true;
                    }
                }
            }
    }

    return ModelSpace(carrier, objects, std::vector<Arrow>(arrows.begin(), arrows.end()));
}

ModelSpace relative(const ModelSpace& m, Mask t) {
    if (!m.is_object(t)) throw PreconditionError("relative: set is not a model neighborhood");
    FinSpace sub = subspace(m.space(), t);
    std::vector<std::uint8_t> reindex(m.space().size(), kNoPoint);
    {
        std::uint8_t k = 0;
        for (std::size_t i = 0; i < m.space().size(); ++i)
            if (test_bit(t, i)) reindex[i] = k++;
    }
    auto remask = [&](Mask x) {
        Mask r = 0;
        for (std::size_t i = 0; i < m.space().size(); ++i)
            if (test_bit(x, i)) r |= Mask(1) << reindex[i];
        return r;
    };
    std::vector<Mask> objs;
    for (Mask o : m.objects())
        if (subset(o, t)) objs.push_back(remask(o));
    if (m.kind() == ModelSpace::Kind::TrivialAll) {
        // Relative model space of a trivial model space at an open set is the
        // trivial model space of the subspace.
        return ModelSpace::trivial_all(sub);
    }
    std::vector<Arrow> arrs;
    for (const Arrow& a : m.all_arrows())
        if (subset(a.dom, t) && subset(a.cod, t)) {
            PointMap nm(sub.size(), kNoPoint);
            for (std::size_t i = 0; i < m.space().size(); ++i)
                if (test_bit(a.dom, i)) nm[reindex[i]] = reindex[a.map[i]];
            arrs.push_back(canonical_arrow(sub.size(), remask(a.dom), remask(a.cod), nm));
        }
    return ModelSpace(sub, objs, arrs);
}

// ---------------------------------------------------------------------------
// model subspaces (Def 2.6)

namespace {

// Maps a mask over the carrier of `sub` to a mask over the carrier of `super`
// via point names; returns nullopt when a point is missing.
std::optional<Mask> lift_mask(const FinSpace& sub, const FinSpace& super, Mask m) {
    Mask r = 0;
    for (std::size_t i = 0; i < sub.size(); ++i)
        if (test_bit(m, i)) {
            int j = super.point_index(sub.point_name(i));
            if (j < 0) return std::nullopt;
            r |= Mask(1) << j;
        }
    return r;
}

std::optional<PointMap> lift_map(const FinSpace& sub, const FinSpace& super, const PointMap& m, Mask dom) {
    PointMap r(super.size(), kNoPoint);
    for (std::size_t i = 0; i < sub.size(); ++i)
        if (test_bit(dom, i)) {
            int a = super.point_index(sub.point_name(i));
            int b = super.point_index(sub.point_name(m[i]));
            if (a < 0 || b < 0) return std::nullopt;
            r[a] = static_cast<std::uint8_t>(b);
        }
    return r;
}

}  // namespace

SubspaceVerdict subspace_relation(const ModelSpace& a, const ModelSpace& b) {
    SubspaceVerdict v;
    const FinSpace& sa = a.space();
    const FinSpace& sb = b.space();

    // clause 2: the carrier of a is a subspace of the carrier of b.
    Mask carrier_in_b = 0;
    bool points_ok = true;
    for (std::size_t i = 0; i < sa.size(); ++i) {
        int j = sb.point_index(sa.point_name(i));
        if (j < 0) {
            points_ok = false;
            break;
        }
        carrier_in_b |= Mask(1) << j;
    }
    if (!points_ok) {
        v.failures.push_back("clause2: carrier points not contained in the larger space");
        return v;
    }
    if (subspace(sb, carrier_in_b) != sa) {
        v.failures.push_back("clause2: carrier topology is not the relative topology");
        return v;
    }

    bool clause3 = true, clause4 = true, clause5 = true;
    // clause 3: full subcategory. Objects of a are objects of b and the Hom
    // sets agree on shared object pairs.
    for (Mask o : a.objects()) {
        auto lifted = lift_mask(sa, sb, o);
        if (!lifted || !b.is_object(*lifted)) {
            clause3 = false;
            v.failures.push_back("clause3: object " + mask_to_string(sa, o) + " missing in larger space");
            break;
        }
    }
    if (clause3) {
        for (Mask d : a.objects()) {
            for (Mask c : a.objects()) {
                Mask dl = *lift_mask(sa, sb, d), cl = *lift_mask(sa, sb, c);
                auto in_a = a.arrows_between(d, c);
                auto in_b = b.arrows_between(dl, cl);
                if (in_a.size() != in_b.size()) {
                    clause3 = false;
                } else {
                    for (const Arrow& x : in_a) {
                        auto lm = lift_map(sa, sb, x.map, x.dom);
                        if (!lm || !b.has_arrow(dl, cl, *lm)) {
                            clause3 = false;
                            break;
                        }
                    }
                }
                if (!clause3) {
                    v.failures.push_back("clause3: Hom(" + mask_to_string(sa, d) + "," + mask_to_string(sa, c) +
                                         ") differs");
                    goto clause3_done;
                }
            }
        }
    clause3_done:;
    }

    // clause 4: intersections of the carrier with objects of b are objects of a.
    for (Mask o : b.objects()) {
        Mask inter = o & carrier_in_b;
        Mask down = 0;
        for (std::size_t j = 0; j < sb.size(); ++j)
            if (test_bit(inter, j)) {
                int i = sa.point_index(sb.point_name(j));
                down |= Mask(1) << i;
            }
        if (!a.is_object(down)) {
            clause4 = false;
            v.failures.push_back("clause4: " + mask_to_string(sb, o) + " meets the carrier outside the objects");
            break;
        }
    }

    // clause 5: objects of b inside the carrier are objects of a.
    for (Mask o : b.objects()) {
        if (!subset(o, carrier_in_b)) continue;
        Mask down = 0;
        for (std::size_t j = 0; j < sb.size(); ++j)
            if (test_bit(o, j)) down |= Mask(1) << sa.point_index(sb.point_name(j));
        if (!a.is_object(down)) {
            clause5 = false;
            v.failures.push_back("clause5: object " + mask_to_string(sb, o) + " missing in the smaller space");
            break;
        }
    }

    v.mod = clause3 && clause4 && clause5;
    if (!v.mod) return v;

    v.full_mod = (carrier_in_b == sb.full_mask()) && sa == sb;

    // strict: the inclusion is open and continuous between the carriers.
    PointMap incl(sa.size(), kNoPoint);
    for (std::size_t i = 0; i < sa.size(); ++i)
        incl[i] = static_cast<std::uint8_t>(sb.point_index(sa.point_name(i)));
    bool open_map = true, cont = true;
    for (Mask u : sa.opens())
        if (!sb.is_open(map_image(incl, u == 0 ? 0 : sa.full_mask() & u))) {
            open_map = false;
            break;
        }
    for (Mask w : sb.opens()) {
        Mask pre = map_preimage(incl, sa.full_mask(), w);
        if (!sa.is_open(pre)) {
            cont = false;
            break;
        }
    }
    v.strict_mod = open_map && cont;
    if (!v.strict_mod) v.failures.push_back("strict: inclusion not open and continuous");

    v.relation = v.full_mod && v.strict_mod ? SubspaceRelation::StrictMod
                 : v.strict_mod             ? SubspaceRelation::StrictMod
                 : v.full_mod               ? SubspaceRelation::FullMod
                                            : SubspaceRelation::Mod;
    return v;
}

// ---------------------------------------------------------------------------
// model functions

ModelFunctionReport model_function_report(const ModelSpace& a, const ModelSpace& b, const PointMap& f) {
    ModelFunctionReport rep;
    const FinSpace& sa = a.space();
    const FinSpace& sb = b.space();
    if (f.size() != sa.size()) throw PreconditionError("model_function_report: map not total on carrier");
    for (auto x : f)
        if (x == kNoPoint || x >= sb.size())
            throw PreconditionError("model_function_report: value outside codomain carrier");
    if (!is_continuous_between(sa, sa.full_mask(), sb, sb.full_mask(), f))
        throw PreconditionError("model_function_report: map is not continuous");

    bool eq71 = true, eq72 = true;
    for (Mask vmask : b.objects()) {
        Mask pre = map_preimage(f, sa.full_mask(), vmask);
        if (!a.is_object(pre)) {
            eq71 = false;
            rep.witness_failures.push_back("preimage of " + mask_to_string(sb, vmask) +
                                           " is not a model neighborhood");
            break;
        }
    }
    for (Mask umask : a.objects()) {
        Mask img = map_image(f, umask);
        bool found = false;
        for (Mask vmask : b.objects())
            if (subset(img, vmask)) {
                found = true;
                break;
            }
        if (!found) {
            eq72 = false;
            rep.witness_failures.push_back("image of " + mask_to_string(sa, umask) +
                                           " lies in no model neighborhood");
            break;
        }
    }
    rep.is_model_function = eq71 && eq72;

    Mask total_img = map_image(f, sa.full_mask());
    rep.is_constrained = false;
    for (Mask vmask : b.objects())
        if (subset(total_img, vmask)) {
            rep.is_constrained = true;
            break;
        }

    rep.is_homeomorphism = false;
    if (rep.is_model_function && sa.size() == sb.size()) {
        Mask seen = 0;
        for (auto x : f) seen |= Mask(1) << x;
        if (popcount(seen) == static_cast<int>(sa.size())) {
            PointMap inv = invert_partial(f, sa.full_mask(), sb.size());
            if (is_continuous_between(sb, sb.full_mask(), sa, sa.full_mask(), inv)) {
                bool inv71 = true, inv72 = true;
                for (Mask umask : a.objects())
                    if (!b.is_object(map_preimage(inv, sb.full_mask(), umask))) {
                        inv71 = false;
                        break;
                    }
                for (Mask vmask : b.objects()) {
                    Mask img = map_image(inv, vmask);
                    bool found = false;
                    for (Mask umask : a.objects())
                        if (subset(img, umask)) {
                            found = true;
                            break;
                        }
                    if (!found) {
                        inv72 = false;
                        break;
                    }
                }
                rep.is_homeomorphism = inv71 && inv72;
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// model space categories

int ModelSpaceCategory::object_index(const ModelSpace& m) const {
    for (std::size_t i = 0; i < objects.size(); ++i)
        if (objects[i] == m) return static_cast<int>(i);
    return -1;
}

bool ModelSpaceCategory::has_arrow(const ModelSpace& dom, const ModelSpace& cod, const PointMap& map,
                                   Mask dom_mask) const {
    int d = object_index(dom), c = object_index(cod);
    if (d < 0 || c < 0) return false;
    for (const CatArrow& a : arrows)
        if (a.dom == static_cast<std::size_t>(d) && a.cod == static_cast<std::size_t>(c) &&
            maps_equal_on(a.map, map, dom_mask))
            return true;
    return false;
}

bool is_full_subcategory(const ModelSpaceCategory& a, const ModelSpaceCategory& b) {
    for (const ModelSpace& o : a.objects)
        if (b.object_index(o) < 0) return false;
    // Hom sets must agree on shared object pairs.
    for (std::size_t i = 0; i < a.objects.size(); ++i)
        for (std::size_t j = 0; j < a.objects.size(); ++j) {
            int bi = b.object_index(a.objects[i]);
            int bj = b.object_index(a.objects[j]);
            std::size_t count_a = 0, count_b = 0;
            for (const auto& ar : a.arrows)
                if (ar.dom == i && ar.cod == j) {
                    ++count_a;
                    if (!b.has_arrow(a.objects[i], a.objects[j], ar.map, a.objects[i].space().full_mask()))
                        return false;
                }
            for (const auto& br : b.arrows)
                if (br.dom == static_cast<std::size_t>(bi) && br.cod == static_cast<std::size_t>(bj)) ++count_b;
            if (count_a != count_b) return false;
        }
    return true;
}

// ---------------------------------------------------------------------------
// (local) m-morphisms

MMorphismVerdict classify_m_morphism(const ModelSpace& a, const ModelSpace& b, const PointMap& f,
                                     MorphismMode mode, Strictness strictness, const AmbientCategories& ambient,
                                     std::optional<Mask> dom_open, std::optional<Mask> cod_open) {
    MMorphismVerdict out;
    const FinSpace& sa = a.space();
    const FinSpace& sb = b.space();
    Mask u1 = dom_open.value_or(sa.full_mask());
    Mask u2 = cod_open.value_or(sb.full_mask());
    if (!is_continuous_between(sa, u1, sb, u2, f))
        throw PreconditionError("classify_m_morphism: map is not continuous");

    bool with_cats = ambient.cat_a != nullptr || ambient.cat_b != nullptr;
    if (with_cats) {
        if (!ambient.cat_a || !ambient.cat_b)
            throw MalformedInput("classify_m_morphism: ambient mode needs both categories");
        if (strictness == Strictness::Strict)
            throw PreconditionError(
                "classify_m_morphism: strict variant is not defined for ambient categories");
        out.variant = mode == MorphismMode::Local ? "local-cats" : "global-cats";
        if (!is_full_subcategory(*ambient.cat_a, *ambient.cat_b)) {
            out.failure = "ambient: cat_a is not a full subcategory of cat_b";
            return out;
        }
    } else {
        out.variant = std::string(mode == MorphismMode::Local ? "local" : "global") +
                      (strictness == Strictness::Strict ? "-strict" : "");
        SubspaceVerdict sv = subspace_relation(a, b);
        bool need = strictness == Strictness::Strict ? sv.strict_mod : sv.mod;
        if (!need) {
            out.failure = strictness == Strictness::Strict ? "not a strict model subspace"
                                                           : "not a model subspace";
            return out;
        }
    }

    // Lifting from a's carrier indices to b's.
    PointMap incl(sa.size(), kNoPoint);
    for (std::size_t i = 0; i < sa.size(); ++i) {
        int j = sb.point_index(sa.point_name(i));
        if (j < 0) {
            if (!with_cats) throw InternalConsistencyError("classify_m_morphism: inclusion vanished");
            // ambient mode does not require carrier containment; identify only
            // when names match.
        }
        incl[i] = j < 0 ? kNoPoint : static_cast<std::uint8_t>(j);
    }
    auto lift = [&](Mask m) {
        Mask r = 0;
        for (std::size_t i = 0; i < sa.size(); ++i)
            if (test_bit(m, i)) r |= Mask(1) << incl[i];
        return r;
    };

    if (mode == MorphismMode::Global) {
        if (with_cats) {
            if (ambient.cat_b->has_arrow(a, b, f, u1)) {
                out.holds = true;
            } else {
                out.failure = "map is not an arrow of the ambient category";
            }
            return out;
        }
        // f as a morphism of b, labeled by the two carriers (which must be
        // model neighborhoods of b).
        Mask dom_in_b = lift(u1);
        if (!b.is_object(dom_in_b) || !b.is_object(u2)) {
            out.failure = "endpoints are not model neighborhoods of the target";
            return out;
        }
        PointMap lifted(sb.size(), kNoPoint);
        for (std::size_t i = 0; i < sa.size(); ++i)
            if (test_bit(u1, i)) lifted[incl[i]] = f[i];
        if (b.has_arrow(dom_in_b, u2, lifted)) {
            out.holds = true;
        } else {
            out.failure = "map is not an arrow of the target model space";
        }
        return out;
    }

    // Local mode: per-point witness search.
    out.holds = true;
    for (std::size_t p = 0; p < sa.size(); ++p) {
        if (!test_bit(u1, p)) continue;
        std::uint8_t q = f[p];
        bool found = false;
        for (Mask uu : a.objects()) {
            if (!test_bit(uu, p) || !subset(uu, u1)) continue;
            Mask uu_in_b = with_cats ? uu : lift(uu);
            for (Mask vv : b.objects()) {
                if (!test_bit(vv, q) || !subset(vv, u2)) continue;
                if ((map_image(f, uu) & ~vv) != 0) continue;
                if (with_cats) {
                    ModelSpace md = relative(a, uu);
                    ModelSpace mc = relative(b, vv);
                    // re-express the restriction over the relative carriers
                    PointMap rel_map(md.space().size(), kNoPoint);
                    bool ok = true;
                    for (std::size_t i = 0; i < sa.size() && ok; ++i)
                        if (test_bit(uu, i)) {
                            int di = md.space().point_index(sa.point_name(i));
                            int ci = mc.space().point_index(sb.point_name(f[i]));
                            if (di < 0 || ci < 0)
                                ok = false;
                            else
                                rel_map[di] = static_cast<std::uint8_t>(ci);
                        }
                    if (ok && ambient.cat_b->has_arrow(md, mc, rel_map, md.space().full_mask())) {
                        out.witnesses.push_back({p, uu, vv});
                        found = true;
                    }
                } else {
                    PointMap lifted(sb.size(), kNoPoint);
                    for (std::size_t i = 0; i < sa.size(); ++i)
                        if (test_bit(uu, i)) lifted[incl[i]] = f[i];
                    if (b.has_arrow(uu_in_b, vv, lifted)) {
                        out.witnesses.push_back({p, uu, vv});
                        found = true;
                    }
                }
                if (found) break;
            }
            if (found) break;
        }
        if (!found) {
            out.holds = false;
            out.failure = "no admissible neighborhood pair at point " + sa.point_name(p);
            out.witnesses.clear();
            return out;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// m-paracompactness

ParacompactnessReport m_paracompactness_report(const ModelSpace& m, const Budget& budget) {
    ParacompactnessReport rep;
    const FinSpace& s = m.space();

    // Topology generated by the objects: all unions of subfamilies.
    std::set<Mask> gen;
    gen.insert(0);
    {
        const auto& objs = m.objects();
        if (objs.size() > 22) throw BudgetExceeded("m_paracompactness: too many objects");
        Mask limit = objs.empty() ? 0 : ((Mask(1) << objs.size()) - 1);
        for (Mask sub = 0;; ++sub) {
            Mask u = 0;
            for (std::size_t k = 0; k < objs.size(); ++k)
                if (test_bit(sub, k)) u |= objs[k];
            gen.insert(u);
            if (sub == limit) break;
        }
    }
    std::vector<std::string> names = s.points();
    rep.model_topology = FinSpace(names, std::vector<Mask>(gen.begin(), gen.end()));
    const FinSpace& mt = rep.model_topology;

    // Regularity (points versus closed sets) in the model topology.
    rep.regular = true;
    for (std::size_t p = 0; p < mt.size() && rep.regular; ++p) {
        for (Mask u : mt.opens()) {
            Mask closed = mt.full_mask() & ~u;
            if (test_bit(closed, p)) continue;
            if (closed == 0) continue;
            bool separated = false;
            for (Mask a : mt.opens()) {
                if (!test_bit(a, p)) continue;
                for (Mask b : mt.opens()) {
                    if (!subset(closed, b)) continue;
                    if ((a & b) == 0) {
                        separated = true;
                        break;
                    }
                }
                if (separated) break;
            }
            if (!separated) {
                rep.regular = false;
                break;
            }
        }
    }

    // Every cover by model neighborhoods has a locally finite refinement by
    // model neighborhoods. On a finite space the cover itself is one; the
    // check still walks every cover and verifies local finiteness literally.
    rep.refinement_ok = true;
    {
        const auto& objs = m.objects();
        if (objs.size() > 20) throw BudgetExceeded("m_paracompactness: cover enumeration too large");
        Mask limit = objs.empty() ? 0 : ((Mask(1) << objs.size()) - 1);
        std::size_t seen = 0;
        for (Mask sub = 0;; ++sub) {
            if (++seen > budget.max_cover_families)
                throw BudgetExceeded("m_paracompactness: cover enumeration budget");
            Mask u = 0;
            std::vector<Mask> fam;
            for (std::size_t k = 0; k < objs.size(); ++k)
                if (test_bit(sub, k)) {
                    u |= objs[k];
                    fam.push_back(objs[k]);
                }
            if (u == s.full_mask()) {
                // Refinement candidate: the family itself. Locally finite:
                // every point has a neighborhood meeting finitely many
                // members; witnessed by counting the members at each point.
                for (std::size_t p = 0; p < s.size(); ++p) {
                    std::size_t touching = 0;
                    for (Mask f : fam)
                        if ((f & mt.minimal_open(p)) != 0) ++touching;
                    if (touching > fam.size()) {
                        rep.refinement_ok = false;
                        break;
                    }
                }
                if (!rep.refinement_ok) break;
            }
            if (sub == limit) break;
        }
    }

    rep.m_paracompact = rep.regular && rep.refinement_ok;
    return rep;
}

bool is_fine_grained(const ModelSpace& m) {
    for (Mask o : m.objects())
        for (Mask w : m.space().opens())
            if (subset(w, o) && !m.is_object(w)) return false;
    return true;
}

}  // namespace af
