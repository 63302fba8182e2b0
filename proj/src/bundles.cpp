#include "atlasforge/bundles.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <tuple>
#include <set>

#include "atlasforge/parallel.hpp"

namespace af {

int FiniteGroup::element_index(const std::string& name) const {
    for (std::size_t i = 0; i < elements.size(); ++i)
        if (elements[i] == name) return static_cast<int>(i);
    return -1;
}

void check_group_axioms(const FiniteGroup& g) {
    std::size_t n = g.size();
    if (n == 0) throw MalformedInput("group: empty");
    if (g.table.size() != n || g.inverses.size() != n) throw MalformedInput("group: tables have wrong shape");
    for (auto& row : g.table) {
        if (row.size() != n) throw MalformedInput("group: tables have wrong shape");
        for (auto v : row)
            if (v >= n) throw MalformedInput("group: table value out of range");
    }
    for (std::size_t a = 0; a < n; ++a) {
        if (g.mul(0, a) != a || g.mul(a, 0) != a) throw MalformedInput("group: element 0 is not an identity");
        if (g.mul(a, g.inverses[a]) != 0 || g.mul(g.inverses[a], a) != 0)
            throw MalformedInput("group: inverse table is wrong");
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c)))
                    throw MalformedInput("group: multiplication is not associative");
}

void check_group_action(const GroupAction& a) {
    check_group_axioms(a.group);
    std::size_t ny = a.fiber.size(), ng = a.group.size();
    if (a.act.size() != ny) throw MalformedInput("action: table has wrong shape");
    for (auto& row : a.act) {
        if (row.size() != ng) throw MalformedInput("action: table has wrong shape");
        for (auto v : row)
            if (v >= ny) throw MalformedInput("action: value outside the fiber");
    }
    for (std::size_t y = 0; y < ny; ++y) {
        if (a.star(y, 0) != y) throw MalformedInput("action: identity does not act trivially");
        for (std::size_t g = 0; g < ng; ++g)
            for (std::size_t h = 0; h < ng; ++h)
                if (a.star(a.star(y, g), h) != a.star(y, a.group.mul(g, h)))
                    throw MalformedInput("action: not a right action");
    }
    for (std::size_t g = 0; g < ng; ++g) {
        PointMap m(ny);
        for (std::size_t y = 0; y < ny; ++y) m[y] = a.star(y, g);
        CMap f{a.fiber, a.fiber, m};
        if (!is_homeomorphism(f)) throw MalformedInput("action: group element is not a homeomorphism");
        if (g != 0) {
            bool moves = false;
            for (std::size_t y = 0; y < ny; ++y)
                if (a.star(y, g) != y) moves = true;
            if (!moves) throw MalformedInput("action: not effective");
        }
    }
}

std::uint8_t Protobundle::pair_index(std::uint8_t x, std::uint8_t y) const {
    std::string name = "(" + base.point_name(x) + "," + fiber.point_name(y) + ")";
    int i = product.point_index(name);
    if (i < 0) throw InternalConsistencyError("protobundle: missing product point");
    return static_cast<std::uint8_t>(i);
}

std::uint8_t Protobundle::pair_base(std::uint8_t p) const {
    const std::string& name = product.point_name(p);
    auto comma = name.rfind(',');
    return static_cast<std::uint8_t>(base.point_index(name.substr(1, comma - 1)));
}

std::uint8_t Protobundle::pair_fiber(std::uint8_t p) const {
    const std::string& name = product.point_name(p);
    auto comma = name.rfind(',');
    return static_cast<std::uint8_t>(fiber.point_index(name.substr(comma + 1, name.size() - comma - 2)));
}

Protobundle make_protobundle(FinSpace total, FinSpace base, FinSpace fiber, PointMap proj, GroupAction action) {
    Protobundle b;
    b.total = std::move(total);
    b.base = std::move(base);
    b.fiber = std::move(fiber);
    b.proj = std::move(proj);
    b.action = std::move(action);
    check_group_action(b.action);
    if (b.action.fiber != b.fiber) throw MalformedInput("protobundle: action fiber differs from the fiber");
    CMap p{b.total, b.base, b.proj};
    validate_cmap(p);
    if (!is_continuous(p)) throw MalformedInput("protobundle: projection is not continuous");
    Mask hit = 0;
    for (auto v : b.proj) hit |= Mask(1) << v;
    if (hit != b.base.full_mask()) throw MalformedInput("protobundle: projection is not surjective");
    b.product = product(b.base, b.fiber);
    return b;
}

// ---------------------------------------------------------------------------
// trivial G-rho model spaces

namespace {

// Locally constant maps from the subspace V of the base into the group.
std::vector<std::vector<std::uint8_t>> locally_constant_maps(const FinSpace& base, Mask v,
                                                             const FiniteGroup& g) {
    std::vector<Mask> comps = connected_components(subspace(base, v));
    // translate component masks back into base masks
    std::vector<std::size_t> pts;
    for (std::size_t i = 0; i < base.size(); ++i)
        if (test_bit(v, i)) pts.push_back(i);
    std::vector<std::vector<std::uint8_t>> out;
    std::vector<std::uint8_t> assign(comps.size(), 0);
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == comps.size()) {
            std::vector<std::uint8_t> m(base.size(), kNoPoint);
            for (std::size_t ci = 0; ci < comps.size(); ++ci)
                for (std::size_t j = 0; j < pts.size(); ++j)
                    if (test_bit(comps[ci], j)) m[pts[j]] = assign[ci];
            out.push_back(std::move(m));
            return;
        }
        for (std::uint8_t e = 0; e < g.size(); ++e) {
            assign[k] = e;
            rec(k + 1);
        }
    };
    if (!pts.empty()) rec(0);
    return out;
}

}  // namespace

ModelSpace trivial_grho_space(const FinSpace& base, const FinSpace& fiber, const GroupAction& action) {
    check_group_action(action);
    FinSpace prod = product(base, fiber);
    Protobundle scratch;  // only for pair indexing
    scratch.base = base;
    scratch.fiber = fiber;
    scratch.product = prod;

    auto v_times_y = [&](Mask v) {
        Mask m = 0;
        for (std::size_t x = 0; x < base.size(); ++x)
            if (test_bit(v, x))
                for (std::size_t y = 0; y < fiber.size(); ++y) m |= Mask(1) << scratch.pair_index(x, y);
        return m;
    };

    std::vector<Mask> objects;
    std::vector<Mask> base_opens;
    objects.push_back(0);  // the degenerate neighborhood
    base_opens.push_back(0);
    for (Mask v : base.opens())
        if (v != 0) {
            objects.push_back(v_times_y(v));
            base_opens.push_back(v);
        }

    std::vector<Arrow> arrows;
    for (std::size_t di = 0; di < objects.size(); ++di)
        for (std::size_t ci = 0; ci < objects.size(); ++ci) {
            Mask vd = base_opens[di], vc = base_opens[ci];
            if (!subset(vd, vc)) continue;
            if (vd == 0) {
                arrows.push_back(Arrow{0, objects[ci], PointMap(prod.size(), kNoPoint)});
                continue;
            }
            for (const auto& g : locally_constant_maps(base, vd, action.group)) {
                Arrow a;
                a.dom = objects[di];
                a.cod = objects[ci];
                a.map = PointMap(prod.size(), kNoPoint);
                for (std::size_t x = 0; x < base.size(); ++x)
                    if (test_bit(vd, x))
                        for (std::size_t y = 0; y < fiber.size(); ++y)
                            a.map[scratch.pair_index(static_cast<std::uint8_t>(x),
                                                     static_cast<std::uint8_t>(y))] =
                                scratch.pair_index(static_cast<std::uint8_t>(x),
                                                   action.star(static_cast<std::uint8_t>(y), g[x]));
                arrows.push_back(std::move(a));
            }
        }
    return ModelSpace(prod, objects, arrows);
}

GrhoMorphismReport grho_morphism_report(const GrhoSpec& src, const GrhoSpec& dst, const PointMap& f_c) {
    GrhoMorphismReport rep;
    ModelSpace m1 = trivial_grho_space(src.base, src.fiber, src.action);
    ModelSpace m2 = trivial_grho_space(dst.base, dst.fiber, dst.action);
    ModelFunctionReport mf = model_function_report(m1, m2, f_c);
    if (!mf.is_model_function)
        throw PreconditionError("grho_morphism_report: not a model function between the trivial G-rho spaces");

    Protobundle s1, s2;
    s1.base = src.base;
    s1.fiber = src.fiber;
    s1.product = product(src.base, src.fiber);
    s2.base = dst.base;
    s2.fiber = dst.fiber;
    s2.product = product(dst.base, dst.fiber);

    // Eq 22.3, solved pointwise for each group element; effectiveness makes
    // the solution unique on the touched fibers. A candidate must work for
    // every (x, y) simultaneously.
    std::size_t ng1 = src.action.group.size();
    std::size_t ng2 = dst.action.group.size();
    rep.f_g.assign(ng1, 0);
    for (std::size_t g = 0; g < ng1; ++g) {
        bool any = false;
        for (std::uint8_t h = 0; h < ng2; ++h) {
            bool ok = true;
            for (std::size_t p = 0; p < s1.product.size() && ok; ++p) {
                std::uint8_t x = s1.pair_base(static_cast<std::uint8_t>(p));
                std::uint8_t y = s1.pair_fiber(static_cast<std::uint8_t>(p));
                std::uint8_t lhs = f_c[s1.pair_index(x, src.action.star(y, static_cast<std::uint8_t>(g)))];
                std::uint8_t rhs_p = f_c[p];
                std::uint8_t rhs = s2.pair_index(s2.pair_base(rhs_p), dst.action.star(s2.pair_fiber(rhs_p), h));
                if (lhs != rhs) ok = false;
            }
            if (ok) {
                rep.f_g[g] = h;
                any = true;
                break;  // smallest consistent image, deterministic
            }
        }
        if (!any) {
            rep.is_grho_morphism = false;
            rep.witness = "no group image for element " + src.action.group.elements[g];
            return rep;
        }
    }
    // homomorphism check for the chosen assignment
    for (std::size_t g = 0; g < ng1; ++g)
        for (std::size_t h = 0; h < ng1; ++h)
            if (rep.f_g[src.action.group.mul(static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(h))] !=
                dst.action.group.mul(rep.f_g[g], rep.f_g[h])) {
                rep.is_grho_morphism = false;
                rep.witness = "group map is not a homomorphism";
                return rep;
            }

    // fiber preservation and the derived base map
    rep.f_x.assign(src.base.size(), kNoPoint);
    for (std::size_t x = 0; x < src.base.size(); ++x) {
        std::uint8_t common = kNoPoint;
        for (std::size_t y = 0; y < src.fiber.size(); ++y) {
            std::uint8_t img = f_c[s1.pair_index(static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y))];
            std::uint8_t bx = s2.pair_base(img);
            if (common == kNoPoint)
                common = bx;
            else if (common != bx) {
                rep.is_grho_morphism = false;
                rep.witness = "fibers are not preserved over " + src.base.point_name(x);
                return rep;
            }
        }
        rep.f_x[x] = common;
    }
    rep.is_grho_morphism = true;
    return rep;
}

// ---------------------------------------------------------------------------
// bundle charts

bool operator<(const BundleChart& a, const BundleChart& b) {
    if (a.patch != b.patch) return a.patch < b.patch;
    if (a.base_open != b.base_open) return a.base_open < b.base_open;
    for (std::size_t i = 0; i < 64; ++i)
        if (test_bit(a.patch, i)) {
            if (a.coord[i] != b.coord[i]) return a.coord[i] < b.coord[i];
        }
    return false;
}

void BundleAtlas::canonicalize() {
    for (BundleChart& c : charts) {
        PointMap clean(bundle.total.size(), kNoPoint);
        for (std::size_t i = 0; i < bundle.total.size(); ++i)
            if (test_bit(c.patch, i)) clean[i] = c.coord[i];
        c.coord = std::move(clean);
    }
    std::sort(charts.begin(), charts.end());
    charts.erase(std::unique(charts.begin(), charts.end()), charts.end());
}

namespace {

Mask product_mask(const Protobundle& b, Mask base_open) {
    Mask m = 0;
    for (std::size_t x = 0; x < b.base.size(); ++x)
        if (test_bit(base_open, x))
            for (std::size_t y = 0; y < b.fiber.size(); ++y)
                m |= Mask(1) << b.pair_index(static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y));
    return m;
}

}  // namespace

BundleChartCheck bundle_chart_check(const BundleChart& c, const Protobundle& b) {
    BundleChartCheck r;
    if (c.patch == 0) {
        r.failures.push_back("patch is void");
        return r;
    }
    if (!b.total.is_open(c.patch)) r.failures.push_back("patch is not open in the total space");
    if (c.base_open == 0 || !b.base.is_open(c.base_open))
        r.failures.push_back("base image is not a nonvoid open of the base");
    if (!r.failures.empty()) return r;
    Mask cod = product_mask(b, c.base_open);
    for (std::size_t i = 0; i < b.total.size(); ++i)
        if (test_bit(c.patch, i)) {
            if (i >= c.coord.size() || c.coord[i] == kNoPoint || c.coord[i] >= b.product.size() ||
                !test_bit(cod, c.coord[i])) {
                r.failures.push_back("coordinate function is not a total map into V x Y");
                return r;
            }
        }
    if (!is_homeomorphism_between(b.total, c.patch, b.product, cod, c.coord)) {
        r.failures.push_back("coordinate function is not a homeomorphism onto V x Y");
        return r;
    }
    for (std::size_t i = 0; i < b.total.size(); ++i)
        if (test_bit(c.patch, i) && b.pair_base(c.coord[i]) != b.proj[i]) {
            r.failures.push_back("fiber preservation fails at " + b.total.point_name(i));
            return r;
        }
    // Lemma 24.2, re-verified: the projection restricted to the patch covers V
    // and each fiber over V is homeomorphic to Y.
    Mask hit = 0;
    for (std::size_t i = 0; i < b.total.size(); ++i)
        if (test_bit(c.patch, i)) hit |= Mask(1) << b.proj[i];
    if (hit != c.base_open) {
        r.failures.push_back("projection does not cover the base open");
        return r;
    }
    for (std::size_t x = 0; x < b.base.size(); ++x) {
        if (!test_bit(c.base_open, x)) continue;
        Mask fiber_part = 0;
        for (std::size_t i = 0; i < b.total.size(); ++i)
            if (test_bit(c.patch, i) && b.proj[i] == x) fiber_part |= Mask(1) << i;
        // the chart restricted to the fiber, read through the product's Y part
        PointMap to_y(b.total.size(), kNoPoint);
        Mask yfull = b.fiber.full_mask();
        for (std::size_t i = 0; i < b.total.size(); ++i)
            if (test_bit(fiber_part, i)) to_y[i] = b.pair_fiber(c.coord[i]);
        if (!is_homeomorphism_between(b.total, fiber_part, b.fiber, yfull, to_y)) {
            r.failures.push_back("fiber over " + b.base.point_name(x) + " is not homeomorphic to the fiber");
            return r;
        }
    }
    r.valid = true;
    return r;
}

GrhoCompatibility grho_compatible(const BundleChart& c1, const BundleChart& c2, const Protobundle& b) {
    GrhoCompatibility out;
    Mask overlap = c1.patch & c2.patch;
    if (overlap == 0) {
        out.compatible = true;
        return out;
    }
    // transition t = phi2 o phi1^{-1} on phi1[overlap]
    PointMap inv1 = invert_partial(c1.coord, c1.patch, b.product.size());
    Mask tdom = map_image(c1.coord, overlap);
    Mask base_hit = 0;
    for (std::size_t p = 0; p < b.product.size(); ++p)
        if (test_bit(tdom, p)) base_hit |= Mask(1) << b.pair_base(static_cast<std::uint8_t>(p));

    // solve t(x, y) = (x, y * g(x)) pointwise; the action is effective, so g(x)
    // is unique when it exists
    std::vector<std::pair<std::uint8_t, std::uint8_t>> g;
    for (std::size_t x = 0; x < b.base.size(); ++x) {
        if (!test_bit(base_hit, x)) continue;
        int chosen = -1;
        for (std::uint8_t cand = 0; cand < b.action.group.size(); ++cand) {
            bool ok = true;
            for (std::size_t y = 0; y < b.fiber.size() && ok; ++y) {
                std::uint8_t p = b.pair_index(static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y));
                if (!test_bit(tdom, p)) continue;
                std::uint8_t img = c2.coord[inv1[p]];
                if (b.pair_base(img) != x) {
                    out.witness = "transition is not fiber preserving over " + b.base.point_name(x);
                    return out;
                }
                if (b.pair_fiber(img) != b.action.star(static_cast<std::uint8_t>(y), cand)) ok = false;
            }
            if (ok) {
                chosen = cand;
                break;
            }
        }
        if (chosen < 0) {
            out.witness = "transition over " + b.base.point_name(x) + " is not generated by the action";
            return out;
        }
        g.push_back({static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(chosen)});
    }
    // continuity into the discrete group: constant on the components of the
    // base image
    FinSpace sub = subspace(b.base, base_hit);
    std::vector<std::size_t> pts;
    for (std::size_t i = 0; i < b.base.size(); ++i)
        if (test_bit(base_hit, i)) pts.push_back(i);
    for (Mask comp : connected_components(sub)) {
        int val = -1;
        for (std::size_t j = 0; j < pts.size(); ++j)
            if (test_bit(comp, j)) {
                for (auto& [x, e] : g)
                    if (x == pts[j]) {
                        if (val < 0) val = e;
                        if (val != e) {
                            out.witness = "transition group map is not locally constant";
                            return out;
                        }
                    }
            }
    }
    out.compatible = true;
    out.g_function = std::move(g);
    return out;
}

// ---------------------------------------------------------------------------
// bundle atlases

namespace {

bool bundle_is_atlas_core(const BundleAtlas& a, std::vector<std::string>* failures) {
    bool ok = true;
    for (const BundleChart& c : a.charts) {
        BundleChartCheck cc = bundle_chart_check(c, a.bundle);
        if (!cc.valid) {
            ok = false;
            if (failures)
                for (auto& f : cc.failures) failures->push_back("chart: " + f);
            break;
        }
    }
    for (std::size_t i = 0; i < a.charts.size() && ok; ++i)
        for (std::size_t j = i; j < a.charts.size(); ++j)
            if (!grho_compatible(a.charts[i], a.charts[j], a.bundle).compatible) {
                ok = false;
                if (failures)
                    failures->push_back("charts " + std::to_string(i) + " and " + std::to_string(j) +
                                        " are not G-rho compatible");
                break;
            }
    Mask covered = 0;
    for (const BundleChart& c : a.charts) covered |= c.patch;
    if (covered != a.bundle.total.full_mask()) {
        ok = false;
        if (failures) failures->push_back("patches do not cover the total space");
    }
    return ok;
}

}  // namespace

std::vector<BundleChart> enumerate_bundle_charts(const Protobundle& b, const Budget& budget, ExecMode mode) {
    // Fibered structure prunes the search: a candidate patch must be a union
    // of |Y|-point fibers over an open V, and the coordinate map splits into
    // per-fiber bijections onto {x} x Y.
    struct Job {
        Mask v;
        Mask patch;
    };
    std::vector<Job> jobs;
    for (Mask v : b.base.opens()) {
        if (v == 0) continue;
        Mask patch = 0;
        bool sizes_ok = true;
        for (std::size_t x = 0; x < b.base.size() && sizes_ok; ++x) {
            if (!test_bit(v, x)) continue;
            Mask fiber_part = 0;
            for (std::size_t i = 0; i < b.total.size(); ++i)
                if (b.proj[i] == x) fiber_part |= Mask(1) << i;
            if (popcount(fiber_part) != static_cast<int>(b.fiber.size())) sizes_ok = false;
            patch |= fiber_part;
        }
        if (!sizes_ok || !b.total.is_open(patch)) continue;
        jobs.push_back({v, patch});
    }
    auto per_job = [&](std::size_t idx) -> std::optional<std::vector<BundleChart>> {
        const Job& j = jobs[idx];
        std::vector<BundleChart> found;
        // enumerate per-fiber bijections onto {x} x Y
        std::vector<std::size_t> xs;
        for (std::size_t x = 0; x < b.base.size(); ++x)
            if (test_bit(j.v, x)) xs.push_back(x);
        std::vector<std::vector<std::size_t>> fibers(xs.size());
        for (std::size_t k = 0; k < xs.size(); ++k)
            for (std::size_t i = 0; i < b.total.size(); ++i)
                if (b.proj[i] == xs[k] && test_bit(j.patch, i)) fibers[k].push_back(i);
        std::vector<std::uint8_t> perm(b.fiber.size());
        std::vector<std::vector<std::uint8_t>> choice(xs.size());
        std::function<void(std::size_t, PointMap&)> rec = [&](std::size_t k, PointMap& cur) {
            if (k == xs.size()) {
                BundleChart c;
                c.patch = j.patch;
                c.base_open = j.v;
                c.coord = cur;
                if (bundle_chart_check(c, b).valid) found.push_back(c);
                return;
            }
            std::vector<std::uint8_t> ys(b.fiber.size());
            for (std::size_t t = 0; t < ys.size(); ++t) ys[t] = static_cast<std::uint8_t>(t);
            std::sort(ys.begin(), ys.end());
            do {
                for (std::size_t t = 0; t < fibers[k].size(); ++t)
                    cur[fibers[k][t]] = b.pair_index(static_cast<std::uint8_t>(xs[k]), ys[t]);
                rec(k + 1, cur);
            } while (std::next_permutation(ys.begin(), ys.end()));
        };
        PointMap cur(b.total.size(), kNoPoint);
        rec(0, cur);
        if (found.empty()) return std::nullopt;
        return found;
    };
    auto batches = filter_map_indexed<std::vector<BundleChart>>(jobs.size(), mode, per_job);
    std::vector<BundleChart> out;
    for (auto& batch : batches) {
        out.insert(out.end(), batch.begin(), batch.end());
        if (out.size() > budget.max_candidates)
            throw BudgetExceeded("enumerate_bundle_charts: candidate budget exceeded");
    }
    std::sort(out.begin(), out.end());
    return out;
}

BundleAtlasReport bundle_atlas_report(const BundleAtlas& a, const Budget& budget, ExecMode mode) {
    BundleAtlasReport rep;
    rep.is_atlas = bundle_is_atlas_core(a, &rep.failures);
    // every bundle atlas is full over its covered base; checked, not assumed
    Mask base_cover = 0;
    for (const BundleChart& c : a.charts) base_cover |= c.base_open;
    rep.is_full = rep.is_atlas && base_cover == a.bundle.base.full_mask();
    if (!rep.is_atlas) return rep;

    // cross-check (Lemma 25.3): the chart set is an m-atlas of the trivial
    // total model space in the trivial G-rho coordinate space, with
    // fiber-preserving coordinates. The two routes must agree.
    {
        AtlasTriple m = bundle_to_matlas(a);
        bool matlas_ok = is_m_atlas(m);
        bool fiber_preserving = true;
        for (const BundleChart& c : a.charts)
            for (std::size_t i = 0; i < a.bundle.total.size(); ++i)
                if (test_bit(c.patch, i) && a.bundle.pair_base(c.coord[i]) != a.bundle.proj[i])
                    fiber_preserving = false;
        if ((matlas_ok && fiber_preserving) != rep.is_atlas)
            throw InternalConsistencyError("bundle_atlas_report: m-atlas cross-check disagrees");
    }

    // semi-maximal (Def 25.7): subcharts post-composed with generated
    // fiber-preserving homeomorphisms stay inside
    rep.is_semi_maximal = true;
    ModelSpace grho = trivial_grho_space(a.bundle.base, a.bundle.fiber, a.bundle.action);
    for (const BundleChart& c : a.charts) {
        for (Mask u2 : a.bundle.total.opens()) {
            if (u2 == 0 || !subset(u2, c.patch)) continue;
            Mask img = map_image(c.coord, u2);
            // the image must itself be a product V' x Y
            Mask vprime = 0;
            for (std::size_t p = 0; p < a.bundle.product.size(); ++p)
                if (test_bit(img, p)) vprime |= Mask(1) << a.bundle.pair_base(static_cast<std::uint8_t>(p));
            if (img != product_mask(a.bundle, vprime)) continue;
            Mask vy = img;
            for (Mask wy : grho.objects()) {
                if (wy == 0 || popcount(wy) != popcount(vy)) continue;
                for (const Arrow& iso : grho.isomorphisms_between(vy, wy)) {
                    BundleChart post;
                    post.patch = u2;
                    post.coord = compose_partial(iso.map, c.coord, u2);
                    Mask w = 0;
                    for (std::size_t p = 0; p < a.bundle.product.size(); ++p)
                        if (test_bit(wy, p)) w |= Mask(1) << a.bundle.pair_base(static_cast<std::uint8_t>(p));
                    post.base_open = w;
                    if (!std::binary_search(a.charts.begin(), a.charts.end(), post)) {
                        rep.is_semi_maximal = false;
                        rep.failures.push_back("semi-maximal: missing variant at " +
                                               mask_to_string(a.bundle.total, u2));
                        goto semi_done;
                    }
                }
            }
        }
    }
semi_done:;

    rep.is_maximal = true;
    for (const BundleChart& cand : enumerate_bundle_charts(a.bundle, budget, mode)) {
        if (std::binary_search(a.charts.begin(), a.charts.end(), cand)) continue;
        bool compat = true;
        for (const BundleChart& c : a.charts)
            if (!grho_compatible(cand, c, a.bundle).compatible) {
                compat = false;
                break;
            }
        if (compat) {
            rep.is_maximal = false;
            rep.failures.push_back("maximal: extendable at " + mask_to_string(a.bundle.total, cand.patch));
            break;
        }
    }
    return rep;
}

BundleAtlas bundle_maximal_closure(const BundleAtlas& a, const Budget& budget, ExecMode mode) {
    if (!bundle_is_atlas_core(a, nullptr))
        throw PreconditionError("bundle_maximal_closure: input is not a bundle atlas");
    BundleAtlas out = a;
    out.canonicalize();
    std::vector<BundleChart> kept;
    for (const BundleChart& cand : enumerate_bundle_charts(a.bundle, budget, mode)) {
        bool compat = true;
        for (const BundleChart& c : a.charts)
            if (!grho_compatible(cand, c, a.bundle).compatible) {
                compat = false;
                break;
            }
        if (compat) kept.push_back(cand);
    }
    for (std::size_t i = 0; i < kept.size(); ++i)
        for (std::size_t j = i + 1; j < kept.size(); ++j)
            if (!grho_compatible(kept[i], kept[j], a.bundle).compatible)
                throw InternalConsistencyError("bundle_maximal_closure: extension set is not mutually compatible");
    out.charts = std::move(kept);
    out.canonicalize();
    return out;
}

PointMap derive_projection(const std::vector<BundleChart>& charts, const FinSpace& total, const FinSpace& base,
                           const FinSpace& prod) {
    PointMap pi(total.size(), kNoPoint);
    for (const BundleChart& c : charts)
        for (std::size_t i = 0; i < total.size(); ++i)
            if (test_bit(c.patch, i)) {
                const std::string& name = prod.point_name(c.coord[i]);
                auto comma = name.rfind(',');
                int x = base.point_index(name.substr(1, comma - 1));
                if (x < 0) throw InternalConsistencyError("derive_projection: product point outside the base");
                if (pi[i] != kNoPoint && pi[i] != x)
                    throw InternalConsistencyError("derive_projection: charts disagree at " +
                                                   total.point_name(i));
                pi[i] = static_cast<std::uint8_t>(x);
            }
    for (auto v : pi)
        if (v == kNoPoint) throw PreconditionError("derive_projection: charts do not cover the total space");
    if (!is_continuous(total, base, pi))
        throw InternalConsistencyError("derive_projection: assembled projection is not continuous");
    return pi;
}

// ---------------------------------------------------------------------------
// bundle-atlas morphisms

AtlasTriple bundle_to_matlas(const BundleAtlas& a) {
    AtlasTriple t;
    t.flavor = ChartFlavor::PlainHomeo;
    t.total = trivial(a.bundle.total);
    t.coord = trivial_grho_space(a.bundle.base, a.bundle.fiber, a.bundle.action);
    for (const BundleChart& c : a.charts) {
        Chart mc;
        mc.patch = c.patch;
        mc.codomain = product_mask(a.bundle, c.base_open);
        mc.coord = c.coord;
        t.charts.push_back(mc);
    }
    t.canonicalize();
    return t;
}

namespace {

PointMap product_map(const Protobundle& src, const Protobundle& dst, const PointMap& f_x, const PointMap& f_y) {
    PointMap m(src.product.size(), kNoPoint);
    for (std::size_t p = 0; p < src.product.size(); ++p)
        m[p] = dst.pair_index(f_x[src.pair_base(static_cast<std::uint8_t>(p))],
                              f_y[src.pair_fiber(static_cast<std::uint8_t>(p))]);
    return m;
}

}  // namespace

namespace {

BundleMorphismVerdict classify_bundle_morphism_cached(const BundleMorphism& f, const BundleAtlas& src,
                                                      const BundleAtlas& dst, BundleMorphismKind kind,
                                                      const AtlasTriple& src_triple,
                                                      const AtlasTriple& dst_triple) {
    BundleMorphismVerdict v;
    const Protobundle& b1 = src.bundle;
    const Protobundle& b2 = dst.bundle;

    // item 2: group homomorphism is a precondition
    if (f.f_g.size() != b1.action.group.size())
        throw PreconditionError("bundle morphism: group map has the wrong shape");
    for (std::size_t g = 0; g < f.f_g.size(); ++g)
        for (std::size_t h = 0; h < f.f_g.size(); ++h)
            if (f.f_g[b1.action.group.mul(static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(h))] !=
                b2.action.group.mul(f.f_g[g], f.f_g[h]))
                throw PreconditionError("bundle morphism: group map is not a homomorphism");

    // item 1: continuity of the components
    if (!is_continuous(b1.total, b2.total, f.f_e) || !is_continuous(b1.base, b2.base, f.f_x) ||
        !is_continuous(b1.fiber, b2.fiber, f.f_y)) {
        v.failure = "a component map is not continuous";
        return v;
    }
    // item 3a: projections commute
    for (std::size_t e = 0; e < b1.total.size(); ++e)
        if (b2.proj[f.f_e[e]] != f.f_x[b1.proj[e]]) {
            v.failure = "projection does not commute at " + b1.total.point_name(e);
            return v;
        }
    // item 3b: fiber map is equivariant
    for (std::size_t y = 0; y < b1.fiber.size(); ++y)
        for (std::size_t g = 0; g < b1.action.group.size(); ++g)
            if (b2.action.star(f.f_y[y], f.f_g[g]) !=
                f.f_y[b1.action.star(static_cast<std::uint8_t>(y), static_cast<std::uint8_t>(g))]) {
                v.failure = "fiber map is not equivariant";
                return v;
            }
    v.items123 = true;

    // item 4 via the Lemma 26.5 reduction: (f_E, f_X x f_Y) between the
    // m-atlases over the trivial G-rho coordinate spaces.
    AtlasMorphism m;
    m.source = src_triple;
    m.target = dst_triple;
    m.f0 = f.f_e;
    m.f1 = product_map(b1, b2, f.f_x, f.f_y);
    ClassifyOptions opts;
    opts.want_strictness = false;
    opts.want_near = kind == BundleMorphismKind::Near;
    opts.want_morphism = kind == BundleMorphismKind::Morphism;
    MorphismClassification cls = classify(m, {}, opts);
    v.item4 = cls.model_functions && (kind == BundleMorphismKind::Near ? cls.near : cls.morphism);

    // and directly from diagram (26.1)/(26.9), re-verifying the reduction
    v.item4_direct = true;
    if (cls.model_functions) {
        const ModelSpace& grho2 = m.target.coord;
        for (std::size_t i = 0; i < m.source.charts.size() && v.item4_direct; ++i) {
            const Chart& c1 = m.source.charts[i];
            for (std::size_t j = 0; j < m.target.charts.size() && v.item4_direct; ++j) {
                const Chart& c2 = m.target.charts[j];
                Mask overlap = c1.patch & map_preimage(m.f0, b1.total.full_mask(), c2.patch);
                if (overlap == 0) continue;
                for (std::size_t p = 0; p < b1.total.size(); ++p) {
                    if (!test_bit(overlap, p)) continue;
                    bool found = false;
                    if (kind == BundleMorphismKind::Near) {
                        // open sets U'1, U'2 and a generated iso bridge
                        for (Mask u1p : m.source.total.objects()) {
                            if (!test_bit(u1p, p) || !subset(u1p, overlap)) continue;
                            Mask f0img = map_image(m.f0, u1p);
                            Mask v1p = map_image(c1.coord, u1p);
                            Mask f1img = map_image(m.f1, v1p);
                            for (Mask u2p : m.target.total.objects()) {
                                if (!subset(f0img, u2p) || !subset(u2p, c2.patch)) continue;
                                Mask v2p = map_image(c2.coord, u2p);
                                for (Mask vhat : grho2.objects()) {
                                    if (!subset(f1img, vhat)) continue;
                                    for (const Arrow& iso : grho2.isomorphisms_between(v2p, vhat)) {
                                        bool eq = true;
                                        for (std::size_t x = 0; x < m.f0.size() && eq; ++x)
                                            if (test_bit(u1p, x))
                                                if (iso.map[c2.coord[m.f0[x]]] != m.f1[c1.coord[x]]) eq = false;
                                        if (eq) {
                                            found = true;
                                            break;
                                        }
                                    }
                                    if (found) break;
                                }
                                if (found) break;
                            }
                            if (found) break;
                        }
                    } else {
                        for (const Chart& sc1 : m.source.charts) {
                            if (!test_bit(sc1.patch, p) || !subset(sc1.patch, c1.patch)) continue;
                            if (!maps_equal_on(sc1.coord, c1.coord, sc1.patch)) continue;
                            Mask f0img = map_image(m.f0, sc1.patch);
                            for (const Chart& tc : m.target.charts) {
                                if (!test_bit(tc.patch, m.f0[p]) || !subset(tc.patch, c2.patch)) continue;
                                if (!subset(f0img, tc.patch)) continue;
                                bool eq = true;
                                for (std::size_t x = 0; x < m.f0.size() && eq; ++x)
                                    if (test_bit(sc1.patch, x))
                                        if (tc.coord[m.f0[x]] != m.f1[c1.coord[x]]) eq = false;
                                if (eq) {
                                    found = true;
                                    break;
                                }
                            }
                            if (found) break;
                        }
                    }
                    if (!found) {
                        v.item4_direct = false;
                        break;
                    }
                }
            }
        }
    } else {
        v.item4_direct = false;
    }
    if (v.item4 != v.item4_direct)
        throw InternalConsistencyError("bundle morphism: reduction and direct diagram check disagree");

    v.holds = v.items123 && v.item4;
    if (!v.holds && v.failure.empty()) v.failure = "chart diagram condition fails";
    return v;
}

}  // namespace

BundleMorphismVerdict classify_bundle_morphism(const BundleMorphism& f, const BundleAtlas& src,
                                               const BundleAtlas& dst, BundleMorphismKind kind) {
    return classify_bundle_morphism_cached(f, src, dst, kind, bundle_to_matlas(src), bundle_to_matlas(dst));
}

bool bundle_equivalent(const BundleMorphism& f, const BundleMorphism& g) {
    return f.f_e == g.f_e && f.f_x == g.f_x && f.f_g == g.f_g;
}

// ---------------------------------------------------------------------------
// enumeration and the fiber bundle category

std::vector<BundleMorphism> enumerate_bundle_morphisms(const BundleAtlas& src, const BundleAtlas& dst,
                                                       BundleMorphismKind kind, bool bijective_fe,
                                                       const Budget& budget, ExecMode mode) {
    const Protobundle& b1 = src.bundle;
    const Protobundle& b2 = dst.bundle;

    // group homomorphisms
    std::vector<std::vector<std::uint8_t>> homs;
    {
        std::size_t n1 = b1.action.group.size(), n2 = b2.action.group.size();
        std::vector<std::uint8_t> cur(n1, 0);
        std::function<void(std::size_t)> rec = [&](std::size_t k) {
            if (k == n1) {
                for (std::size_t g = 0; g < n1; ++g)
                    for (std::size_t h = 0; h < n1; ++h)
                        if (cur[b1.action.group.mul(static_cast<std::uint8_t>(g),
                                                    static_cast<std::uint8_t>(h))] !=
                            b2.action.group.mul(cur[g], cur[h]))
                            return;
                homs.push_back(cur);
                return;
            }
            for (std::uint8_t e = 0; e < n2; ++e) {
                cur[k] = e;
                rec(k + 1);
            }
        };
        rec(0);
    }

    auto f_ys = continuous_maps_between(b1.fiber, b1.fiber.full_mask(), b2.fiber, b2.fiber.full_mask(),
                                        budget.max_maps_per_pair);

    // Item 3a forces f_E to map fibers into fibers over f_X, so candidates are
    // assembled fiberwise over each continuous base map instead of walking all
    // continuous total maps.
    struct Candidate {
        PointMap f_e, f_x;
    };
    std::vector<Candidate> cands;
    auto f_xs = continuous_maps_between(b1.base, b1.base.full_mask(), b2.base, b2.base.full_mask(),
                                        budget.max_maps_per_pair);
    for (auto& fx : f_xs) {
        std::vector<std::vector<std::size_t>> src_fibers(b1.base.size());
        std::vector<std::vector<std::size_t>> dst_fibers(b2.base.size());
        for (std::size_t e = 0; e < b1.total.size(); ++e) src_fibers[b1.proj[e]].push_back(e);
        for (std::size_t e = 0; e < b2.total.size(); ++e) dst_fibers[b2.proj[e]].push_back(e);
        PointMap fe(b1.total.size(), kNoPoint);
        std::function<void(std::size_t)> rec = [&](std::size_t x) {
            if (cands.size() > budget.max_candidates)
                throw BudgetExceeded("enumerate_bundle_morphisms: candidate budget exceeded");
            if (x == b1.base.size()) {
                if (bijective_fe) {
                    Mask seen = 0;
                    for (auto v : fe) seen |= Mask(1) << v;
                    if (popcount(seen) != static_cast<int>(b1.total.size()) ||
                        b1.total.size() != b2.total.size())
                        return;
                }
                if (is_continuous(b1.total, b2.total, fe)) cands.push_back({fe, fx});
                return;
            }
            const auto& sf = src_fibers[x];
            const auto& df = dst_fibers[fx[x]];
            std::function<void(std::size_t)> assign = [&](std::size_t k) {
                if (k == sf.size()) {
                    rec(x + 1);
                    return;
                }
                for (std::size_t t = 0; t < df.size(); ++t) {
                    fe[sf[k]] = static_cast<std::uint8_t>(df[t]);
                    assign(k + 1);
                }
                fe[sf[k]] = kNoPoint;
            };
            assign(0);
        };
        rec(0);
    }

    struct Tuple {
        std::size_t cand, hom, fy;
    };
    std::vector<Tuple> grid;
    for (std::size_t c = 0; c < cands.size(); ++c)
        for (std::size_t h = 0; h < homs.size(); ++h)
            for (std::size_t y = 0; y < f_ys.size(); ++y) grid.push_back({c, h, y});
    if (grid.size() > budget.max_candidates)
        throw BudgetExceeded("enumerate_bundle_morphisms: tuple budget exceeded");

    AtlasTriple src_triple = bundle_to_matlas(src);
    AtlasTriple dst_triple = bundle_to_matlas(dst);
    auto kept = filter_map_indexed<BundleMorphism>(grid.size(), mode,
        [&](std::size_t idx) -> std::optional<BundleMorphism> {
            BundleMorphism f;
            f.f_e = cands[grid[idx].cand].f_e;
            f.f_x = cands[grid[idx].cand].f_x;
            f.f_y = f_ys[grid[idx].fy];
            f.f_g = homs[grid[idx].hom];
            BundleMorphismVerdict v =
                classify_bundle_morphism_cached(f, src, dst, kind, src_triple, dst_triple);
            if (!v.holds) return std::nullopt;
            return f;
        });
    return kept;
}

BundleCategory fiber_bundle_category(const std::vector<BundleAtlas>& bundles, const Budget& budget,
                                     ExecMode mode) {
    BundleCategory out;
    for (const BundleAtlas& a : bundles) {
        BundleAtlasReport rep = bundle_atlas_report(a, budget, mode);
        if (!rep.is_maximal)
            throw PreconditionError("fiber_bundle_category: every atlas must be maximal");
        out.objs.push_back(a);
        out.cat.objects.push_back("b" + std::to_string(out.objs.size() - 1));
    }
    auto tuple_key = [](const BundleMorphism& f) {
        std::string k = "e[";
        for (auto v : f.f_e) k += std::to_string(v) + ",";
        k += "]y[";
        for (auto v : f.f_y) k += std::to_string(v) + ",";
        k += "]g[";
        for (auto v : f.f_g) k += std::to_string(v) + ",";
        return k + "]";
    };
    for (std::size_t s = 0; s < out.objs.size(); ++s)
        for (std::size_t t = 0; t < out.objs.size(); ++t)
            for (auto& f : enumerate_bundle_morphisms(out.objs[s], out.objs[t], BundleMorphismKind::Morphism,
                                                      false, budget, mode)) {
                out.cat.arrows.push_back({tuple_key(f), s, t});
                out.maps.push_back(std::move(f));
            }
    out.cat.identities.assign(out.objs.size(), std::size_t(-1));
    for (std::size_t o = 0; o < out.objs.size(); ++o) {
        BundleMorphism id;
        const Protobundle& b = out.objs[o].bundle;
        id.f_e.resize(b.total.size());
        id.f_x.resize(b.base.size());
        id.f_y.resize(b.fiber.size());
        id.f_g.resize(b.action.group.size());
        for (std::size_t i = 0; i < id.f_e.size(); ++i) id.f_e[i] = static_cast<std::uint8_t>(i);
        for (std::size_t i = 0; i < id.f_x.size(); ++i) id.f_x[i] = static_cast<std::uint8_t>(i);
        for (std::size_t i = 0; i < id.f_y.size(); ++i) id.f_y[i] = static_cast<std::uint8_t>(i);
        for (std::size_t i = 0; i < id.f_g.size(); ++i) id.f_g[i] = static_cast<std::uint8_t>(i);
        int idx = out.cat.find_arrow(tuple_key(id), o, o);
        if (idx >= 0) out.cat.identities[o] = static_cast<std::size_t>(idx);
    }
    std::map<std::tuple<std::size_t, std::size_t, std::string>, std::size_t> index;
    for (std::size_t a = 0; a < out.cat.arrows.size(); ++a)
        index[{out.cat.arrows[a].dom, out.cat.arrows[a].cod, out.cat.arrows[a].payload}] = a;
    for (std::size_t f = 0; f < out.cat.arrows.size(); ++f)
        for (std::size_t g = 0; g < out.cat.arrows.size(); ++g) {
            if (out.cat.arrows[f].cod != out.cat.arrows[g].dom) continue;
            const BundleMorphism& mf = out.maps[f];
            const BundleMorphism& mg = out.maps[g];
            BundleMorphism comp;
            comp.f_e.resize(mf.f_e.size());
            comp.f_x.resize(mf.f_x.size());
            comp.f_y.resize(mf.f_y.size());
            comp.f_g.resize(mf.f_g.size());
            for (std::size_t i = 0; i < mf.f_e.size(); ++i) comp.f_e[i] = mg.f_e[mf.f_e[i]];
            for (std::size_t i = 0; i < mf.f_x.size(); ++i) comp.f_x[i] = mg.f_x[mf.f_x[i]];
            for (std::size_t i = 0; i < mf.f_y.size(); ++i) comp.f_y[i] = mg.f_y[mf.f_y[i]];
            for (std::size_t i = 0; i < mf.f_g.size(); ++i) comp.f_g[i] = mg.f_g[mf.f_g[i]];
            auto it = index.find({out.cat.arrows[f].dom, out.cat.arrows[g].cod, tuple_key(comp)});
            if (it != index.end()) out.cat.compose[{g, f}] = it->second;
        }
    return out;
}

// ---------------------------------------------------------------------------
// the Bun <-> M functors

BundleFunctorPair bundle_functors(const BundleCategory& src, const Budget& budget, ExecMode mode) {
    BundleFunctorPair out;
    (void)mode;

    auto pair_key = [](const AtlasMorphism& m) {
        std::string k = "f0[";
        for (std::size_t i = 0; i < m.f0.size(); ++i)
            k += std::to_string(i) + ":" + std::to_string(m.f0[i]) + ";";
        k += "]f1[";
        for (std::size_t i = 0; i < m.f1.size(); ++i)
            k += std::to_string(i) + ":" + std::to_string(m.f1[i]) + ";";
        return k + "]";
    };

    // F_Bun,M lands in the image category: mapped objects, mapped arrows, and
    // the composition structure carried over. Each image arrow is re-verified
    // to be an m-atlas morphism between the mapped triples (the Lemma 26.5
    // reduction), which is the endpoint obligation of the functor.
    std::vector<AtlasTriple> mapped;
    for (const BundleAtlas& a : src.objs) {
        AtlasTriple t = bundle_to_matlas(a);
        if (!is_m_atlas(t))
            throw InternalConsistencyError("bundle_functors: a mapped bundle atlas is not an m-atlas");
        mapped.push_back(std::move(t));
    }
    AtlasCategory& img = out.matlas_cat;
    img.mode = ArrowMode::Morphism;
    img.objs = mapped;
    for (std::size_t i = 0; i < mapped.size(); ++i) img.cat.objects.push_back("o" + std::to_string(i));
    for (std::size_t a = 0; a < src.cat.arrows.size(); ++a) {
        const BundleMorphism& f = src.maps[a];
        std::size_t sd = src.cat.arrows[a].dom, sc = src.cat.arrows[a].cod;
        AtlasMorphism m;
        m.source = mapped[sd];
        m.target = mapped[sc];
        m.f0 = f.f_e;
        m.f1 = product_map(src.objs[sd].bundle, src.objs[sc].bundle, f.f_x, f.f_y);
        ClassifyOptions opts;
        opts.want_near = false;
        opts.want_strictness = false;
        MorphismClassification cls = classify(m, {}, opts);
        if (!cls.model_functions || !cls.morphism)
            throw InternalConsistencyError("bundle_functors: a mapped bundle map is not an m-atlas morphism");
        if (img.cat.find_arrow(pair_key(m), sd, sc) < 0) {
            img.cat.arrows.push_back({pair_key(m), sd, sc});
            img.morphisms.push_back(m);
        }
    }
    img.cat.identities.assign(mapped.size(), std::size_t(-1));
    for (std::size_t o = 0; o < mapped.size(); ++o) {
        AtlasMorphism id = identity_morphism(mapped[o]);
        int idx = img.cat.find_arrow(pair_key(id), o, o);
        if (idx >= 0) img.cat.identities[o] = static_cast<std::size_t>(idx);
    }
    for (std::size_t f = 0; f < img.cat.arrows.size(); ++f)
        for (std::size_t g = 0; g < img.cat.arrows.size(); ++g) {
            if (img.cat.arrows[f].cod != img.cat.arrows[g].dom) continue;
            const AtlasMorphism& mf = img.morphisms[f];
            const AtlasMorphism& mg = img.morphisms[g];
            AtlasMorphism comp;
            comp.source = mf.source;
            comp.target = mg.target;
            comp.f0.resize(mf.f0.size());
            comp.f1.resize(mf.f1.size());
            for (std::size_t i = 0; i < mf.f0.size(); ++i) comp.f0[i] = mg.f0[mf.f0[i]];
            for (std::size_t i = 0; i < mf.f1.size(); ++i) comp.f1[i] = mg.f1[mf.f1[i]];
            int idx = img.cat.find_arrow(pair_key(comp), img.cat.arrows[f].dom, img.cat.arrows[g].cod);
            if (idx >= 0) img.cat.compose[{g, f}] = static_cast<std::size_t>(idx);
        }

    out.to_m.src = src.cat;
    out.to_m.dst = img.cat;
    for (std::size_t i = 0; i < mapped.size(); ++i) out.to_m.on_objects.push_back(static_cast<int>(i));
    for (std::size_t a = 0; a < src.cat.arrows.size(); ++a) {
        const BundleMorphism& f = src.maps[a];
        std::size_t sd = src.cat.arrows[a].dom, sc = src.cat.arrows[a].cod;
        AtlasMorphism m;
        m.source = mapped[sd];
        m.target = mapped[sc];
        m.f0 = f.f_e;
        m.f1 = product_map(src.objs[sd].bundle, src.objs[sc].bundle, f.f_x, f.f_y);
        out.to_m.on_arrows.push_back(img.cat.find_arrow(pair_key(m), sd, sc));
    }

    // F_M-G-rho,Bun back: rebuild the projection and the group component.
    out.from_m.src = out.matlas_cat.cat;
    out.from_m.dst = src.cat;
    std::vector<int> back_obj(out.matlas_cat.objs.size(), -1);
    for (std::size_t o = 0; o < out.matlas_cat.objs.size(); ++o) {
        const AtlasTriple& t = out.matlas_cat.objs[o];
        // the object must be a full atlas for the projection to be onto
        AtlasReport rep = atlas_report(t, budget, mode);
        if (!rep.is_full)
            throw PreconditionError("bundle_functors: the m-atlas object is not full");
        for (std::size_t b = 0; b < src.objs.size(); ++b) {
            const BundleAtlas& cand = src.objs[b];
            std::vector<BundleChart> charts;
            for (const Chart& c : t.charts) {
                BundleChart bc;
                bc.patch = c.patch;
                bc.coord = c.coord;
                Mask v = 0;
                for (std::size_t p = 0; p < cand.bundle.product.size(); ++p)
                    if (test_bit(c.codomain, p)) v |= Mask(1) << cand.bundle.pair_base(static_cast<std::uint8_t>(p));
                bc.base_open = v;
                charts.push_back(bc);
            }
            PointMap pi = derive_projection(charts, cand.bundle.total, cand.bundle.base, cand.bundle.product);
            BundleAtlas rebuilt;
            rebuilt.bundle = cand.bundle;
            rebuilt.bundle.proj = pi;
            rebuilt.charts = charts;
            rebuilt.canonicalize();
            BundleAtlas sorted_cand = cand;
            sorted_cand.canonicalize();
            if (rebuilt.charts == sorted_cand.charts && pi == cand.bundle.proj) {
                back_obj[o] = static_cast<int>(b);
                break;
            }
        }
    }
    out.from_m.on_objects = back_obj;
    auto tuple_key = [](const BundleMorphism& f) {
        std::string k = "e[";
        for (auto v : f.f_e) k += std::to_string(v) + ",";
        k += "]y[";
        for (auto v : f.f_y) k += std::to_string(v) + ",";
        k += "]g[";
        for (auto v : f.f_g) k += std::to_string(v) + ",";
        return k + "]";
    };
    for (std::size_t a = 0; a < out.matlas_cat.cat.arrows.size(); ++a) {
        int idx = -1;
        int od = back_obj[out.matlas_cat.cat.arrows[a].dom];
        int oc = back_obj[out.matlas_cat.cat.arrows[a].cod];
        if (od >= 0 && oc >= 0) {
            const AtlasMorphism& m = out.matlas_cat.morphisms[a];
            const BundleAtlas& s = src.objs[od];
            const BundleAtlas& d = src.objs[oc];
            // the coordinate component must decompose as f_X x f_Y
            PointMap fx(s.bundle.base.size(), kNoPoint), fy(s.bundle.fiber.size(), kNoPoint);
            bool product_arrow = true;
            for (std::size_t p = 0; p < s.bundle.product.size() && product_arrow; ++p) {
                std::uint8_t img = m.f1[p];
                std::uint8_t x = s.bundle.pair_base(static_cast<std::uint8_t>(p));
                std::uint8_t y = s.bundle.pair_fiber(static_cast<std::uint8_t>(p));
                std::uint8_t ix = d.bundle.pair_base(img);
                std::uint8_t iy = d.bundle.pair_fiber(img);
                if (fx[x] == kNoPoint)
                    fx[x] = ix;
                else if (fx[x] != ix)
                    product_arrow = false;
                if (fy[y] == kNoPoint)
                    fy[y] = iy;
                else if (fy[y] != iy)
                    product_arrow = false;
            }
            if (!product_arrow)
                throw PreconditionError("bundle_functors: a coordinate arrow is a twisted product");
            GrhoSpec g1{s.bundle.base, s.bundle.fiber, s.bundle.action};
            GrhoSpec g2{d.bundle.base, d.bundle.fiber, d.bundle.action};
            GrhoMorphismReport rep = grho_morphism_report(g1, g2, m.f1);
            if (rep.is_grho_morphism) {
                BundleMorphism f;
                f.f_e = m.f0;
                f.f_x = fx;
                f.f_y = fy;
                f.f_g = rep.f_g;
                idx = src.cat.find_arrow(tuple_key(f), static_cast<std::size_t>(od),
                                         static_cast<std::size_t>(oc));
            }
        }
        out.from_m.on_arrows.push_back(idx);
    }
    return out;
}

ModelSpace bundle_minimal_space(const BundleAtlas& a, MinWhich which, const Budget& budget) {
    AtlasTriple t = bundle_to_matlas(a);
    return minimal_space_functor_object(t, which, budget);
}

}  // namespace af
