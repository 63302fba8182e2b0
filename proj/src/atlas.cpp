#include "atlasforge/atlas.hpp"

#include <algorithm>

#include "atlasforge/parallel.hpp"

namespace af {

bool operator<(const Chart& a, const Chart& b) {
    if (a.patch != b.patch) return a.patch < b.patch;
    if (a.codomain != b.codomain) return a.codomain < b.codomain;
    for (std::size_t i = 0; i < 64; ++i)
        if (test_bit(a.patch, i)) {
            if (a.coord[i] != b.coord[i]) return a.coord[i] < b.coord[i];
        }
    return false;
}

void AtlasTriple::canonicalize() {
    for (Chart& c : charts) {
        PointMap clean(total.space().size(), kNoPoint);
        for (std::size_t i = 0; i < total.space().size(); ++i)
            if (test_bit(c.patch, i)) clean[i] = c.coord[i];
        c.coord = std::move(clean);
    }
    std::sort(charts.begin(), charts.end());
    charts.erase(std::unique(charts.begin(), charts.end()), charts.end());
}

bool operator==(const AtlasTriple& a, const AtlasTriple& b) {
    return a.charts == b.charts && a.total == b.total && a.coord == b.coord &&
           a.total_is_topological == b.total_is_topological && a.flavor == b.flavor;
}

ChartCheck chart_check(const Chart& c, const ModelSpace& total, const ModelSpace& coord, ChartFlavor flavor) {
    ChartCheck r;
    if (c.patch == 0) {
        r.failures.push_back("patch is void");
        return r;
    }
    if (!total.is_object(c.patch)) r.failures.push_back("patch is not a model neighborhood of the total space");
    if (!coord.is_object(c.codomain))
        r.failures.push_back("codomain is not a model neighborhood of the coordinate space");
    if (!r.failures.empty()) return r;
    for (std::size_t i = 0; i < total.space().size(); ++i)
        if (test_bit(c.patch, i)) {
            if (i >= c.coord.size() || c.coord[i] == kNoPoint || c.coord[i] >= coord.space().size() ||
                !test_bit(c.codomain, c.coord[i])) {
                r.failures.push_back("coordinate function is not a total map into the codomain");
                return r;
            }
        }
    if (flavor == ChartFlavor::PlainHomeo) {
        if (!is_homeomorphism_between(total.space(), c.patch, coord.space(), c.codomain, c.coord))
            r.failures.push_back("coordinate function is not a homeomorphism onto its codomain");
        r.valid = r.failures.empty();
        return r;
    }
    // The coordinate function must be a model homeomorphism between the
    // relative model spaces of patch and codomain.
    ModelSpace mu = relative(total, c.patch);
    ModelSpace mv = relative(coord, c.codomain);
    PointMap rel(mu.space().size(), kNoPoint);
    for (std::size_t i = 0; i < total.space().size(); ++i)
        if (test_bit(c.patch, i)) {
            int di = mu.space().point_index(total.space().point_name(i));
            int ci = mv.space().point_index(coord.space().point_name(c.coord[i]));
            rel[di] = static_cast<std::uint8_t>(ci);
        }
    try {
        ModelFunctionReport rep = model_function_report(mu, mv, rel);
        if (!rep.is_homeomorphism) {
            r.failures.push_back("coordinate function is not a model homeomorphism");
            for (auto& w : rep.witness_failures) r.failures.push_back("  " + w);
        }
    } catch (const PreconditionError&) {
        r.failures.push_back("coordinate function is not continuous");
    }
    r.valid = r.failures.empty();
    return r;
}

Chart subchart(const Chart& c, Mask u_prime, const ModelSpace& total, const ModelSpace& coord) {
    if (u_prime == 0) throw PreconditionError("subchart: void patch");
    if (!total.is_object(u_prime)) throw PreconditionError("subchart: set is not a model neighborhood");
    if (!subset(u_prime, c.patch)) throw PreconditionError("subchart: set is not contained in the patch");
    Chart out;
    out.patch = u_prime;
    out.codomain = map_image(c.coord, u_prime);
    out.coord = restrict_map(c.coord, u_prime);
    if (!coord.is_object(out.codomain))
        throw InternalConsistencyError("subchart: image of a model neighborhood is not one");
    return out;
}

std::optional<Transition> transition(const Chart& c1, const Chart& c2, const ModelSpace& total,
                                     const ModelSpace& coord) {
    (void)total;
    Mask overlap = c1.patch & c2.patch;
    if (overlap == 0) return std::nullopt;
    Transition t;
    t.dom = map_image(c1.coord, overlap);
    t.cod = map_image(c2.coord, overlap);
    PointMap inv1 = invert_partial(c1.coord, c1.patch, coord.space().size());
    t.map = PointMap(coord.space().size(), kNoPoint);
    for (std::size_t v = 0; v < coord.space().size(); ++v)
        if (test_bit(t.dom, v)) t.map[v] = c2.coord[inv1[v]];
    return t;
}

bool are_compatible(const Chart& c1, const Chart& c2, const ModelSpace& total, const ModelSpace& coord) {
    if ((c1.patch & ~total.space().full_mask()) != 0 || (c2.patch & ~total.space().full_mask()) != 0)
        throw PreconditionError("are_compatible: charts do not share the total space");
    auto t = transition(c1, c2, total, coord);
    if (!t) return true;
    Arrow a;
    a.dom = t->dom;
    a.cod = t->cod;
    a.map = t->map;
    return coord.arrow_is_isomorphism(a);
}

bool chart_vs_atlas(const Chart& c, const AtlasTriple& a) {
    for (const Chart& other : a.charts)
        if (!are_compatible(c, other, a.total, a.coord)) return false;
    return true;
}

std::vector<Chart> enumerate_candidate_charts(const ModelSpace& total, const ModelSpace& coord,
                                              const Budget& budget, ExecMode mode, ChartFlavor flavor) {
    // Pair up objects of matching size, then walk every homeomorphism between
    // the relative spaces and keep the model homeomorphisms.
    struct PairJob {
        Mask u, v;
    };
    std::vector<PairJob> jobs;
    for (Mask u : total.objects()) {
        if (u == 0) continue;  // coordinate patches are nonvoid
        for (Mask v : coord.objects())
            if (popcount(u) == popcount(v)) jobs.push_back({u, v});
    }
    auto per_job = [&](std::size_t idx) -> std::optional<std::vector<Chart>> {
        const PairJob& j = jobs[idx];
        std::vector<Chart> found;
        for (const PointMap& h : homeomorphisms_between(total.space(), j.u, coord.space(), j.v)) {
            Chart c;
            c.patch = j.u;
            c.codomain = j.v;
            c.coord = h;
            if (chart_check(c, total, coord, flavor).valid) found.push_back(c);
        }
        if (found.empty()) return std::nullopt;
        return found;
    };
    auto batches = filter_map_indexed<std::vector<Chart>>(jobs.size(), mode, per_job);
    std::vector<Chart> out;
    for (auto& b : batches) {
        out.insert(out.end(), b.begin(), b.end());
        if (out.size() > budget.max_candidates)
            throw BudgetExceeded("enumerate_candidate_charts: candidate budget exceeded");
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Validity, mutual compatibility and cover only; the flags the closure needs.
bool is_atlas_core(const AtlasTriple& a) {
    for (const Chart& c : a.charts)
        if (!chart_check(c, a.total, a.coord, a.flavor).valid) return false;
    for (std::size_t i = 0; i < a.charts.size(); ++i)
        for (std::size_t j = i; j < a.charts.size(); ++j)
            if (!are_compatible(a.charts[i], a.charts[j], a.total, a.coord)) return false;
    Mask covered = 0;
    for (const Chart& c : a.charts) covered |= c.patch;
    return covered == a.total.space().full_mask();
}

}  // namespace

bool is_m_atlas(const AtlasTriple& a) { return is_atlas_core(a); }

AtlasReport atlas_report(const AtlasTriple& a, const Budget& budget, ExecMode mode) {
    AtlasReport rep;
    bool charts_valid = true;
    for (const Chart& c : a.charts) {
        ChartCheck cc = chart_check(c, a.total, a.coord, a.flavor);
        if (!cc.valid) {
            charts_valid = false;
            for (auto& f : cc.failures) rep.failures.push_back("chart: " + f);
            break;
        }
    }
    bool mutually = true;
    for (std::size_t i = 0; i < a.charts.size() && mutually; ++i)
        for (std::size_t j = i; j < a.charts.size(); ++j)
            if (!are_compatible(a.charts[i], a.charts[j], a.total, a.coord)) {
                mutually = false;
                rep.failures.push_back("charts " + std::to_string(i) + " and " + std::to_string(j) +
                                       " are incompatible");
                break;
            }
    Mask covered = 0;
    for (const Chart& c : a.charts) covered |= c.patch;
    bool covers = covered == a.total.space().full_mask();
    if (!covers) rep.failures.push_back("patches do not cover the total space");
    rep.is_atlas = charts_valid && mutually && covers;

    Mask codcover = 0;
    for (const Chart& c : a.charts) codcover |= c.codomain;
    rep.is_full = rep.is_atlas && codcover == a.coord.space().full_mask();

    if (!rep.is_atlas) return rep;

    // Semi-maximal: closed under subcharts post-composed with coordinate
    // isomorphisms (Def 10.6).
    rep.is_semi_maximal = true;
    for (const Chart& c : a.charts) {
        for (Mask u2 : a.total.objects()) {
            if (u2 == 0 || !subset(u2, c.patch)) continue;
            // restrictions whose image is not a model neighborhood are not
            // charts and do not constrain semi-maximality
            if (!a.coord.is_object(map_image(c.coord, u2))) continue;
            Chart sc = subchart(c, u2, a.total, a.coord);
            for (Mask v2 : a.coord.objects()) {
                if (popcount(v2) != popcount(sc.codomain)) continue;
                for (const Arrow& iso : a.coord.isomorphisms_between(sc.codomain, v2)) {
                    Chart post;
                    post.patch = sc.patch;
                    post.codomain = v2;
                    post.coord = compose_partial(iso.map, sc.coord, sc.patch);
                    if (!std::binary_search(a.charts.begin(), a.charts.end(), post)) {
                        rep.is_semi_maximal = false;
                        rep.failures.push_back("semi-maximal: missing variant of a chart at " +
                                               mask_to_string(a.total.space(), sc.patch));
                        goto semi_done;
                    }
                }
            }
        }
    }
semi_done:;

    // Maximal: no compatible candidate chart outside the set.
    rep.is_maximal = true;
    for (const Chart& cand : enumerate_candidate_charts(a.total, a.coord, budget, mode, a.flavor)) {
        if (std::binary_search(a.charts.begin(), a.charts.end(), cand)) continue;
        if (chart_vs_atlas(cand, a)) {
            rep.is_maximal = false;
            rep.failures.push_back("maximal: extendable by a chart at " +
                                   mask_to_string(a.total.space(), cand.patch));
            break;
        }
    }
    return rep;
}

AtlasTriple maximal_closure(const AtlasTriple& a, const Budget& budget, ExecMode mode) {
    if (!is_atlas_core(a)) throw PreconditionError("maximal_closure: input is not an m-atlas");

    AtlasTriple out = a;
    out.canonicalize();
    std::vector<Chart> kept;
    for (const Chart& cand : enumerate_candidate_charts(a.total, a.coord, budget, mode, a.flavor))
        if (chart_vs_atlas(cand, a)) kept.push_back(cand);
    for (const Chart& c : out.charts)
        if (!std::binary_search(kept.begin(), kept.end(), c))
            throw InternalConsistencyError("maximal_closure: the input charts must survive enumeration");
    // Mutual compatibility is guaranteed by extension of m-atlases but is
    // re-verified rather than assumed.
    for (std::size_t i = 0; i < kept.size(); ++i)
        for (std::size_t j = i + 1; j < kept.size(); ++j)
            if (!are_compatible(kept[i], kept[j], a.total, a.coord))
                throw InternalConsistencyError("maximal_closure: enumerated charts are not mutually compatible");
    out.charts = std::move(kept);
    out.canonicalize();
    return out;
}

}  // namespace af
