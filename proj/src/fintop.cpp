#include "atlasforge/fintop.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace af {

namespace {

std::vector<Mask> close_family(std::vector<Mask> fam, Mask full) {
    std::set<Mask> out(fam.begin(), fam.end());
    out.insert(0);
    out.insert(full);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<Mask> cur(out.begin(), out.end());
        for (std::size_t i = 0; i < cur.size(); ++i)
            for (std::size_t j = i + 1; j < cur.size(); ++j) {
                if (out.insert(cur[i] | cur[j]).second) changed = true;
                if (out.insert(cur[i] & cur[j]).second) changed = true;
            }
    }
    return {out.begin(), out.end()};
}

}  // namespace

FinSpace::FinSpace(std::vector<std::string> points, std::vector<Mask> opens) {
    if (points.size() > 64) throw MalformedInput("FinSpace: more than 64 points");
    // Canonical point order; remap the given masks accordingly.
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
    for (std::size_t i = 0; i + 1 < order.size(); ++i)
        if (points[order[i]] == points[order[i + 1]]) throw MalformedInput("FinSpace: duplicate point name");
    std::vector<std::size_t> pos(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    points_.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) points_[pos[i]] = points[i];
    Mask full = points_.empty() ? 0 : (points_.size() == 64 ? ~Mask(0) : ((Mask(1) << points_.size()) - 1));
    for (Mask m : opens) {
        if (!subset(m, full)) throw MalformedInput("FinSpace: open set mentions unknown point");
        Mask r = 0;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (test_bit(m, i)) r |= Mask(1) << pos[i];
        opens_.push_back(r);
    }
    opens_ = close_family(std::move(opens_), full);
    finish();
}

void FinSpace::finish() {
    min_open_.assign(points_.size(), 0);
    for (std::size_t i = 0; i < points_.size(); ++i) {
        Mask acc = full_mask();
        for (Mask u : opens_)
            if (test_bit(u, i)) acc &= u;
        min_open_[i] = acc;
    }
}

bool FinSpace::is_open(Mask m) const { return std::binary_search(opens_.begin(), opens_.end(), m); }

int FinSpace::point_index(const std::string& name) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), name);
    if (it == points_.end() || *it != name) return -1;
    return static_cast<int>(it - points_.begin());
}

Mask FinSpace::interior(Mask m) const {
    Mask acc = 0;
    for (Mask u : opens_)
        if (subset(u, m)) acc |= u;
    return acc;
}

Mask FinSpace::closure_set(Mask m) const { return full_mask() & ~interior(full_mask() & ~m); }

Mask CMap::image(Mask m) const {
    Mask r = 0;
    for (std::size_t i = 0; i < dom.size(); ++i)
        if (test_bit(m, i)) r |= Mask(1) << map[i];
    return r;
}

Mask CMap::preimage(Mask m) const {
    Mask r = 0;
    for (std::size_t i = 0; i < dom.size(); ++i)
        if (test_bit(m, map[i])) r |= Mask(1) << i;
    return r;
}

void validate_cmap(const CMap& f) {
    if (f.map.size() != f.dom.size()) throw MalformedInput("CMap: map not total on domain");
    for (std::size_t i = 0; i < f.map.size(); ++i)
        if (f.map[i] == kNoPoint || f.map[i] >= f.cod.size())
            throw MalformedInput("CMap: value outside codomain at point " + f.dom.point_name(i));
}

CMap compose(const CMap& g, const CMap& f) {
    if (f.cod != g.dom) throw PreconditionError("compose: codomain/domain mismatch");
    CMap r{f.dom, g.cod, PointMap(f.dom.size())};
    for (std::size_t i = 0; i < f.dom.size(); ++i) r.map[i] = g.map[f.map[i]];
    return r;
}

CMap identity_map(const FinSpace& s) {
    CMap r{s, s, PointMap(s.size())};
    for (std::size_t i = 0; i < s.size(); ++i) r.map[i] = static_cast<std::uint8_t>(i);
    return r;
}

CMap inverse(const CMap& f) {
    if (f.dom.size() != f.cod.size()) throw PreconditionError("inverse: map not bijective");
    CMap r{f.cod, f.dom, PointMap(f.cod.size(), kNoPoint)};
    for (std::size_t i = 0; i < f.dom.size(); ++i) r.map[f.map[i]] = static_cast<std::uint8_t>(i);
    for (auto v : r.map)
        if (v == kNoPoint) throw PreconditionError("inverse: map not bijective");
    return r;
}

bool is_continuous(const FinSpace& dom, const FinSpace& cod, const PointMap& map) {
    CMap f{dom, cod, map};
    validate_cmap(f);
    for (Mask v : cod.opens())
        if (!dom.is_open(f.preimage(v))) return false;
    return true;
}

bool is_continuous(const CMap& f) { return is_continuous(f.dom, f.cod, f.map); }

bool is_homeomorphism(const CMap& f) {
    validate_cmap(f);
    if (f.dom.size() != f.cod.size()) return false;
    Mask seen = 0;
    for (auto v : f.map) seen |= Mask(1) << v;
    if (popcount(seen) != static_cast<int>(f.dom.size())) return false;
    return is_continuous(f) && is_continuous(inverse(f));
}

FinSpace subspace(const FinSpace& s, Mask carrier) {
    if (!subset(carrier, s.full_mask())) throw MalformedInput("subspace: carrier not contained in space");
    std::vector<std::string> pts;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (test_bit(carrier, i)) pts.push_back(s.point_name(i));
    std::vector<std::uint8_t> newidx(s.size(), kNoPoint);
    std::uint8_t k = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (test_bit(carrier, i)) newidx[i] = k++;
    std::set<Mask> rel;
    for (Mask u : s.opens()) {
        Mask r = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (test_bit(u & carrier, i)) r |= Mask(1) << newidx[i];
        rel.insert(r);
    }
    return FinSpace(std::move(pts), std::vector<Mask>(rel.begin(), rel.end()));
}

FinSpace product(const FinSpace& s, const FinSpace& t) {
    if (s.size() * t.size() > 64) throw MalformedInput("product: more than 64 points");
    std::vector<std::string> pts;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j)
            pts.push_back("(" + s.point_name(i) + "," + t.point_name(j) + ")");
    // pts is built in (i,j)-major order; pair index = i*|t| + j.
    auto pair_bit = [&](std::size_t i, std::size_t j) { return Mask(1) << (i * t.size() + j); };
    // Minimal neighborhood of (i,j) is N_i x N_j; opens are all unions of them.
    std::vector<Mask> minimal;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j) {
            Mask m = 0;
            for (std::size_t a = 0; a < s.size(); ++a)
                for (std::size_t b = 0; b < t.size(); ++b)
                    if (test_bit(s.minimal_open(i), a) && test_bit(t.minimal_open(j), b)) m |= pair_bit(a, b);
            minimal.push_back(m);
        }
    std::size_t n = s.size() * t.size();
    if (n > 22) throw BudgetExceeded("product: topology enumeration over " + std::to_string(n) + " points");
    std::set<Mask> opens;
    for (Mask sub = 0;; ++sub) {
        Mask u = 0;
        for (std::size_t k = 0; k < n; ++k)
            if (test_bit(sub, k)) u |= minimal[k];
        opens.insert(u);
        if (sub == ((n == 64 ? ~Mask(0) : (Mask(1) << n) - 1))) break;
    }
    // Renaming to sorted point order happens inside the constructor.
    std::vector<Mask> fam(opens.begin(), opens.end());
    return FinSpace(std::move(pts), fam);
}

std::vector<Mask> connected_components(const FinSpace& s) {
    std::size_t n = s.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (s.leq(i, j)) parent[find(i)] = find(j);
    std::map<std::size_t, Mask> comps;
    for (std::size_t i = 0; i < n; ++i) comps[find(i)] |= Mask(1) << i;
    std::vector<Mask> out;
    for (auto& [root, m] : comps) out.push_back(m);
    std::sort(out.begin(), out.end());
    return out;
}

Mask map_image(const PointMap& m, Mask domain) {
    Mask r = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (test_bit(domain, i)) r |= Mask(1) << m[i];
    return r;
}

Mask map_preimage(const PointMap& m, Mask domain, Mask target) {
    Mask r = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (test_bit(domain, i) && test_bit(target, m[i])) r |= Mask(1) << i;
    return r;
}

PointMap restrict_map(const PointMap& m, Mask domain) {
    PointMap r(m.size(), kNoPoint);
    for (std::size_t i = 0; i < m.size(); ++i)
        if (test_bit(domain, i)) r[i] = m[i];
    return r;
}

PointMap compose_partial(const PointMap& g, const PointMap& f, Mask domain) {
    PointMap r(f.size(), kNoPoint);
    for (std::size_t i = 0; i < f.size(); ++i)
        if (test_bit(domain, i)) r[i] = g[f[i]];
    return r;
}

PointMap invert_partial(const PointMap& m, Mask domain, std::size_t out_size) {
    PointMap r(out_size, kNoPoint);
    for (std::size_t i = 0; i < m.size(); ++i)
        if (test_bit(domain, i)) {
            if (r[m[i]] != kNoPoint) throw PreconditionError("invert_partial: map not injective");
            r[m[i]] = static_cast<std::uint8_t>(i);
        }
    return r;
}

PointMap identity_partial(std::size_t n, Mask domain) {
    PointMap r(n, kNoPoint);
    for (std::size_t i = 0; i < n; ++i)
        if (test_bit(domain, i)) r[i] = static_cast<std::uint8_t>(i);
    return r;
}

bool maps_equal_on(const PointMap& a, const PointMap& b, Mask domain) {
    for (std::size_t i = 0; i < 64; ++i)
        if (test_bit(domain, i)) {
            std::uint8_t va = i < a.size() ? a[i] : kNoPoint;
            std::uint8_t vb = i < b.size() ? b[i] : kNoPoint;
            if (va != vb) return false;
        }
    return true;
}

bool is_continuous_between(const FinSpace& dom_space, Mask dom, const FinSpace& cod_space, Mask cod,
                           const PointMap& map) {
    // Relative topologies: opens of dom are U & dom, opens of cod are V & cod.
    for (Mask v : cod_space.opens()) {
        Mask pre = map_preimage(map, dom, v & cod);
        if (dom_space.interior(pre) != pre) {
            // pre must equal W & dom for some open W; equivalently pre is open
            // in the relative topology.
            bool ok = false;
            for (Mask w : dom_space.opens())
                if ((w & dom) == pre) {
                    ok = true;
                    break;
                }
            if (!ok) return false;
        }
    }
    return true;
}

bool is_open_map_between(const FinSpace& dom_space, Mask dom, const FinSpace& cod_space, Mask cod,
                         const PointMap& map) {
    for (Mask u : dom_space.opens()) {
        Mask img = map_image(map, u & dom);
        bool ok = false;
        for (Mask w : cod_space.opens())
            if ((w & cod) == img) {
                ok = true;
                break;
            }
        if (!ok) return false;
    }
    return true;
}

bool is_homeomorphism_between(const FinSpace& dom_space, Mask dom, const FinSpace& cod_space, Mask cod,
                              const PointMap& map) {
    if (popcount(dom) != popcount(cod)) return false;
    if (map_image(map, dom) != cod) return false;
    Mask seen = 0;
    int cnt = 0;
    for (std::size_t i = 0; i < map.size(); ++i)
        if (test_bit(dom, i)) {
            seen |= Mask(1) << map[i];
            ++cnt;
        }
    if (popcount(seen) != cnt) return false;
    if (!is_continuous_between(dom_space, dom, cod_space, cod, map)) return false;
    PointMap inv = invert_partial(map, dom, cod_space.size());
    return is_continuous_between(cod_space, cod, dom_space, dom, inv);
}

namespace {

// Backtracking over points of dom in an order compatible with specialization,
// enforcing monotonicity (continuity for finite spaces is exactly
// specialization-preservation between the relative preorders).
void enumerate_monotone(const FinSpace& dom_space, Mask dom, const FinSpace& cod_space, Mask cod,
                        std::vector<std::size_t>& dom_pts, std::vector<std::size_t>& cod_pts, PointMap& cur,
                        std::size_t k, std::vector<PointMap>& out, std::size_t cap) {
    if (k == dom_pts.size()) {
        if (is_continuous_between(dom_space, dom, cod_space, cod, cur)) out.push_back(cur);
        if (out.size() > cap) throw BudgetExceeded("continuous_maps_between: too many maps");
        return;
    }
    std::size_t p = dom_pts[k];
    for (std::size_t q : cod_pts) {
        bool ok = true;
        for (std::size_t k2 = 0; k2 < k && ok; ++k2) {
            std::size_t p2 = dom_pts[k2];
            std::size_t q2 = cur[p2];
            // relative specialization: restrict minimal opens to the carriers
            bool p_le_p2 = test_bit(dom_space.minimal_open(p2) & dom, p);
            bool p2_le_p = test_bit(dom_space.minimal_open(p) & dom, p2);
            if (p_le_p2 && !test_bit(cod_space.minimal_open(q2) & cod, q)) ok = false;
            if (p2_le_p && !test_bit(cod_space.minimal_open(q) & cod, q2)) ok = false;
        }
        if (!ok) continue;
        cur[p] = static_cast<std::uint8_t>(q);
        enumerate_monotone(dom_space, dom, cod_space, cod, dom_pts, cod_pts, cur, k + 1, out, cap);
        cur[p] = kNoPoint;
    }
}

}  // namespace

std::vector<PointMap> continuous_maps_between(const FinSpace& dom_space, Mask dom, const FinSpace& cod_space,
                                              Mask cod, std::size_t cap) {
    std::vector<std::size_t> dom_pts, cod_pts;
    for (std::size_t i = 0; i < dom_space.size(); ++i)
        if (test_bit(dom, i)) dom_pts.push_back(i);
    for (std::size_t j = 0; j < cod_space.size(); ++j)
        if (test_bit(cod, j)) cod_pts.push_back(j);
    std::vector<PointMap> out;
    if (dom_pts.empty()) {
        out.push_back(PointMap(dom_space.size(), kNoPoint));
        return out;
    }
    if (cod_pts.empty()) return out;  // no map from nonempty into empty
    PointMap cur(dom_space.size(), kNoPoint);
    enumerate_monotone(dom_space, dom, cod_space, cod, dom_pts, cod_pts, cur, 0, out, cap);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<PointMap> homeomorphisms_between(const FinSpace& dom_space, Mask dom, const FinSpace& cod_space,
                                             Mask cod) {
    std::vector<PointMap> out;
    if (popcount(dom) != popcount(cod)) return out;
    for (auto& m : continuous_maps_between(dom_space, dom, cod_space, cod))
        if (popcount(dom) == 0 || is_homeomorphism_between(dom_space, dom, cod_space, cod, m)) out.push_back(m);
    return out;
}

std::string mask_to_string(const FinSpace& s, Mask m) {
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (test_bit(m, i)) {
            if (!first) out += ",";
            out += s.point_name(i);
            first = false;
        }
    return out + "}";
}

}  // namespace af
