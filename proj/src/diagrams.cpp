#include "atlasforge/diagrams.hpp"

#include <algorithm>
#include <functional>

namespace af {

namespace {

void validate_chain(const std::vector<ChainLink>& chain, const ModelSpace& ambient, const char* side) {
    const FinSpace& s = ambient.space();
    for (const ChainLink& l : chain) {
        if (!subset(l.dom, s.full_mask()) || !subset(l.cod, s.full_mask()))
            throw MalformedInput(std::string("ncd: ") + side + " chain node outside the ambient carrier");
        for (std::size_t i = 0; i < s.size(); ++i)
            if (test_bit(l.dom, i)) {
                if (i >= l.map.size() || l.map[i] == kNoPoint || !test_bit(l.cod, l.map[i]))
                    throw MalformedInput(std::string("ncd: ") + side + " chain map not into its codomain");
            }
    }
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
        if (chain[i].cod != chain[i + 1].dom)
            throw MalformedInput(std::string("ncd: ") + side + " chain is not composable");
}

Mask initial_node(const NcdProblem& p) {
    if (!p.left.empty()) return p.left.front().dom;
    if (!p.right.empty()) return p.right.front().dom;
    return 0;
}

Mask terminal_node(const std::vector<ChainLink>& chain, Mask initial) {
    return chain.empty() ? initial : chain.back().cod;
}

// Composite of a chain as a partial map on the initial node.
PointMap chain_composite(const std::vector<ChainLink>& chain, Mask initial, std::size_t carrier) {
    PointMap acc = identity_partial(carrier, initial);
    for (const ChainLink& l : chain) acc = compose_partial(l.map, acc, initial);
    return acc;
}

}  // namespace

void validate_ncd(const NcdProblem& p) {
    if (p.left.empty() || p.right.empty()) throw MalformedInput("ncd: both branches need at least one link");
    validate_chain(p.left, p.ambient, "left");
    validate_chain(p.right, p.ambient, "right");
    Mask init_l = p.left.empty() ? initial_node(p) : p.left.front().dom;
    Mask init_r = p.right.empty() ? initial_node(p) : p.right.front().dom;
    if (init_l != init_r) throw MalformedInput("ncd: branch initial nodes differ");
    Mask u0 = initial_node(p);
    if (!p.ambient.is_object(terminal_node(p.left, u0)) || !p.ambient.is_object(terminal_node(p.right, u0)))
        throw PreconditionError("ncd: terminal nodes are not objects of the ambient");
}

NcdVerdict complete_ncd(const NcdProblem& p) {
    validate_ncd(p);
    NcdVerdict v;
    const std::size_t n = p.ambient.space().size();
    Mask u0 = initial_node(p);
    Mask um = terminal_node(p.left, u0);
    Mask vn = terminal_node(p.right, u0);
    PointMap lc = chain_composite(p.left, u0, n);
    PointMap rc = chain_composite(p.right, u0, n);

    auto equalizes = [&](const Arrow& a, const PointMap& post, const PointMap& target) {
        for (std::size_t i = 0; i < n; ++i)
            if (test_bit(u0, i))
                if (a.map[post[i]] != target[i]) return false;
        return true;
    };

    std::optional<Arrow> best;
    auto consider = [&](const Arrow& a) {
        if (!best || a < *best) best = a;
    };

    for (const Arrow& a : p.ambient.arrows_between(um, vn))
        if (equalizes(a, lc, rc)) {
            v.left = true;
            if (p.ambient.arrow_is_isomorphism(a)) {
                v.strong = true;
                consider(a);
            } else if (!v.strong) {
                consider(a);
            }
        }
    for (const Arrow& a : p.ambient.arrows_between(vn, um))
        if (equalizes(a, rc, lc)) {
            v.right = true;
            if (p.ambient.arrow_is_isomorphism(a)) {
                v.strong = true;
                consider(a);
            } else if (!v.strong) {
                consider(a);
            }
        }
    // A strong witness wins over a one-sided one; re-scan for the least
    // isomorphism when strong.
    if (v.strong) {
        best.reset();
        for (const Arrow& a : p.ambient.arrows_between(um, vn))
            if (equalizes(a, lc, rc) && p.ambient.arrow_is_isomorphism(a)) consider(a);
        for (const Arrow& a : p.ambient.arrows_between(vn, um))
            if (equalizes(a, rc, lc) && p.ambient.arrow_is_isomorphism(a)) consider(a);
    }
    v.witness = best;
    return v;
}

namespace {

// Restrict a chain to chosen subnodes; each link must map its subnode into the
// next one.
bool restrict_chain(const std::vector<ChainLink>& chain, const std::vector<Mask>& nodes,
                    std::vector<ChainLink>& out) {
    out.clear();
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if ((map_image(chain[i].map, nodes[i]) & ~nodes[i + 1]) != 0) return false;
        out.push_back({nodes[i], nodes[i + 1], restrict_map(chain[i].map, nodes[i])});
    }
    return true;
}

}  // namespace

NcdLocalResult ncd_local(const NcdProblem& p, NcdFlavor flavor, std::optional<std::size_t> at) {
    validate_ncd(p);
    NcdLocalResult res;
    Mask u0 = initial_node(p);
    const FinSpace& s = p.ambient.space();
    if (at && !test_bit(u0, *at)) throw PreconditionError("ncd_local: point outside the initial node");

    std::vector<std::size_t> pts;
    if (at) {
        pts.push_back(*at);
    } else {
        for (std::size_t i = 0; i < s.size(); ++i)
            if (test_bit(u0, i)) pts.push_back(i);
    }
    res.ok = true;  // vacuous when the initial node is empty

    const auto& objs = p.ambient.objects();
    for (std::size_t pt : pts) {
        NcdLocalPointResult pr;
        pr.point = pt;

        std::size_t lm = p.left.size(), rn = p.right.size();
        std::vector<Mask> lnodes(lm + 1), rnodes(rn + 1);

        // Depth-first over subobject choices; position 0 is shared.
        std::function<bool(std::size_t)> choose_right = [&](std::size_t k) -> bool {
            if (k == rn + 1) {
                std::vector<ChainLink> rl, ll;
                if (!restrict_chain(p.right, rnodes, rl)) return false;
                if (!restrict_chain(p.left, lnodes, ll)) return false;
                NcdProblem sub{ll, rl, p.ambient};
                if (!p.ambient.is_object(lnodes.back()) || !p.ambient.is_object(rnodes.back())) return false;
                NcdVerdict v = complete_ncd(sub);
                bool ok = flavor == NcdFlavor::Left ? v.left : flavor == NcdFlavor::Right ? v.right : v.strong;
                if (!ok) return false;
                pr.left_nodes = lnodes;
                pr.right_nodes = rnodes;
                pr.witness = v.witness;
                return true;
            }
            Mask limit = p.right[k - 1].cod;
            for (Mask o : objs) {
                if (!subset(o, limit)) continue;
                if ((map_image(p.right[k - 1].map, rnodes[k - 1]) & ~o) != 0) continue;
                rnodes[k] = o;
                if (choose_right(k + 1)) return true;
            }
            return false;
        };
        std::function<bool(std::size_t)> choose_left = [&](std::size_t k) -> bool {
            if (k == lm + 1) {
                rnodes[0] = lnodes[0];
                if (rn == 0) return choose_right(rn + 1);
                return choose_right(1);
            }
            if (k == 0) {
                for (Mask o : objs) {
                    if (!subset(o, u0) || !test_bit(o, pt)) continue;
                    lnodes[0] = o;
                    if (choose_left(1)) return true;
                }
                return false;
            }
            Mask limit = p.left[k - 1].cod;
            for (Mask o : objs) {
                if (!subset(o, limit)) continue;
                if ((map_image(p.left[k - 1].map, lnodes[k - 1]) & ~o) != 0) continue;
                lnodes[k] = o;
                if (choose_left(k + 1)) return true;
            }
            return false;
        };

        pr.ok = choose_left(0);
        if (!pr.ok) res.ok = false;
        res.points.push_back(std::move(pr));
    }
    return res;
}

}  // namespace af
