#pragma once

#include <string>
#include <vector>

#include "atlasforge/common.hpp"

namespace af {

// A finite topological space: named points plus the full family of open sets.
// The open family always contains the empty set and the whole carrier and is
// closed under pairwise union and intersection. Point names are kept sorted
// so equality of spaces is structural.
class FinSpace {
public:
    FinSpace() { opens_ = {0}; }
    // `opens` may be any subbasis; it is closed under union/intersection.
    FinSpace(std::vector<std::string> points, std::vector<Mask> opens);

    static FinSpace from_subbasis(std::vector<std::string> points, const std::vector<Mask>& subbasis) {
        return FinSpace(std::move(points), subbasis);
    }

    std::size_t size() const { return points_.size(); }
    Mask full_mask() const { return size() == 0 ? 0 : (size() == 64 ? ~Mask(0) : ((Mask(1) << size()) - 1)); }
    const std::vector<std::string>& points() const { return points_; }
    const std::vector<Mask>& opens() const { return opens_; }

    bool is_open(Mask m) const;
    int point_index(const std::string& name) const;  // -1 if absent
    const std::string& point_name(std::size_t i) const { return points_[i]; }

    // Smallest open set containing point i.
    Mask minimal_open(std::size_t i) const { return min_open_[i]; }
    // Specialization preorder: i <= j iff i lies in every open containing j.
    bool leq(std::size_t i, std::size_t j) const { return test_bit(min_open_[j], i); }

    Mask interior(Mask m) const;
    Mask closure_set(Mask m) const;

    bool operator==(const FinSpace& other) const {
        return points_ == other.points_ && opens_ == other.opens_;
    }
    bool operator!=(const FinSpace& other) const { return !(*this == other); }

private:
    std::vector<std::string> points_;
    std::vector<Mask> opens_;     // sorted, deduplicated
    std::vector<Mask> min_open_;  // per point
    void finish();
};

// A total map between the points of two finite spaces.
struct CMap {
    FinSpace dom;
    FinSpace cod;
    PointMap map;  // size == dom.size(), values index cod points

    std::uint8_t operator()(std::size_t i) const { return map[i]; }
    Mask image(Mask m) const;
    Mask preimage(Mask m) const;
};

CMap compose(const CMap& g, const CMap& f);
CMap identity_map(const FinSpace& s);
CMap inverse(const CMap& f);  // precondition: bijective

void validate_cmap(const CMap& f);  // malformed-input on non-total/out-of-range

bool is_continuous(const CMap& f);
bool is_continuous(const FinSpace& dom, const FinSpace& cod, const PointMap& map);
bool is_homeomorphism(const CMap& f);

FinSpace subspace(const FinSpace& s, Mask carrier);
// Point names in the product are "(p,q)"; opens are all unions of open rectangles.
FinSpace product(const FinSpace& s, const FinSpace& t);

std::vector<Mask> connected_components(const FinSpace& s);

// Partial maps between subspaces of a single carrier, used for arrows of model
// spaces, chart coordinates and transition functions.
Mask map_image(const PointMap& m, Mask domain);
Mask map_preimage(const PointMap& m, Mask domain, Mask target);
PointMap restrict_map(const PointMap& m, Mask domain);
PointMap compose_partial(const PointMap& g, const PointMap& f, Mask domain);
// precondition: injective on domain; out_size is the inverse's carrier size
PointMap invert_partial(const PointMap& m, Mask domain, std::size_t out_size);
PointMap identity_partial(std::size_t n, Mask domain);
bool maps_equal_on(const PointMap& a, const PointMap& b, Mask domain);

// Continuity of a partial map between subspaces of (possibly distinct) spaces.
bool is_continuous_between(const FinSpace& dom_space, Mask dom, const FinSpace& cod_space, Mask cod,
                           const PointMap& map);
// Open relative to `dom` as a map onto its image, i.e. images of relative opens
// are relative opens of `cod`.
bool is_open_map_between(const FinSpace& dom_space, Mask dom, const FinSpace& cod_space, Mask cod,
                         const PointMap& map);
bool is_homeomorphism_between(const FinSpace& dom_space, Mask dom, const FinSpace& cod_space, Mask cod,
                              const PointMap& map);

// All continuous partial maps dom -> cod between subspaces of the two spaces.
std::vector<PointMap> continuous_maps_between(const FinSpace& dom_space, Mask dom, const FinSpace& cod_space,
                                              Mask cod, std::size_t cap = 1u << 22);
std::vector<PointMap> homeomorphisms_between(const FinSpace& dom_space, Mask dom, const FinSpace& cod_space,
                                             Mask cod);

std::string mask_to_string(const FinSpace& s, Mask m);

}  // namespace af
