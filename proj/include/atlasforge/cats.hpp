#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atlasforge/morphisms.hpp"

namespace af {

// A finite category given by explicit tables. Arrows are labeled triples; the
// composition table is partial and defined exactly on cod/dom-matching pairs.
struct SmallCat {
    std::vector<std::string> objects;
    struct CArrow {
        std::string payload;
        std::size_t dom = 0, cod = 0;
    };
    std::vector<CArrow> arrows;
    // (index of second, index of first) -> composite arrow index
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> compose;
    std::vector<std::size_t> identities;  // per object

    int find_arrow(const std::string& payload, std::size_t dom, std::size_t cod) const;
};

struct CatLawReport {
    bool closure = false;
    bool associativity = false;
    bool identity = false;
    std::vector<std::string> counterexamples;
    bool passed() const { return closure && associativity && identity; }
};

CatLawReport check_category_laws(const SmallCat& c);

struct FunctorData {
    SmallCat src;
    SmallCat dst;
    // -1 marks an image that left the target category (reported by the law
    // check as an endpoint failure)
    std::vector<int> on_objects;
    std::vector<int> on_arrows;
};

struct FunctorLawReport {
    bool endpoints = false;
    bool identity = false;
    bool composition = false;
    std::vector<std::string> counterexamples;
    bool passed() const { return endpoints && identity && composition; }
};

FunctorLawReport check_functor_laws(const FunctorData& f);

// ---------------------------------------------------------------------------
// Categories of atlases

enum class ArrowMode { Morphism, Classic };

struct CatRestriction {
    enum class Objects { Plain, Full, SemiMax, Max } objects = Objects::Plain;
    enum class Arrows { Plain, SemiStrict, Strict } arrows = Arrows::Plain;
};

// The category plus the typed side tables its ids refer to.
struct AtlasCategory {
    SmallCat cat;
    ArrowMode mode = ArrowMode::Morphism;
    CatRestriction restriction;
    std::vector<AtlasTriple> objs;          // aligned with cat.objects
    std::vector<AtlasMorphism> morphisms;   // aligned with cat.arrows (Morphism mode)
    std::vector<PointMap> classic_arrows;   // aligned with cat.arrows (Classic mode)

    int object_index(const AtlasTriple& t) const;
};

AtlasCategory build_atlas_category(const std::vector<AtlasTriple>& objects, ArrowMode mode,
                                   CatRestriction restriction = {}, const Budget& budget = {},
                                   ExecMode exec = ExecMode::Parallel);

// ---------------------------------------------------------------------------
// Functors

struct AtlasFunctor {
    FunctorData data;
    AtlasCategory source;
    AtlasCategory target;
};

// (A, E, C) -> (A, Top(E), C): defined when every coordinate model space is
// fine grained. With enforce=false the mapping is built anyway so the law
// check can surface the endpoint failure.
AtlasFunctor functor_M_Top(const AtlasCategory& src, bool enforce_fine_grained = true,
                           const Budget& budget = {}, ExecMode exec = ExecMode::Parallel);

// (A, E, C) -> (A, E_triv, C) on topological-total atlases.
AtlasFunctor functor_Top_M(const AtlasCategory& src, const Budget& budget = {},
                           ExecMode exec = ExecMode::Parallel);

// F_M,Classic: identity on objects, (f0, f1) -> (f0).
AtlasFunctor functor_M_Classic(const AtlasCategory& src, const Budget& budget = {},
                               ExecMode exec = ExecMode::Parallel);

enum class MinWhich { F1, F2 };

ModelSpace minimal_space_functor_object(const AtlasTriple& a, MinWhich which, const Budget& budget = {});

// The induced map between the associated minimal model spaces; verified to be
// a model function. The Lemma 12.2 hypothesis (morphism, or both atlases
// semi-maximal) guards the F2 action.
PointMap minimal_space_functor_arrow(const AtlasMorphism& m, MinWhich which, const Budget& budget = {});

// Model-space-valued functor assembled over a whole atlas category.
struct MinimalSpacesFunctor {
    std::vector<ModelSpace> object_images;  // aligned with src objects
    std::vector<PointMap> arrow_images;     // aligned with src arrows
    FunctorData data;                       // combinatorial shadow for the law check
};

MinimalSpacesFunctor minimal_space_functors(const AtlasCategory& src, MinWhich which,
                                            const Budget& budget = {});

}  // namespace af
