#pragma once

#include <optional>
#include <string>
#include <vector>

#include "atlasforge/common.hpp"
#include "atlasforge/fintop.hpp"

namespace af {

// A designated morphism between two designated opens of the carrier. The same
// underlying map with different dom/cod labels is a different arrow.
struct Arrow {
    Mask dom = 0;
    Mask cod = 0;
    PointMap map;  // over the carrier, kNoPoint outside dom

    friend bool operator==(const Arrow& a, const Arrow& b) {
        return a.dom == b.dom && a.cod == b.cod && maps_equal_on(a.map, b.map, a.dom);
    }
    friend bool operator<(const Arrow& a, const Arrow& b);
};

// A finite topological space together with a small category of designated
// opens (model neighborhoods) and designated continuous maps between them.
class ModelSpace {
public:
    enum class Kind {
        Explicit,    // arrow set materialized
        TrivialAll,  // objects are all opens, arrows all continuous maps
    };

    ModelSpace() = default;
    ModelSpace(FinSpace space, std::vector<Mask> objects, std::vector<Arrow> arrows);
    static ModelSpace trivial_all(FinSpace space);

    const FinSpace& space() const { return space_; }
    Kind kind() const { return kind_; }
    const std::vector<Mask>& objects() const { return objects_; }

    bool is_object(Mask m) const;
    bool has_arrow(Mask dom, Mask cod, const PointMap& map) const;
    bool has_arrow(const Arrow& a) const { return has_arrow(a.dom, a.cod, a.map); }
    std::vector<Arrow> arrows_between(Mask dom, Mask cod, std::size_t cap = 1u << 22) const;
    // Materialized arrow list; throws BudgetExceeded for large trivial spaces.
    std::vector<Arrow> all_arrows(std::size_t cap = 1u << 20) const;
    bool arrow_is_isomorphism(const Arrow& a) const;
    std::vector<Arrow> isomorphisms_between(Mask dom, Mask cod) const;

    bool operator==(const ModelSpace& other) const;
    bool operator!=(const ModelSpace& other) const { return !(*this == other); }

private:
    FinSpace space_;
    std::vector<Mask> objects_;  // sorted
    std::vector<Arrow> arrows_;  // sorted; empty for TrivialAll
    Kind kind_ = Kind::Explicit;
};

struct AxiomReport {
    bool cover = false;                 // item 1: objects form an open cover
    bool intersections = false;         // item 2: closed under pairwise intersection
    bool arrows_continuous = false;     // item 3
    bool restriction_closed = false;    // item 4
    bool inclusions_present = false;    // item 5
    bool sheaf = false;                 // item 6: restricted sheaf condition
    bool category_ok = false;           // identities present, composition closed
    std::vector<std::string> counterexamples;

    bool passed() const {
        return cover && intersections && arrows_continuous && restriction_closed && inclusions_present &&
               sheaf && category_ok;
    }
};

AxiomReport check_axioms(const ModelSpace& m, const Budget& budget = {});

ModelSpace trivial(const FinSpace& space);
ModelSpace minimal_closure(const FinSpace& space, const std::vector<Mask>& seed_objects,
                           const std::vector<Arrow>& seed_arrows, const Budget& budget = {});
ModelSpace relative(const ModelSpace& m, Mask t);

enum class SubspaceRelation { None, Mod, FullMod, StrictMod };

struct SubspaceVerdict {
    SubspaceRelation relation = SubspaceRelation::None;
    bool mod = false;
    bool full_mod = false;
    bool strict_mod = false;
    std::vector<std::string> failures;
};

SubspaceVerdict subspace_relation(const ModelSpace& a, const ModelSpace& b);

struct ModelFunctionReport {
    bool is_model_function = false;
    bool is_constrained = false;
    bool is_homeomorphism = false;
    std::vector<std::string> witness_failures;
};

// f is a total map carrier(a) -> carrier(b); must be continuous.
ModelFunctionReport model_function_report(const ModelSpace& a, const ModelSpace& b, const PointMap& f);

// A small category whose objects are model spaces and whose arrows are model
// functions between them, used for the category-qualified m-morphism forms.
struct ModelSpaceCategory {
    std::vector<ModelSpace> objects;
    struct CatArrow {
        PointMap map;
        std::size_t dom = 0, cod = 0;
    };
    std::vector<CatArrow> arrows;

    int object_index(const ModelSpace& m) const;
    bool has_arrow(const ModelSpace& dom, const ModelSpace& cod, const PointMap& map, Mask dom_mask) const;
};

bool is_full_subcategory(const ModelSpaceCategory& a, const ModelSpaceCategory& b);

enum class MorphismMode { Local, Global };
enum class Strictness { Plain, Strict };

struct AmbientCategories {
    const ModelSpaceCategory* cat_a = nullptr;
    const ModelSpaceCategory* cat_b = nullptr;
};

struct MMorphismVerdict {
    bool holds = false;
    std::string variant;  // which sub-definition was evaluated
    // per-point witnesses in local mode: (point, U_u, V_u)
    struct PointWitness {
        std::size_t point = 0;
        Mask nbhd_dom = 0, nbhd_cod = 0;
    };
    std::vector<PointWitness> witnesses;
    std::string failure;
};

// f maps carrier(a) into carrier(b). Optional open sets restrict the domain
// and codomain per the open-set forms of the definitions; by default the full
// carriers are used.
MMorphismVerdict classify_m_morphism(const ModelSpace& a, const ModelSpace& b, const PointMap& f,
                                     MorphismMode mode, Strictness strictness,
                                     const AmbientCategories& ambient = {},
                                     std::optional<Mask> dom_open = std::nullopt,
                                     std::optional<Mask> cod_open = std::nullopt);

struct ParacompactnessReport {
    FinSpace model_topology;
    bool regular = false;
    bool refinement_ok = false;
    bool m_paracompact = false;
};

ParacompactnessReport m_paracompactness_report(const ModelSpace& m, const Budget& budget = {});

bool is_fine_grained(const ModelSpace& m);

}  // namespace af
