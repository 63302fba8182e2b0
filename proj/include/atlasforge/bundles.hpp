#pragma once

#include <optional>
#include <string>
#include <vector>

#include "atlasforge/cats.hpp"

namespace af {

struct FiniteGroup {
    std::vector<std::string> elements;             // element 0 is the identity
    std::vector<std::vector<std::uint8_t>> table;  // table[g][h] = g*h
    std::vector<std::uint8_t> inverses;

    std::size_t size() const { return elements.size(); }
    std::uint8_t mul(std::uint8_t g, std::uint8_t h) const { return table[g][h]; }
    int element_index(const std::string& name) const;
};

void check_group_axioms(const FiniteGroup& g);  // throws MalformedInput

// A right action of the group on the fiber: act[y][g].
struct GroupAction {
    FiniteGroup group;
    FinSpace fiber;
    std::vector<std::vector<std::uint8_t>> act;

    std::uint8_t star(std::uint8_t y, std::uint8_t g) const { return act[y][g]; }
};

// Validates the action laws, per-element homeomorphisms and effectiveness.
void check_group_action(const GroupAction& a);

struct Protobundle {
    FinSpace total;   // E
    FinSpace base;    // X
    FinSpace fiber;   // Y
    PointMap proj;    // E -> X, continuous surjection
    GroupAction action;
    FinSpace product;  // cached product(base, fiber)

    // product point index for (x, y)
    std::uint8_t pair_index(std::uint8_t x, std::uint8_t y) const;
    std::uint8_t pair_base(std::uint8_t p) const;
    std::uint8_t pair_fiber(std::uint8_t p) const;
};

Protobundle make_protobundle(FinSpace total, FinSpace base, FinSpace fiber, PointMap proj, GroupAction action);

// The trivial G-rho model space of (X, Y): objects V x Y for V open, arrows
// (x,y) -> (x, y*g(x)) for locally constant g between nested objects.
ModelSpace trivial_grho_space(const FinSpace& base, const FinSpace& fiber, const GroupAction& action);

struct GrhoMorphismReport {
    bool is_grho_morphism = false;
    std::vector<std::uint8_t> f_g;  // group map, when it exists
    PointMap f_x;                   // derived base map
    std::string witness;            // violating (x, y, g) otherwise
};

struct GrhoSpec {
    FinSpace base;
    FinSpace fiber;
    GroupAction action;
};

// f_c maps product(src) points to product(dst) points.
GrhoMorphismReport grho_morphism_report(const GrhoSpec& src, const GrhoSpec& dst, const PointMap& f_c);

// A Y-pi-bundle chart: patch in E, codomain V x Y in the product.
struct BundleChart {
    Mask patch = 0;      // open subset of E
    Mask base_open = 0;  // V, open in X
    PointMap coord;      // E index -> product(X,Y) index

    friend bool operator==(const BundleChart& a, const BundleChart& b) {
        return a.patch == b.patch && a.base_open == b.base_open && maps_equal_on(a.coord, b.coord, a.patch);
    }
    friend bool operator<(const BundleChart& a, const BundleChart& b);
};

struct BundleAtlas {
    Protobundle bundle;
    std::vector<BundleChart> charts;  // kept sorted
    void canonicalize();
};

struct BundleChartCheck {
    bool valid = false;
    std::vector<std::string> failures;
};

BundleChartCheck bundle_chart_check(const BundleChart& c, const Protobundle& b);

struct GrhoCompatibility {
    bool compatible = false;
    // g on the base image of the shared patch, when defined
    std::vector<std::pair<std::uint8_t, std::uint8_t>> g_function;  // (base point, group element)
    std::string witness;
};

GrhoCompatibility grho_compatible(const BundleChart& c1, const BundleChart& c2, const Protobundle& b);

struct BundleAtlasReport {
    bool is_atlas = false;
    bool is_full = false;
    bool is_semi_maximal = false;
    bool is_maximal = false;
    std::vector<std::string> failures;
};

BundleAtlasReport bundle_atlas_report(const BundleAtlas& a, const Budget& budget = {},
                                      ExecMode mode = ExecMode::Serial);

std::vector<BundleChart> enumerate_bundle_charts(const Protobundle& b, const Budget& budget, ExecMode mode);

BundleAtlas bundle_maximal_closure(const BundleAtlas& a, const Budget& budget = {},
                                   ExecMode mode = ExecMode::Parallel);

// The unique projection determined by an m-atlas of E_triv in a G-rho model
// space (charts given in bundle form).
PointMap derive_projection(const std::vector<BundleChart>& charts, const FinSpace& total, const FinSpace& base,
                           const FinSpace& product);

// Bundle-atlas (near) morphisms: the 4-tuple (f_E, f_X, f_Y, f_G).
struct BundleMorphism {
    PointMap f_e;
    PointMap f_x;
    PointMap f_y;
    std::vector<std::uint8_t> f_g;
};

enum class BundleMorphismKind { Near, Morphism };

struct BundleMorphismVerdict {
    bool holds = false;
    bool items123 = false;     // continuity, homomorphism, commutation
    bool item4 = false;        // the chart diagram condition
    bool item4_direct = false; // recomputed without the Lemma 26.5 reduction
    std::string failure;
};

BundleMorphismVerdict classify_bundle_morphism(const BundleMorphism& f, const BundleAtlas& src,
                                               const BundleAtlas& dst, BundleMorphismKind kind);

bool bundle_equivalent(const BundleMorphism& f, const BundleMorphism& g);

// The m-atlas triple a bundle atlas becomes under F_Bun,M.
AtlasTriple bundle_to_matlas(const BundleAtlas& a);

// All bundle maps between maximal bundle atlases, as a small category.
struct BundleCategory {
    SmallCat cat;
    std::vector<BundleAtlas> objs;
    std::vector<BundleMorphism> maps;
};

BundleCategory fiber_bundle_category(const std::vector<BundleAtlas>& bundles, const Budget& budget = {},
                                     ExecMode mode = ExecMode::Parallel);

// Enumerates the bundle maps between two bundle atlases; bijective_fe
// restricts the total-space component.
std::vector<BundleMorphism> enumerate_bundle_morphisms(const BundleAtlas& src, const BundleAtlas& dst,
                                                       BundleMorphismKind kind, bool bijective_fe,
                                                       const Budget& budget, ExecMode mode);

// F_Bun,M on a bundle category and F_M-G-rho,Bun back; the round trip is the
// identity (Thm 26.16 tail).
struct BundleFunctorPair {
    AtlasCategory matlas_cat;
    FunctorData to_m;    // bundle category -> m-atlas category
    FunctorData from_m;  // m-atlas category -> bundle category
};

BundleFunctorPair bundle_functors(const BundleCategory& src, const Budget& budget = {},
                                  ExecMode mode = ExecMode::Parallel);

ModelSpace bundle_minimal_space(const BundleAtlas& a, MinWhich which, const Budget& budget = {});

}  // namespace af
