#pragma once

#include <optional>
#include <string>
#include <vector>

#include "atlasforge/atlas.hpp"

namespace af {

// A labeled pair of maps between atlas triples: f0 between the total carriers
// and f1 between the coordinate carriers.
struct AtlasMorphism {
    PointMap f0;
    PointMap f1;
    AtlasTriple source;
    AtlasTriple target;
};

void validate_atlas_morphism(const AtlasMorphism& m);  // carrier shapes only

// Optional ambient model categories for the category-qualified strictness
// forms. Both members of a pair must be present or absent together.
struct MorphismAmbient {
    const ModelSpaceCategory* e_cat_src = nullptr;
    const ModelSpaceCategory* e_cat_dst = nullptr;
    const ModelSpaceCategory* c_cat_src = nullptr;
    const ModelSpaceCategory* c_cat_dst = nullptr;
};

// Which parts of the taxonomy to evaluate; skipping the unneeded ones keeps
// exhaustive enumerations cheap.
struct ClassifyOptions {
    bool want_near = true;
    bool want_morphism = true;
    bool want_strictness = true;
};

struct MorphismClassification {
    bool model_functions = false;  // the pair invariant
    bool near = false;
    bool morphism = false;
    bool constrained = false;
    bool semi_strict = false;
    bool strict = false;
    std::string variant;

    struct NearWitness {
        std::size_t chart1 = 0, chart2 = 0, point = 0;
        Mask u1p = 0, u2p = 0, vhat = 0;
        Arrow bridge;
    };
    struct MorphismWitness {
        std::size_t chart1 = 0, chart2 = 0, point = 0;
        Chart sub1;    // subchart of chart1 inside the source atlas
        Chart target;  // chart of the target atlas at the image point
    };
    std::vector<NearWitness> near_witnesses;
    std::vector<MorphismWitness> morphism_witnesses;
    std::vector<std::string> failures;
};

MorphismClassification classify(const AtlasMorphism& m, const MorphismAmbient& ambient = {},
                                const ClassifyOptions& opts = {});

// Def 11.7: only the total-space component matters.
bool equivalent(const AtlasMorphism& m1, const AtlasMorphism& m2);

// Labeled tuple composition; refuses near-only composition without the
// Lemma 11.16 side conditions.
AtlasMorphism compose(const AtlasMorphism& m2, const AtlasMorphism& m1, const Budget& budget = {});

AtlasMorphism identity_morphism(const AtlasTriple& a);
AtlasMorphism identity_morphism(const AtlasTriple& a, const AtlasTriple& b);

struct ClassicClassification {
    bool classic = false;
    bool semi_strict = false;
    bool strict = false;
    bool constrained = false;
    std::string variant;
    std::vector<std::string> failures;
};

struct ClassicAmbient {
    const ModelSpaceCategory* c_cat_src = nullptr;
    const ModelSpaceCategory* c_cat_dst = nullptr;
};

ClassicClassification classify_classic(const PointMap& f, const AtlasTriple& source, const AtlasTriple& target,
                                       const ClassicAmbient& ambient = {});

}  // namespace af
