#pragma once

#include <optional>
#include <string>
#include <vector>

#include "atlasforge/modelspace.hpp"

namespace af {

// An m-chart: a model homeomorphism from a nonvoid model neighborhood of the
// total space onto a model neighborhood of the coordinate space.
struct Chart {
    Mask patch = 0;     // object of the total model space
    Mask codomain = 0;  // object of the coordinate model space
    PointMap coord;     // total-carrier index -> coordinate-carrier index

    friend bool operator==(const Chart& a, const Chart& b) {
        return a.patch == b.patch && a.codomain == b.codomain && maps_equal_on(a.coord, b.coord, a.patch);
    }
    friend bool operator<(const Chart& a, const Chart& b);
};

// Which notion of coordinate function the charts use: model homeomorphisms
// between the relative model spaces, or plain homeomorphisms between the
// relative topologies (the bundle-chart style).
enum class ChartFlavor { ModelHomeo, PlainHomeo };

// A labeled atlas triple (A, E, C). The total space may stand for a plain
// topological space; the flag records which of the paper's two parallel
// tracks the triple lives on.
struct AtlasTriple {
    std::vector<Chart> charts;  // kept sorted
    ModelSpace total;
    ModelSpace coord;
    bool total_is_topological = false;
    ChartFlavor flavor = ChartFlavor::ModelHomeo;

    void canonicalize();
    friend bool operator==(const AtlasTriple& a, const AtlasTriple& b);
};

struct ChartCheck {
    bool valid = false;
    std::vector<std::string> failures;
};

ChartCheck chart_check(const Chart& c, const ModelSpace& total, const ModelSpace& coord,
                       ChartFlavor flavor = ChartFlavor::ModelHomeo);

Chart subchart(const Chart& c, Mask u_prime, const ModelSpace& total, const ModelSpace& coord);

struct Transition {
    Mask dom = 0;  // subset of the first chart's codomain
    Mask cod = 0;
    PointMap map;  // over the coordinate carrier
};

// none when the patches are disjoint
std::optional<Transition> transition(const Chart& c1, const Chart& c2, const ModelSpace& total,
                                     const ModelSpace& coord);

bool are_compatible(const Chart& c1, const Chart& c2, const ModelSpace& total, const ModelSpace& coord);
bool chart_vs_atlas(const Chart& c, const AtlasTriple& a);

struct AtlasReport {
    bool is_atlas = false;
    bool is_full = false;
    bool is_semi_maximal = false;
    bool is_maximal = false;
    std::vector<std::string> failures;
};

AtlasReport atlas_report(const AtlasTriple& a, const Budget& budget = {}, ExecMode mode = ExecMode::Serial);

// Chart validity, mutual compatibility and cover only.
bool is_m_atlas(const AtlasTriple& a);

// Every candidate chart of the pair (total, coord): nonvoid model neighborhood
// patches, model neighborhood codomains, model homeomorphisms between their
// relative model spaces. The serial and parallel paths return identical
// vectors; the parallel one is the OpenMP kernel.
std::vector<Chart> enumerate_candidate_charts(const ModelSpace& total, const ModelSpace& coord,
                                              const Budget& budget, ExecMode mode,
                                              ChartFlavor flavor = ChartFlavor::ModelHomeo);

AtlasTriple maximal_closure(const AtlasTriple& a, const Budget& budget = {},
                            ExecMode mode = ExecMode::Parallel);

}  // namespace af
