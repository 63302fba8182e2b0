#pragma once

#include <optional>
#include <vector>

#include "atlasforge/modelspace.hpp"

namespace af {

// One link of a two-branch map tree. Nodes are subsets of the ambient carrier;
// maps are partial point maps over it.
struct ChainLink {
    Mask dom = 0;
    Mask cod = 0;
    PointMap map;
};

// A two-branch tree U_0 -> ... -> U_m, V_0 = U_0 -> ... -> V_n over an ambient
// model space whose category supplies the bridging morphisms. The terminal
// nodes must be objects of the ambient.
struct NcdProblem {
    std::vector<ChainLink> left;
    std::vector<ChainLink> right;
    ModelSpace ambient;
};

void validate_ncd(const NcdProblem& p);

struct NcdVerdict {
    bool left = false;
    bool right = false;
    bool strong = false;
    std::optional<Arrow> witness;  // lexicographically least success
};

NcdVerdict complete_ncd(const NcdProblem& p);

enum class NcdFlavor { Left, Right, Strong };

struct NcdLocalPointResult {
    std::size_t point = 0;
    bool ok = false;
    std::vector<Mask> left_nodes;   // chosen subobjects, initial to terminal
    std::vector<Mask> right_nodes;
    std::optional<Arrow> witness;
};

struct NcdLocalResult {
    bool ok = false;  // true at every requested point (vacuously for empty U0)
    std::vector<NcdLocalPointResult> points;
};

NcdLocalResult ncd_local(const NcdProblem& p, NcdFlavor flavor,
                         std::optional<std::size_t> at = std::nullopt);

}  // namespace af
