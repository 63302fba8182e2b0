#pragma once

#include <cmath>

#include "atlasforge/cknum.hpp"

// Two-chart circle gluing data: stereographic-style coordinates with the
// transition 1/x both ways on the sampled overlap [0.5, 2].
inline af::CkGluingData make_circle2() {
    using namespace af;
    CkGluingData g;
    g.dimension = 1;
    CkChartDesc c1{"north", 1, {Box{{-2.0, 2.0}}}, 17};
    CkChartDesc c2{"south", 1, {Box{{-2.0, 2.0}}}, 17};
    g.charts = {c1, c2};

    CkTransition t12;
    t12.from = "north";
    t12.to = "south";
    t12.overlap = {Box{{0.5, 2.0}}};
    t12.exprs = {Expr::parse("1/x1", 1)};
    CkTransition t21 = t12;
    t21.from = "south";
    t21.to = "north";
    g.transitions = {t12, t21};
    g.coordinate_region = {Box{{-2.0, 2.0}}};
    return g;
}

// The same gluing data with black-box transitions, for the sampled mode.
inline af::CkGluingData make_circle2_blackbox() {
    af::CkGluingData g = make_circle2();
    for (auto& t : g.transitions) {
        t.exprs.clear();
        t.blackbox = [](const std::vector<double>& x) { return std::vector<double>{1.0 / x[0]}; };
    }
    return g;
}
