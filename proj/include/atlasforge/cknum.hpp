#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "atlasforge/expr.hpp"

namespace af {

// Smoothness order: 0, 1, 2, ... finite; kCInf for C-infinity; kCOmega for
// analytic.
inline constexpr int kCInf = -1;
inline constexpr int kCOmega = -2;

struct Interval {
    double lo = 0, hi = 0;
};
using Box = std::vector<Interval>;  // one interval per axis

struct CkChartDesc {
    std::string id;
    std::size_t dimension = 1;
    std::vector<Box> codomain;      // nonempty, positive-volume boxes
    std::size_t resolution = 17;    // samples per axis, endpoints included
};

using VectorFn = std::function<std::vector<double>(const std::vector<double>&)>;

struct CkTransition {
    std::string from, to;
    std::vector<Box> overlap;     // subset of the from-chart codomain
    std::vector<Expr> exprs;      // polynomial/rational mode when nonempty
    VectorFn blackbox;            // black-box mode otherwise
    int declared_k = kCInf;

    bool polynomial() const { return !exprs.empty(); }
    std::vector<double> eval(const std::vector<double>& x) const;
};

struct CkTolerances {
    double inverse_tol = 1e-8;    // |t_inv(t(x)) - x|
    double commute_tol = 1e-8;    // diagram commutation in morphism checks
    double fd_step = 1e-5;        // central-difference step
    double det_tol = 1e-12;       // |det J| considered singular below this
    double cross_rel_tol = 1e-6;  // symbolic vs finite-difference agreement
    double kink_floor = 1e-3;     // magnitude below which scale tests are noise
    double kink_ratio = 1.8;      // divided differences growing this fast flag a kink
};

struct CkGluingData {
    std::vector<CkChartDesc> charts;
    std::vector<CkTransition> transitions;  // both directions where overlaps exist
    std::size_t dimension = 1;
    std::vector<Box> coordinate_region;  // the declared ambient region, for fullness
    CkTolerances tol;

    int chart_index(const std::string& id) const;
    int transition_index(const std::string& from, const std::string& to) const;
};

std::vector<std::vector<double>> sample_grid(const std::vector<Box>& boxes, std::size_t resolution);

// Scale test on central divided differences: necessary conditions for the map
// to be C^k at the samples. Returns the first order (1-based difference
// order, i.e. derivative order) at which a kink is detected, or 0.
struct SmoothnessReport {
    bool ok = false;
    int failed_order = 0;  // derivative order whose existence is contradicted
    std::vector<double> failing_sample;
};

SmoothnessReport sampled_smoothness_check(const VectorFn& f, std::size_t dim_in, std::size_t dim_out,
                                          const std::vector<std::vector<double>>& samples, int k,
                                          const CkTolerances& tol);

struct TransitionReport {
    bool passes = false;
    bool exact_mode = false;  // polynomial/rational: smoothness is exact
    double max_inverse_residual = 0;
    double min_abs_jacobian_det = 0;
    double min_jacobian_gram_det = 0;  // det(J J^T); the nonsingularity metric
    double max_fd_disagreement = 0;    // symbolic vs FD, relative (exact mode)
    SmoothnessReport smoothness;       // sampled mode only
    std::vector<std::string> failures;
    std::string verdict;  // "C^k (exact on samples)" or "consistent with C^k at samples"
};

TransitionReport transition_diffeo_check(const CkGluingData& g, std::size_t transition_index, int k,
                                         ExecMode mode = ExecMode::Serial);

struct CkAtlasReport {
    bool is_atlas = false;
    bool is_full = false;
    bool non_degenerate = false;
    std::vector<std::string> failures;
};

CkAtlasReport ck_atlas_report(const CkGluingData& g, int k, ExecMode mode = ExecMode::Serial);

// A local representative of a map between gluing data: defined on a part of a
// source chart's codomain, landing in a target chart's codomain.
struct CkLocalRep {
    std::string src_chart, dst_chart;
    std::vector<Box> domain;
    std::vector<Expr> exprs;
    VectorFn blackbox;

    bool polynomial() const { return !exprs.empty(); }
    std::vector<double> eval(const std::vector<double>& x) const;
};

struct CkMorphismReport {
    bool is_morphism = false;
    bool is_classic = false;
    std::vector<std::string> failures;
};

CkMorphismReport ck_morphism_check(const CkGluingData& src, const CkGluingData& dst,
                                   const std::vector<CkLocalRep>& f_charts,
                                   const std::vector<Expr>& f1, int k, ExecMode mode = ExecMode::Serial);

struct ManifoldReport {
    bool is_manifold_data = false;
    bool is_full = false;
    std::string maximality;  // always "assumed": the maximal closure is cited, never computed
};

ManifoldReport manifold_check(const CkGluingData& g, int k, ExecMode mode = ExecMode::Serial);

}  // namespace af
