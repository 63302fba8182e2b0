// Benchmark comparing the serial reference implementations of the enumeration
// kernels with their OpenMP counterparts; both paths must return identical
// results.

#include <chrono>
#include <iostream>

#include "atlasforge/bundles.hpp"
#include "atlasforge/cats.hpp"
#include "tests/fixture_atlases.hpp"
#include "tests/fixture_bundles.hpp"
#include "tests/fixture_ck.hpp"

using namespace af;
using Clock = std::chrono::steady_clock;

namespace {

template <typename Fn>
double time_of(Fn&& fn, int reps) {
    auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    auto t1 = Clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void row(const std::string& name, double serial, double parallel, bool equal) {
    std::printf("%-34s %10.4fs %10.4fs %8.2fx   %s\n", name.c_str(), serial, parallel,
                parallel > 0 ? serial / parallel : 0.0, equal ? "equal" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    int reps = argc > 1 ? std::atoi(argv[1]) : 3;
    std::printf("%-34s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

    {
        AtlasTriple a = make_pc4_atlas();
        AtlasTriple s_out, p_out;
        double ts = time_of([&] { s_out = maximal_closure(a, Budget{}, ExecMode::Serial); }, reps);
        double tp = time_of([&] { p_out = maximal_closure(a, Budget{}, ExecMode::Parallel); }, reps);
        row("atlas maximal closure", ts, tp, s_out == p_out);
    }
    {
        BundleAtlas triv = make_triv_bundle();
        BundleAtlas s_out, p_out;
        double ts = time_of([&] { s_out = bundle_maximal_closure(triv, Budget{}, ExecMode::Serial); }, reps);
        double tp = time_of([&] { p_out = bundle_maximal_closure(triv, Budget{}, ExecMode::Parallel); }, reps);
        row("bundle maximal closure", ts, tp, s_out.charts == p_out.charts);
    }
    {
        AtlasTriple c = maximal_closure(make_pc4_atlas(), Budget{}, ExecMode::Serial);
        std::vector<AtlasTriple> objs = {c};
        AtlasCategory s_cat, p_cat;
        double ts = time_of(
            [&] { s_cat = build_atlas_category(objs, ArrowMode::Morphism, {}, Budget{}, ExecMode::Serial); },
            reps);
        double tp = time_of(
            [&] { p_cat = build_atlas_category(objs, ArrowMode::Morphism, {}, Budget{}, ExecMode::Parallel); },
            reps);
        row("atlas morphism enumeration", ts, tp,
            s_cat.cat.arrows.size() == p_cat.cat.arrows.size() && s_cat.cat.compose == p_cat.cat.compose);
    }
    {
        BundleAtlas ct = bundle_maximal_closure(make_triv_bundle(), Budget{}, ExecMode::Serial);
        BundleAtlas cm = bundle_maximal_closure(make_mobius_bundle(), Budget{}, ExecMode::Serial);
        std::vector<BundleMorphism> s_out, p_out;
        double ts = time_of(
            [&] {
                s_out = enumerate_bundle_morphisms(cm, ct, BundleMorphismKind::Morphism, false, Budget{},
                                                   ExecMode::Serial);
            },
            reps);
        double tp = time_of(
            [&] {
                p_out = enumerate_bundle_morphisms(cm, ct, BundleMorphismKind::Morphism, false, Budget{},
                                                   ExecMode::Parallel);
            },
            reps);
        row("bundle morphism enumeration", ts, tp, s_out.size() == p_out.size());
    }
    {
        CkGluingData g = make_circle2();
        for (auto& c : g.charts) c.resolution = 2000;  // stress the sample scan
        TransitionReport s_rep, p_rep;
        double ts = time_of([&] { s_rep = transition_diffeo_check(g, 0, kCInf, ExecMode::Serial); }, reps);
        double tp = time_of([&] { p_rep = transition_diffeo_check(g, 0, kCInf, ExecMode::Parallel); }, reps);
        row("ck transition sample scan", ts, tp,
            s_rep.min_jacobian_gram_det == p_rep.min_jacobian_gram_det &&
                s_rep.max_inverse_residual == p_rep.max_inverse_residual);
    }
    return 0;
}
