#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "atlasforge/bundles.hpp"
#include "atlasforge/cknum.hpp"
#include "atlasforge/diagrams.hpp"

namespace af {

using Json = nlohmann::json;

// A fully resolved fixture document: every referenced structure constructed,
// subbasis closures applied, groups and actions law-checked at load.
struct FixtureDocument {
    int version = 1;
    std::map<std::string, FinSpace> spaces;
    std::map<std::string, ModelSpace> model_spaces;
    std::map<std::string, FiniteGroup> groups;
    std::map<std::string, GroupAction> actions;
    std::map<std::string, AtlasTriple> atlases;
    std::map<std::string, AtlasMorphism> morphisms;
    std::map<std::string, BundleAtlas> bundles;
    std::map<std::string, CkGluingData> ck_data;
    Json checks = Json::array();

    const FinSpace& space(const std::string& name) const;
    const ModelSpace& model_space(const std::string& name) const;
    const AtlasTriple& atlas(const std::string& name) const;
    const BundleAtlas& bundle(const std::string& name) const;
    const CkGluingData& ck(const std::string& name) const;
};

FixtureDocument parse_document(const std::string& text);
FixtureDocument parse_document_file(const std::string& path);

struct RunOptions {
    Budget budget;
    double tol = -1;  // overrides the ck tolerance when >= 0
    ExecMode exec = ExecMode::Parallel;
};

// Runs every requested check in order; deterministic structured report.
Json run_checks(const FixtureDocument& doc, const RunOptions& opts = {});

enum class ReportFormat { Text, Structured };

std::string emit_report(const Json& report, ReportFormat format);
int report_exit_code(const Json& report);  // 0 all pass, 1 otherwise

// Shared serialization helpers (stable across runs).
Json mask_to_json(const FinSpace& s, Mask m);
Json map_to_json(const FinSpace& dom, const FinSpace& cod, const PointMap& m, Mask domain);

}  // namespace af
