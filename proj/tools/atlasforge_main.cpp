#include <CLI11.hpp>
#include <iostream>

#include "atlasforge/cats.hpp"
#include "atlasforge/doc.hpp"

using namespace af;

namespace {

// exit classes: 0 all pass, 1 some check failed, 2 input/usage error
constexpr int kExitUsage = 2;

RunOptions make_options(std::size_t budget, double tol, bool serial) {
    RunOptions o;
    if (budget > 0) {
        o.budget.max_candidates = budget;
        o.budget.max_maps_per_pair = budget;
        o.budget.max_cover_families = budget;
    }
    o.tol = tol;
    o.exec = serial ? ExecMode::Serial : ExecMode::Parallel;
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"atlas-forge: enumeration-backed checks for model spaces, atlases and bundles"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string file;
    std::size_t budget = 0;
    double tol = -1;
    bool serial = false;
    int seed = 0;  // all checks are deterministic; accepted for interface stability
    app.add_option("--budget", budget, "enumeration cap (candidates, maps, covers)");
    app.add_option("--tol", tol, "numeric tolerance override for the sampled checks");
    app.add_option("--seed", seed, "unused; checks are deterministic");
    app.add_flag("--serial", serial, "disable the parallel kernels");

    auto* validate = app.add_subcommand("validate", "parse and resolve a fixture document");
    validate->add_option("file", file, "fixture document")->required();

    std::string format = "text";
    auto* report = app.add_subcommand("report", "run the document's checks and print a report");
    report->add_option("file", file, "fixture document")->required();
    report->add_option("--format", format, "text or structured")->check(CLI::IsMember({"text", "structured"}));

    std::string target = "atlas";
    std::string name;
    auto* close = app.add_subcommand("close", "compute a maximal closure");
    close->add_option("file", file, "fixture document")->required();
    close->add_option("--target", target, "atlas or bundle-atlas")
        ->check(CLI::IsMember({"atlas", "bundle-atlas"}));
    close->add_option("--name", name, "which atlas/bundle to close (default: the only one)");

    CLI11_PARSE(app, argc, argv);

    try {
        FixtureDocument doc = parse_document_file(file);
        RunOptions opts = make_options(budget, tol, serial);

        if (validate->parsed()) {
            std::cout << "ok: " << doc.spaces.size() << " spaces, " << doc.model_spaces.size()
                      << " model spaces, " << doc.atlases.size() << " atlases, " << doc.bundles.size()
                      << " bundles, " << doc.ck_data.size() << " ck datasets, " << doc.checks.size()
                      << " checks\n";
            return 0;
        }
        if (report->parsed()) {
            Json rep = run_checks(doc, opts);
            std::cout << emit_report(rep, format == "structured" ? ReportFormat::Structured
                                                                 : ReportFormat::Text);
            return report_exit_code(rep);
        }
        if (close->parsed()) {
            Json out;
            if (target == "atlas") {
                if (name.empty() && doc.atlases.size() == 1) name = doc.atlases.begin()->first;
                AtlasTriple closed = maximal_closure(doc.atlas(name), opts.budget, opts.exec);
                out["atlas"] = name;
                out["chart_count"] = closed.charts.size();
                Json arr = Json::array();
                for (const Chart& c : closed.charts)
                    arr.push_back(Json{{"patch", mask_to_json(closed.total.space(), c.patch)},
                                       {"codomain", mask_to_json(closed.coord.space(), c.codomain)},
                                       {"map", map_to_json(closed.total.space(), closed.coord.space(),
                                                           c.coord, c.patch)}});
                out["charts"] = arr;
            } else {
                if (name.empty() && doc.bundles.size() == 1) name = doc.bundles.begin()->first;
                BundleAtlas closed = bundle_maximal_closure(doc.bundle(name), opts.budget, opts.exec);
                out["bundle"] = name;
                out["chart_count"] = closed.charts.size();
                out["total_components"] = connected_components(closed.bundle.total).size();
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }
    } catch (const MalformedInput& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const BudgetExceeded& e) {
        std::cerr << "search budget exhausted: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
