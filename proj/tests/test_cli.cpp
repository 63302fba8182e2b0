#include <doctest.h>

#include "atlasforge/doc.hpp"

using namespace af;

#ifndef FIXTURES_DIR
#define FIXTURES_DIR "fixtures"
#endif

TEST_CASE("shipped fixture documents parse and pass") {
    for (const char* name : {"spaces.json", "pc4_atlas.json", "bundles.json", "circle2.json"}) {
        FixtureDocument doc = parse_document_file(std::string(FIXTURES_DIR) + "/" + name);
        Json rep = run_checks(doc);
        CAPTURE(name);
        CAPTURE(rep.dump(2));
        CHECK(rep.at("overall").get<bool>());
        CHECK(report_exit_code(rep) == 0);
    }
}

TEST_CASE("determinism: identical documents produce byte-identical reports") {
    FixtureDocument doc = parse_document_file(std::string(FIXTURES_DIR) + "/pc4_atlas.json");
    std::string a = emit_report(run_checks(doc), ReportFormat::Structured);
    std::string b = emit_report(run_checks(doc), ReportFormat::Structured);
    CHECK(a == b);
    // and across execution modes
    RunOptions serial;
    serial.exec = ExecMode::Serial;
    std::string c = emit_report(run_checks(doc, serial), ReportFormat::Structured);
    CHECK(a == c);
}

TEST_CASE("dangling references and syntax errors are input errors") {
    CHECK_THROWS_AS(parse_document("{ not json"), MalformedInput);
    CHECK_THROWS_AS(parse_document(R"({"version": 7})"), MalformedInput);
    // reference to an undefined space "Q"
    const char* doc = R"({
      "version": 1,
      "model_spaces": {"M": {"kind": "trivial", "space": "Q"}}
    })";
    try {
        parse_document(doc);
        CHECK(false);
    } catch (const MalformedInput& e) {
        CHECK(std::string(e.what()).find("Q") != std::string::npos);
    }
}

TEST_CASE("a deliberately broken axiom fails with the item named") {
    const char* doc = R"({
      "version": 1,
      "spaces": {"PC4": {"points": ["a","b","c","d"],
                          "subbasis": [["a"],["b"],["a","b","c"],["a","b","d"]]}},
      "model_spaces": {
        "BROKEN": {"kind": "explicit", "space": "PC4",
          "objects": [[], ["a","b","c"], ["a","b","d"], ["a","b","c","d"]],
          "arrows": [
            {"dom": [], "cod": [], "map": {}},
            {"dom": ["a","b","c"], "cod": ["a","b","c"], "map": {"a":"a","b":"b","c":"c"}},
            {"dom": ["a","b","d"], "cod": ["a","b","d"], "map": {"a":"a","b":"b","d":"d"}},
            {"dom": ["a","b","c","d"], "cod": ["a","b","c","d"], "map": {"a":"a","b":"b","c":"c","d":"d"}}
          ]}
      },
      "checks": [{"check": "check_axioms", "model_space": "BROKEN", "expect": {"passed": true}}]
    })";
    FixtureDocument d = parse_document(doc);
    Json rep = run_checks(d);
    CHECK_FALSE(rep.at("overall").get<bool>());
    // the intersection axiom is the broken one: U_c & U_d = {a,b} is missing
    const Json& res = rep.at("checks")[0].at("result");
    CHECK_FALSE(res.at("intersections").get<bool>());
    bool cited = false;
    for (const auto& ce : res.at("counterexamples"))
        if (ce.get<std::string>().find("item2") != std::string::npos) cited = true;
    CHECK(cited);
    CHECK(report_exit_code(rep) == 1);
}

TEST_CASE("empty checks list yields an empty passing report") {
    FixtureDocument d = parse_document(R"({"version": 1})");
    Json rep = run_checks(d);
    CHECK(rep.at("overall").get<bool>());
    CHECK(rep.at("checks").empty());
}

TEST_CASE("unknown check names are input errors") {
    FixtureDocument d = parse_document(R"({"version": 1, "checks": [{"check": "no_such_check"}]})");
    CHECK_THROWS_AS(run_checks(d), MalformedInput);
}

TEST_CASE("loader round trip: charts rebuilt from the document equal the hand-built atlas") {
    FixtureDocument d = parse_document_file(std::string(FIXTURES_DIR) + "/pc4_atlas.json");
    const AtlasTriple& t = d.atlas("PC4_ATLAS");
    CHECK(t.charts.size() == 2);
    const FinSpace& pc4 = t.total.space();
    const FinSpace& w = t.coord.space();
    Mask uc = 0;
    for (const char* n : {"a", "b", "c"}) uc |= Mask(1) << pc4.point_index(n);
    bool found = false;
    for (const Chart& c : t.charts)
        if (c.patch == uc) {
            found = true;
            CHECK(c.coord[pc4.point_index("a")] == w.point_index("p"));
            CHECK(c.coord[pc4.point_index("c")] == w.point_index("r"));
        }
    CHECK(found);
}
