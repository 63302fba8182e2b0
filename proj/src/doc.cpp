#include "atlasforge/doc.hpp"

#include <fstream>
#include <sstream>

namespace af {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw MalformedInput(where + ": " + what);
}

Mask mask_from_json(const FinSpace& s, const Json& arr, const std::string& where) {
    if (!arr.is_array()) fail(where, "expected an array of point names");
    Mask m = 0;
    for (const auto& v : arr) {
        int i = s.point_index(v.get<std::string>());
        if (i < 0) fail(where, "unknown point \"" + v.get<std::string>() + "\"");
        m |= Mask(1) << i;
    }
    return m;
}

PointMap pointmap_from_json(const FinSpace& dom, const FinSpace& cod, const Json& obj,
                            const std::string& where) {
    if (!obj.is_object()) fail(where, "expected an object {from: to}");
    PointMap m(dom.size(), kNoPoint);
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        int i = dom.point_index(it.key());
        int j = cod.point_index(it.value().get<std::string>());
        if (i < 0) fail(where, "unknown source point \"" + it.key() + "\"");
        if (j < 0) fail(where, "unknown target point \"" + it.value().get<std::string>() + "\"");
        m[i] = static_cast<std::uint8_t>(j);
    }
    return m;
}

int k_from_json(const Json& v) {
    if (v.is_number_integer()) return v.get<int>();
    std::string s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return kCInf;
    if (s == "omega" || s == "analytic") return kCOmega;
    throw MalformedInput("smoothness order: expected an integer, \"inf\" or \"omega\"");
}

std::vector<Box> boxes_from_json(const Json& arr, const std::string& where) {
    if (!arr.is_array()) fail(where, "expected an array of boxes");
    std::vector<Box> out;
    for (const auto& jb : arr) {
        Box b;
        for (const auto& ji : jb) {
            if (!ji.is_array() || ji.size() != 2) fail(where, "an interval is [lo, hi]");
            b.push_back({ji[0].get<double>(), ji[1].get<double>()});
        }
        out.push_back(std::move(b));
    }
    return out;
}

}  // namespace

const FinSpace& FixtureDocument::space(const std::string& name) const {
    auto it = spaces.find(name);
    if (it == spaces.end()) throw MalformedInput("reference to undefined space \"" + name + "\"");
    return it->second;
}

const ModelSpace& FixtureDocument::model_space(const std::string& name) const {
    auto it = model_spaces.find(name);
    if (it == model_spaces.end()) throw MalformedInput("reference to undefined model space \"" + name + "\"");
    return it->second;
}

const AtlasTriple& FixtureDocument::atlas(const std::string& name) const {
    auto it = atlases.find(name);
    if (it == atlases.end()) throw MalformedInput("reference to undefined atlas \"" + name + "\"");
    return it->second;
}

const BundleAtlas& FixtureDocument::bundle(const std::string& name) const {
    auto it = bundles.find(name);
    if (it == bundles.end()) throw MalformedInput("reference to undefined bundle \"" + name + "\"");
    return it->second;
}

const CkGluingData& FixtureDocument::ck(const std::string& name) const {
    auto it = ck_data.find(name);
    if (it == ck_data.end()) throw MalformedInput("reference to undefined ck data \"" + name + "\"");
    return it->second;
}

FixtureDocument parse_document(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw MalformedInput(std::string("document: ") + e.what());
    }
    FixtureDocument doc;
    doc.version = j.value("version", 1);
    if (doc.version != 1) throw MalformedInput("document: unsupported version");

    Json spaces_j = j.value("spaces", Json::object());
    for (auto it = spaces_j.begin(); it != spaces_j.end(); ++it) {
        const Json& js = it.value();
        std::vector<std::string> pts;
        for (const auto& p : js.at("points")) pts.push_back(p.get<std::string>());
        FinSpace tmp(pts, {});
        std::vector<Mask> fam;
        const char* key = js.contains("opens") ? "opens" : "subbasis";
        if (js.contains(key))
            for (const auto& o : js.at(key)) fam.push_back(mask_from_json(tmp, o, "space " + it.key()));
        doc.spaces.emplace(it.key(), FinSpace(pts, fam));
    }

    Json groups_j = j.value("groups", Json::object());
    for (auto it = groups_j.begin(); it != groups_j.end(); ++it) {
        const Json& jg = it.value();
        FiniteGroup g;
        for (const auto& e : jg.at("elements")) g.elements.push_back(e.get<std::string>());
        auto idx = [&](const std::string& n) {
            int i = g.element_index(n);
            if (i < 0) fail("group " + it.key(), "unknown element \"" + n + "\"");
            return static_cast<std::uint8_t>(i);
        };
        for (const auto& row : jg.at("table")) {
            std::vector<std::uint8_t> r;
            for (const auto& v : row) r.push_back(idx(v.get<std::string>()));
            g.table.push_back(std::move(r));
        }
        g.inverses.resize(g.elements.size());
        for (std::size_t a = 0; a < g.elements.size(); ++a) {
            bool found = false;
            for (std::size_t b = 0; b < g.elements.size(); ++b)
                if (g.table[a][b] == 0 && g.table[b][a] == 0) {
                    g.inverses[a] = static_cast<std::uint8_t>(b);
                    found = true;
                }
            if (!found) fail("group " + it.key(), "element without inverse");
        }
        check_group_axioms(g);
        doc.groups.emplace(it.key(), std::move(g));
    }

    Json actions_j = j.value("actions", Json::object());
    for (auto it = actions_j.begin(); it != actions_j.end(); ++it) {
        const Json& ja = it.value();
        GroupAction a;
        auto git = doc.groups.find(ja.at("group").get<std::string>());
        if (git == doc.groups.end()) fail("action " + it.key(), "unknown group");
        a.group = git->second;
        a.fiber = doc.space(ja.at("fiber").get<std::string>());
        a.act.assign(a.fiber.size(), std::vector<std::uint8_t>(a.group.size(), 0));
        for (auto yit = ja.at("act").begin(); yit != ja.at("act").end(); ++yit) {
            int y = a.fiber.point_index(yit.key());
            if (y < 0) fail("action " + it.key(), "unknown fiber point");
            for (auto git2 = yit.value().begin(); git2 != yit.value().end(); ++git2) {
                int g = a.group.element_index(git2.key());
                int y2 = a.fiber.point_index(git2.value().get<std::string>());
                if (g < 0 || y2 < 0) fail("action " + it.key(), "bad action entry");
                a.act[y][g] = static_cast<std::uint8_t>(y2);
            }
        }
        check_group_action(a);
        doc.actions.emplace(it.key(), std::move(a));
    }

    Json model_spaces_j = j.value("model_spaces", Json::object());
    for (auto it = model_spaces_j.begin(); it != model_spaces_j.end(); ++it) {
        const Json& jm = it.value();
        std::string kind = jm.value("kind", "trivial");
        if (kind == "trivial") {
            doc.model_spaces.emplace(it.key(), trivial(doc.space(jm.at("space").get<std::string>())));
        } else if (kind == "trivial_grho") {
            auto ait = doc.actions.find(jm.at("action").get<std::string>());
            if (ait == doc.actions.end()) fail("model space " + it.key(), "unknown action");
            doc.model_spaces.emplace(
                it.key(), trivial_grho_space(doc.space(jm.at("base").get<std::string>()),
                                             doc.space(jm.at("fiber").get<std::string>()), ait->second));
        } else if (kind == "minimal" || kind == "explicit") {
            const FinSpace& s = doc.space(jm.at("space").get<std::string>());
            std::vector<Mask> objs;
            for (const auto& o : jm.value("objects", Json::array()))
                objs.push_back(mask_from_json(s, o, "model space " + it.key()));
            std::vector<Arrow> arrs;
            for (const auto& ja : jm.value("arrows", Json::array())) {
                Arrow a;
                a.dom = mask_from_json(s, ja.at("dom"), "model space " + it.key());
                a.cod = mask_from_json(s, ja.at("cod"), "model space " + it.key());
                a.map = pointmap_from_json(s, s, ja.at("map"), "model space " + it.key());
                arrs.push_back(std::move(a));
            }
            if (kind == "minimal")
                doc.model_spaces.emplace(it.key(), minimal_closure(s, objs, arrs));
            else
                doc.model_spaces.emplace(it.key(), ModelSpace(s, objs, arrs));
        } else {
            fail("model space " + it.key(), "unknown kind \"" + kind + "\"");
        }
    }

    Json atlases_j = j.value("atlases", Json::object());
    for (auto it = atlases_j.begin(); it != atlases_j.end(); ++it) {
        const Json& ja = it.value();
        AtlasTriple t;
        t.total = doc.model_space(ja.at("total").get<std::string>());
        t.coord = doc.model_space(ja.at("coord").get<std::string>());
        t.total_is_topological = ja.value("total_is_topological", false);
        t.flavor = ja.value("flavor", "model") == std::string("plain") ? ChartFlavor::PlainHomeo
                                                                       : ChartFlavor::ModelHomeo;
        for (const auto& jc : ja.value("charts", Json::array())) {
            Chart c;
            c.coord = pointmap_from_json(t.total.space(), t.coord.space(), jc.at("map"),
                                         "atlas " + it.key());
            for (std::size_t i = 0; i < t.total.space().size(); ++i)
                if (c.coord[i] != kNoPoint) c.patch |= Mask(1) << i;
            if (jc.contains("patch")) {
                Mask declared = mask_from_json(t.total.space(), jc.at("patch"), "atlas " + it.key());
                if (declared != c.patch) fail("atlas " + it.key(), "patch does not match the map's domain");
            }
            c.codomain = jc.contains("codomain")
                             ? mask_from_json(t.coord.space(), jc.at("codomain"), "atlas " + it.key())
                             : map_image(c.coord, c.patch);
            t.charts.push_back(std::move(c));
        }
        t.canonicalize();
        doc.atlases.emplace(it.key(), std::move(t));
    }

    Json morphisms_j = j.value("morphisms", Json::object());
    for (auto it = morphisms_j.begin(); it != morphisms_j.end(); ++it) {
        const Json& jm = it.value();
        AtlasMorphism m;
        m.source = doc.atlas(jm.at("source").get<std::string>());
        m.target = doc.atlas(jm.at("target").get<std::string>());
        m.f0 = pointmap_from_json(m.source.total.space(), m.target.total.space(), jm.at("f0"),
                                  "morphism " + it.key());
        m.f1 = pointmap_from_json(m.source.coord.space(), m.target.coord.space(), jm.at("f1"),
                                  "morphism " + it.key());
        validate_atlas_morphism(m);
        doc.morphisms.emplace(it.key(), std::move(m));
    }

    Json bundles_j = j.value("bundles", Json::object());
    for (auto it = bundles_j.begin(); it != bundles_j.end(); ++it) {
        const Json& jb = it.value();
        auto ait = doc.actions.find(jb.at("action").get<std::string>());
        if (ait == doc.actions.end()) fail("bundle " + it.key(), "unknown action");
        const FinSpace& total = doc.space(jb.at("total").get<std::string>());
        const FinSpace& base = doc.space(jb.at("base").get<std::string>());
        const FinSpace& fiber = doc.space(jb.at("fiber").get<std::string>());
        PointMap proj = pointmap_from_json(total, base, jb.at("proj"), "bundle " + it.key());
        BundleAtlas a;
        a.bundle = make_protobundle(total, base, fiber, proj, ait->second);
        for (const auto& jc : jb.value("charts", Json::array())) {
            BundleChart c;
            c.coord = PointMap(total.size(), kNoPoint);
            for (auto cit = jc.at("map").begin(); cit != jc.at("map").end(); ++cit) {
                int e = total.point_index(cit.key());
                if (e < 0) fail("bundle " + it.key(), "unknown total point \"" + cit.key() + "\"");
                const Json& pair = cit.value();
                if (!pair.is_array() || pair.size() != 2) fail("bundle " + it.key(), "map value is [x, y]");
                int x = base.point_index(pair[0].get<std::string>());
                int y = fiber.point_index(pair[1].get<std::string>());
                if (x < 0 || y < 0) fail("bundle " + it.key(), "unknown base/fiber point in chart map");
                c.coord[e] =
                    a.bundle.pair_index(static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y));
                c.patch |= Mask(1) << e;
                c.base_open |= Mask(1) << x;
            }
            if (jc.contains("base_open"))
                c.base_open = mask_from_json(base, jc.at("base_open"), "bundle " + it.key());
            a.charts.push_back(std::move(c));
        }
        a.canonicalize();
        doc.bundles.emplace(it.key(), std::move(a));
    }

    Json ck_data_j = j.value("ck_data", Json::object());
    for (auto it = ck_data_j.begin(); it != ck_data_j.end(); ++it) {
        const Json& jc = it.value();
        CkGluingData g;
        g.dimension = jc.value("dimension", 1);
        if (jc.contains("region")) g.coordinate_region = boxes_from_json(jc.at("region"), "ck " + it.key());
        if (jc.contains("tolerances")) {
            const Json& jt = jc.at("tolerances");
            g.tol.inverse_tol = jt.value("inverse", g.tol.inverse_tol);
            g.tol.commute_tol = jt.value("commute", g.tol.commute_tol);
            g.tol.fd_step = jt.value("fd_step", g.tol.fd_step);
            g.tol.det_tol = jt.value("det", g.tol.det_tol);
        }
        for (const auto& jch : jc.value("charts", Json::array())) {
            CkChartDesc c;
            c.id = jch.at("id").get<std::string>();
            c.dimension = g.dimension;
            c.codomain = boxes_from_json(jch.at("codomain"), "ck " + it.key());
            c.resolution = jch.value("resolution", 17);
            if (c.codomain.empty()) fail("ck " + it.key(), "chart codomain is empty");
            g.charts.push_back(std::move(c));
        }
        for (const auto& jt : jc.value("transitions", Json::array())) {
            CkTransition t;
            t.from = jt.at("from").get<std::string>();
            t.to = jt.at("to").get<std::string>();
            t.overlap = boxes_from_json(jt.at("overlap"), "ck " + it.key());
            for (const auto& je : jt.at("map")) t.exprs.push_back(Expr::parse(je.get<std::string>(), g.dimension));
            t.declared_k = jt.contains("k") ? k_from_json(jt.at("k")) : kCInf;
            if (g.chart_index(t.from) < 0 || g.chart_index(t.to) < 0)
                fail("ck " + it.key(), "transition references an unknown chart");
            g.transitions.push_back(std::move(t));
        }
        doc.ck_data.emplace(it.key(), std::move(g));
    }

    doc.checks = j.value("checks", Json::array());
    if (!doc.checks.is_array()) throw MalformedInput("document: \"checks\" must be an array");
    return doc;
}

FixtureDocument parse_document_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedInput("cannot open \"" + path + "\"");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_document(ss.str());
}

Json mask_to_json(const FinSpace& s, Mask m) {
    Json arr = Json::array();
    for (std::size_t i = 0; i < s.size(); ++i)
        if (test_bit(m, i)) arr.push_back(s.point_name(i));
    return arr;
}

Json map_to_json(const FinSpace& dom, const FinSpace& cod, const PointMap& m, Mask domain) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < dom.size(); ++i)
        if (test_bit(domain, i) && m[i] != kNoPoint) obj[dom.point_name(i)] = cod.point_name(m[i]);
    return obj;
}

std::string emit_report(const Json& report, ReportFormat format) {
    if (format == ReportFormat::Structured) return report.dump(2) + "\n";
    std::ostringstream out;
    out << "atlas-forge report\n";
    for (const auto& c : report.at("checks")) {
        out << (c.at("pass").get<bool>() ? "  PASS " : "  FAIL ") << c.at("check").get<std::string>();
        if (c.contains("name")) out << " [" << c.at("name").get<std::string>() << "]";
        if (!c.at("pass").get<bool>() && c.contains("details")) out << "\n        " << c.at("details").dump();
        out << "\n";
    }
    out << (report.at("overall").get<bool>() ? "overall: PASS" : "overall: FAIL") << "\n";
    return out.str();
}

int report_exit_code(const Json& report) { return report.at("overall").get<bool>() ? 0 : 1; }

}  // namespace af
