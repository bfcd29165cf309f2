#include "trilocrab/io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace trilocrab {

using nlohmann::json;

namespace {

json placement_json(const Placement& p) {
    return {{"kind", kind_name(p.kind)}, {"rot", p.rot.quarter_turns}, {"x", p.anchor.x}, {"y", p.anchor.y}};
}

Placement placement_from(const json& j) {
    auto k = parse_kind(j.at("kind").get<std::string>());
    if (!k) throw IoError("unknown tile kind " + j.at("kind").dump());
    int r = j.at("rot").get<int>();
    if (r < 0 || r > 3) throw IoError("rotation out of range: " + std::to_string(r));
    return {*k, Rotation(r), {j.at("x").get<int>(), j.at("y").get<int>()}};
}

json window_json(const std::optional<Window>& w) {
    if (!w) return nullptr;
    return {{"x0", w->x0}, {"y0", w->y0}, {"x1", w->x1}, {"y1", w->y1}};
}

json placements_json(const std::vector<Placement>& v) {
    json out = json::array();
    for (const Placement& p : v) out.push_back(placement_json(p));
    return out;
}

json cell_json(CellCoord c) { return {{"x", c.x}, {"y", c.y}}; }

json step_json(const Step& s) {
    json j{{"step", s.step_no}, {"kind", step_kind_name(s.kind)}};
    if (s.placement) j["placement"] = placement_json(*s.placement);
    if (s.target) j["cell"] = cell_json(*s.target);
    if (!s.case_id.empty()) j["case"] = s.case_id;
    return j;
}

json trace_json(const DeductionTrace& t) {
    json out = json::array();
    for (const Step& s : t.steps) out.push_back(step_json(s));
    return out;
}

} // namespace

std::string patch_to_json(const Patch& p, int level) {
    json j;
    j["atlas"] = {{"name", p.atlas().name}, {"hash", p.atlas().hash}};
    j["window"] = window_json(p.window());
    j["policy"] = p.policy() == BoundaryPolicy::CLOSED ? "closed" : "open";
    j["placements"] = placements_json(p.sorted());
    if (level) j["level"] = level;
    return j.dump(1) + "\n";
}

Patch patch_from_json(const Atlas& a, const std::string& text, int* level) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(std::string("patch JSON: ") + e.what());
    }
    try {
        if (j.contains("atlas") && j["atlas"].is_object() && j["atlas"].contains("hash")) {
            std::string h = j["atlas"]["hash"].get<std::string>();
            if (h != a.hash) throw IoError("patch was written for a different atlas (hash " + h + ")");
        }
        std::optional<Window> w;
        if (!j.at("window").is_null()) {
            const json& jw = j["window"];
            w = Window{jw.at("x0").get<int>(), jw.at("y0").get<int>(), jw.at("x1").get<int>(), jw.at("y1").get<int>()};
            if (w->x1 < w->x0 || w->y1 < w->y0) throw IoError("window has negative extent");
        }
        std::string pol = j.at("policy").get<std::string>();
        if (pol != "open" && pol != "closed") throw IoError("policy must be open or closed");
        std::vector<Placement> pls;
        for (const json& e : j.at("placements")) pls.push_back(placement_from(e));
        if (level) *level = j.value("level", 0);
        try {
            return Patch::assemble(a, w, pol == "closed" ? BoundaryPolicy::CLOSED : BoundaryPolicy::OPEN, pls);
        } catch (const PlaceException& e) {
            throw IoError(std::string("patch rejected: ") + e.what());
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("patch JSON: ") + e.what());
    }
}

std::string trace_to_json(const DeductionTrace& t) { return trace_json(t).dump(1) + "\n"; }

DeductionTrace trace_from_json(const std::string& text) {
    DeductionTrace t;
    try {
        json j = json::parse(text);
        for (const json& e : j) {
            Step s;
            s.step_no = e.at("step").get<int>();
            auto k = parse_step_kind(e.at("kind").get<std::string>());
            if (!k) throw IoError("unknown step kind " + e.at("kind").dump());
            s.kind = *k;
            if (e.contains("placement")) s.placement = placement_from(e["placement"]);
            if (e.contains("cell")) s.target = CellCoord{e["cell"].at("x").get<int>(), e["cell"].at("y").get<int>()};
            s.case_id = e.value("case", "");
            t.steps.push_back(s);
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("trace JSON: ") + e.what());
    }
    return t;
}

std::string report_to_json(const ProofReport& r, const std::string& extra_key, const std::string& extra_json) {
    json j;
    j["overall"] = verdict_name(r.overall());
    j["vacuous"] = r.vacuous;
    json lemmas = json::array();
    for (const LemmaReport& l : r.lemmas) {
        json jl{{"name", l.name},
                {"expected", expectation_name(l.expected)},
                {"verdict", verdict_name(l.verdict)},
                {"radius", l.radius_used},
                {"subcases", l.subcase_count},
                {"nodes", l.nodes}};
        if (l.expected == Expectation::ALTERNATIVES) {
            jl["alternatives_found"] = placements_json(l.alternatives_found);
            jl["alternatives_expected"] = placements_json(l.alternatives_expected);
        }
        if (l.expected == Expectation::CLASSIFIED) {
            json codes = json::array();
            for (NeighborCode c : l.codes_found) codes.push_back(code_name(c));
            jl["codes_found"] = codes;
        }
        json cases = json::array();
        for (const CaseResult& c : l.cases) {
            json jc{{"seed", placements_json(c.seed)},
                    {"outcome", c.outcome},
                    {"radius", c.radius},
                    {"nodes", c.nodes},
                    {"subcases", c.subcases},
                    {"reductions", c.reductions}};
            jc["window"] = window_json(c.window);
            cases.push_back(jc);
        }
        jl["cases"] = cases;
        jl["notes"] = l.notes;
        lemmas.push_back(jl);
    }
    j["lemmas"] = lemmas;
    if (!extra_key.empty()) j[extra_key] = json::parse(extra_json);
    return j.dump(1) + "\n";
}

std::string report_to_text(const ProofReport& r) {
    std::ostringstream out;
    for (const LemmaReport& l : r.lemmas) {
        out << l.name << " [" << expectation_name(l.expected) << "] " << verdict_name(l.verdict) << " radius "
            << l.radius_used << " cases " << l.cases.size() << " subcases " << l.subcase_count << " nodes " << l.nodes
            << "\n";
        for (const std::string& n : l.notes) out << "  note: " << n << "\n";
        if (!l.codes_found.empty()) {
            out << "  realized codes:";
            for (NeighborCode c : l.codes_found) out << " " << code_name(c);
            out << "\n";
        }
        if (l.expected == Expectation::ALTERNATIVES) {
            out << "  alternatives found:";
            for (const Placement& p : l.alternatives_found) out << " " << to_string(p);
            out << "\n  alternatives expected:";
            for (const Placement& p : l.alternatives_expected) out << " " << to_string(p);
            out << "\n";
        }
    }
    out << "overall " << verdict_name(r.overall()) << (r.vacuous ? " (vacuous)" : "") << "\n";
    return out.str();
}

std::string validity_to_text(const ValidityReport& r) {
    std::ostringstream out;
    for (const Violation& v : r.violations) out << v.text() << "\n";
    out << (r.ok() ? "valid" : std::to_string(r.violations.size()) + " violation(s)") << "\n";
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << data;
    if (!out) throw IoError("write failed: " + path);
}

} // namespace trilocrab
