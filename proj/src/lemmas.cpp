#include "trilocrab/lemmas.hpp"

#include "trilocrab/hierarchy.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <fstream>
#include <sstream>

namespace trilocrab {

const char* cell_spec_name(CellSpec s) {
    switch (s) {
    case CellSpec::FREE: return "FREE";
    case CellSpec::EXACT: return "EXACT";
    case CellSpec::ANY_TRILOBITE: return "ANY_TRILOBITE";
    case CellSpec::ONE_OF: return "ONE_OF";
    case CellSpec::ANY_TILE: return "ANY_TILE";
    case CellSpec::MUST_BE_EMPTY: return "MUST_BE_EMPTY";
    case CellSpec::COVERED_BY: return "COVERED_BY";
    default: return "FRONTIER";
    }
}

const char* expectation_name(Expectation e) {
    switch (e) {
    case Expectation::FORBIDDEN: return "forbidden";
    case Expectation::ALTERNATIVES: return "alternatives";
    case Expectation::CLASSIFIED: return "classified";
    default: return "chain";
    }
}

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::VERIFIED: return "VERIFIED";
    case Verdict::FAILED: return "FAILED";
    default: return "INCONCLUSIVE";
    }
}

std::optional<CellCoord> Pattern::frontier() const {
    for (auto& [c, pc] : cells)
        if (pc.spec == CellSpec::FRONTIER) return c;
    return std::nullopt;
}

namespace {

std::vector<OrientedClass> all_of(Kind k) {
    std::vector<OrientedClass> out;
    for (int r = 0; r < 4; ++r) out.push_back({k, Rotation(r)});
    return out;
}

bool same_classes(const std::vector<OrientedClass>& a, const std::vector<OrientedClass>& b) {
    std::set<OrientedClass> x(a.begin(), a.end()), y(b.begin(), b.end());
    return x == y;
}

} // namespace

char Legend::anchor_glyph(Kind k, Rotation r) const {
    for (auto& [g, pc] : glyphs)
        if (pc.spec == CellSpec::EXACT && pc.classes.size() == 1 && pc.classes[0] == OrientedClass{k, r}) return g;
    return '?';
}

char Legend::covered_glyph(Kind k) const {
    for (auto& [g, pc] : glyphs)
        if (pc.spec == CellSpec::COVERED_BY && same_classes(pc.classes, all_of(k))) return g;
    for (auto& [g, pc] : glyphs)
        if (pc.spec == CellSpec::ANY_TILE) return g;
    return '#';
}

char Legend::empty_glyph() const {
    for (auto& [g, pc] : glyphs)
        if (pc.spec == CellSpec::FREE) return g;
    return '.';
}

Legend default_legend() {
    Legend l;
    l.glyphs['.'] = {CellSpec::FREE, {}};
    l.glyphs['@'] = {CellSpec::FRONTIER, {}};
    l.glyphs['_'] = {CellSpec::MUST_BE_EMPTY, {}};
    l.glyphs['?'] = {CellSpec::ANY_TILE, {}};
    l.glyphs['*'] = {CellSpec::ANY_TRILOBITE, all_of(Kind::TRILOBITE)};
    l.glyphs['t'] = {CellSpec::COVERED_BY, all_of(Kind::TRILOBITE)};
    l.glyphs['o'] = {CellSpec::ONE_OF, all_of(Kind::CRAB)};
    for (int r = 0; r < 4; ++r) {
        l.glyphs[char('0' + r)] = {CellSpec::EXACT, {{Kind::TRILOBITE, Rotation(r)}}};
        l.glyphs[char('a' + r)] = {CellSpec::EXACT, {{Kind::CRAB, Rotation(r)}}};
    }
    return l;
}

SuiteError::SuiteError(int line, const std::string& msg)
    : std::runtime_error("suite line " + std::to_string(line) + ": " + msg), line(line) {}

Pattern parse_rows(const Legend& legend, const std::vector<std::string>& rows, CellCoord origin) {
    Pattern p;
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) {
            auto it = legend.glyphs.find(rows[i][j]);
            if (it == legend.glyphs.end()) throw std::invalid_argument(std::string("unknown glyph '") + rows[i][j] + "'");
            if (it->second.spec != CellSpec::FREE)
                p.cells[{origin.x + int(j), origin.y - int(i)}] = it->second;
        }
    return p;
}

namespace {

std::vector<std::string> words(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

int to_int(int line, const std::string& s) {
    try {
        size_t used = 0;
        long long v = std::stoll(s, &used);
        if (used != s.size() || v < INT_MIN || v > INT_MAX) throw std::invalid_argument(s);
        return int(v);
    } catch (const std::exception&) {
        throw SuiteError(line, "expected integer, got '" + s + "'");
    }
}

PatternCell parse_glyph_spec(int line, const std::vector<std::string>& w) {
    // w[0] = "glyph", w[1] = character, w[2] = spec, rest = arguments
    const std::string& s = w[2];
    auto kind_at = [&](size_t i) {
        if (i >= w.size()) throw SuiteError(line, "missing tile kind");
        auto k = parse_kind(w[i]);
        if (!k) throw SuiteError(line, "unknown tile kind '" + w[i] + "'");
        return *k;
    };
    auto classes_from = [&](size_t i) {
        std::vector<OrientedClass> out;
        for (; i < w.size(); ++i) {
            auto colon = w[i].find(':');
            if (colon == std::string::npos) {
                auto k = parse_kind(w[i]);
                if (!k) throw SuiteError(line, "bad class '" + w[i] + "'");
                for (auto& c : all_of(*k)) out.push_back(c);
                continue;
            }
            auto k = parse_kind(w[i].substr(0, colon));
            if (!k) throw SuiteError(line, "bad class '" + w[i] + "'");
            out.push_back({*k, Rotation(to_int(line, w[i].substr(colon + 1)))});
        }
        if (out.empty()) throw SuiteError(line, "empty class list");
        return out;
    };
    if (s == "FREE") return {CellSpec::FREE, {}};
    if (s == "FRONTIER") return {CellSpec::FRONTIER, {}};
    if (s == "MUST_BE_EMPTY") return {CellSpec::MUST_BE_EMPTY, {}};
    if (s == "ANY_TILE") return {CellSpec::ANY_TILE, {}};
    if (s == "ANY_TRILOBITE") return {CellSpec::ANY_TRILOBITE, all_of(Kind::TRILOBITE)};
    if (s == "EXACT") {
        if (w.size() != 5) throw SuiteError(line, "EXACT takes KIND ROT");
        return {CellSpec::EXACT, {{kind_at(3), Rotation(to_int(line, w[4]))}}};
    }
    if (s == "ONE_OF") return {CellSpec::ONE_OF, classes_from(3)};
    if (s == "COVERED_BY") return {CellSpec::COVERED_BY, classes_from(3)};
    throw SuiteError(line, "unknown glyph spec '" + s + "'");
}

} // namespace

Suite parse_suite(std::string_view text) {
    Suite suite;
    suite.legend = default_legend();
    bool legend_declared = false;
    std::istringstream in{std::string(text)};
    std::string raw;
    int no = 0;
    std::string section;
    LemmaSpec* cur = nullptr;
    Pattern* target = nullptr;
    std::vector<std::string> rows;
    CellCoord origin{0, 0};
    std::set<std::string> names;
    auto flush_rows = [&](int line) {
        if (!rows.empty()) {
            if (!target) throw SuiteError(line, "pattern rows outside a lemma");
            try {
                Pattern p = parse_rows(suite.legend, rows, origin);
                for (auto& [c, pc] : p.cells) target->cells[c] = pc;
            } catch (const std::invalid_argument& e) {
                throw SuiteError(line, e.what());
            }
        }
        rows.clear();
    };
    while (std::getline(in, raw)) {
        ++no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string line = raw;
        if (auto h = line.find('#'); h != std::string::npos && line.rfind("row", 0) != 0 &&
                                     line.find_first_not_of(" \t") != std::string::npos &&
                                     line.substr(line.find_first_not_of(" \t")).rfind("glyph", 0) != 0)
            line = line.substr(0, h);
        auto w = words(line);
        if (w.empty()) continue;
        if (w[0].front() == '[') {
            flush_rows(no);
            std::string head = line.substr(line.find('[') + 1);
            auto close = head.find(']');
            if (close == std::string::npos) throw SuiteError(no, "unterminated section header");
            head = head.substr(0, close);
            auto hw = words(head);
            if (hw.size() == 1 && hw[0] == "legend") {
                section = "legend";
                if (!legend_declared) suite.legend.glyphs.clear();
                legend_declared = true;
                cur = nullptr;
                target = nullptr;
            } else if (hw.size() == 2 && hw[0] == "lemma") {
                if (!names.insert(hw[1]).second) throw SuiteError(no, "duplicate lemma name " + hw[1]);
                section = "lemma";
                suite.lemmas.push_back({});
                cur = &suite.lemmas.back();
                cur->name = hw[1];
                target = &cur->seed;
                origin = {0, 0};
            } else {
                throw SuiteError(no, "unknown section [" + head + "]");
            }
            continue;
        }
        if (section == "legend") {
            if (w[0] != "glyph" || w.size() < 3 || w[1].size() != 1) throw SuiteError(no, "expected: glyph C SPEC ...");
            suite.legend.glyphs[w[1][0]] = parse_glyph_spec(no, w);
            continue;
        }
        if (section != "lemma") throw SuiteError(no, "content outside a section");
        const std::string& d = w[0];
        if (d == "row") {
            auto p = raw.find("row");
            std::string g = raw.substr(p + 3);
            auto b = g.find_first_not_of(" \t");
            g = b == std::string::npos ? "" : g.substr(b);
            while (!g.empty() && (g.back() == ' ' || g.back() == '\t')) g.pop_back();
            if (g.empty()) throw SuiteError(no, "empty row");
            rows.push_back(g);
            continue;
        }
        flush_rows(no);
        if (d == "expect") {
            if (w.size() != 2) throw SuiteError(no, "expect takes one value");
            if (w[1] == "forbidden") cur->expected = Expectation::FORBIDDEN;
            else if (w[1] == "alternatives") cur->expected = Expectation::ALTERNATIVES;
            else if (w[1] == "classified") cur->expected = Expectation::CLASSIFIED;
            else if (w[1] == "chain") cur->expected = Expectation::CHAIN;
            else throw SuiteError(no, "unknown expectation " + w[1]);
        } else if (d == "radii") {
            cur->radii.clear();
            for (size_t i = 1; i < w.size(); ++i) {
                int r = to_int(no, w[i]);
                if (r < 0 || (!cur->radii.empty() && r <= cur->radii.back()))
                    throw SuiteError(no, "radii must be non-negative and strictly increasing");
                cur->radii.push_back(r);
            }
            if (cur->radii.empty()) throw SuiteError(no, "empty radius schedule");
        } else if (d == "budget") {
            if (w.size() != 2) throw SuiteError(no, "budget takes one value");
            int b = to_int(no, w[1]);
            if (b <= 0) throw SuiteError(no, "budget must be positive");
            cur->budget = uint64_t(b);
        } else if (d == "reduces-to") {
            for (size_t i = 1; i < w.size(); ++i) {
                if (!names.count(w[i]) || w[i] == cur->name)
                    throw SuiteError(no, "reduction target " + w[i] + " is not an earlier lemma");
                cur->reduces_to.push_back(w[i]);
            }
        } else if (d == "classify") {
            for (size_t i = 1; i < w.size(); ++i) {
                auto c = parse_code(w[i]);
                if (!c || *c == NeighborCode::UNDETERMINED) throw SuiteError(no, "unknown code " + w[i]);
                cur->classified.insert(*c);
            }
        } else if (d == "window") {
            cur->window = to_int(no, w.at(1));
        } else if (d == "margin") {
            cur->margin = to_int(no, w.at(1));
        } else if (d == "origin") {
            if (w.size() != 3) throw SuiteError(no, "origin takes x y");
            origin = {to_int(no, w[1]), to_int(no, w[2])};
        } else if (d == "alt") {
            cur->alternatives.push_back({});
            target = &cur->alternatives.back();
            origin = {0, 0};
        } else {
            throw SuiteError(no, "unknown directive " + d);
        }
    }
    flush_rows(no);
    for (const LemmaSpec& l : suite.lemmas) {
        if (l.expected == Expectation::ALTERNATIVES && (!l.seed.frontier() || l.alternatives.empty()))
            throw SuiteError(no, "lemma " + l.name + " needs a frontier cell and alternatives");
        if (l.expected == Expectation::CLASSIFIED && l.classified.empty())
            throw SuiteError(no, "lemma " + l.name + " needs a classify line");
        if (l.expected == Expectation::CHAIN && l.window <= 0)
            throw SuiteError(no, "lemma " + l.name + " needs a window size");
    }
    return suite;
}

Suite load_suite_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open suite file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_suite(ss.str());
}

namespace {

bool class_match(const std::vector<OrientedClass>& classes, const Placement& p) {
    if (classes.empty()) return true;
    for (const OrientedClass& c : classes)
        if (c.kind == p.kind && c.rot == p.rot) return true;
    return false;
}

void expand_rec(const Atlas& a, const Pattern& pat, const std::vector<std::pair<CellCoord, PatternCell>>& todo,
                size_t i, const Patch& cur, std::set<std::vector<Placement>>& out) {
    if (i == todo.size()) {
        for (auto& [c, pc] : pat.cells)
            if (pc.spec == CellSpec::MUST_BE_EMPTY && cur.covered(c)) return;
        out.insert(cur.sorted());
        return;
    }
    const auto& [cell, pc] = todo[i];
    auto try_place = [&](const Placement& pl) {
        if (cur.check(pl)) return;
        expand_rec(a, pat, todo, i + 1, cur.place(pl), out);
    };
    switch (pc.spec) {
    case CellSpec::EXACT:
    case CellSpec::ANY_TRILOBITE:
    case CellSpec::ONE_OF:
        for (const OrientedClass& oc : pc.classes) {
            Placement pl{oc.kind, oc.rot, cell};
            if (const Placement* have = cur.at(cell)) {
                if (*have == pl) expand_rec(a, pat, todo, i + 1, cur, out);
                continue;
            }
            try_place(pl);
        }
        break;
    case CellSpec::COVERED_BY:
    case CellSpec::ANY_TILE:
        if (const Placement* have = cur.at(cell)) {
            if (class_match(pc.classes, *have)) expand_rec(a, pat, todo, i + 1, cur, out);
            break;
        }
        for (const Placement& pl : a.placements_covering(cell))
            if (class_match(pc.classes, pl)) try_place(pl);
        break;
    default:
        expand_rec(a, pat, todo, i + 1, cur, out);
    }
}

} // namespace

std::vector<std::vector<Placement>> expand_wildcards(const Atlas& a, const Pattern& seed) {
    std::vector<std::pair<CellCoord, PatternCell>> todo;
    for (auto& [c, pc] : seed.cells)
        if (pc.spec == CellSpec::EXACT || pc.spec == CellSpec::ANY_TRILOBITE || pc.spec == CellSpec::ONE_OF)
            todo.push_back({c, pc});
    for (auto& [c, pc] : seed.cells)
        if (pc.spec == CellSpec::COVERED_BY || pc.spec == CellSpec::ANY_TILE) todo.push_back({c, pc});
    std::set<std::vector<Placement>> out;
    expand_rec(a, seed, todo, 0, Patch(a), out);
    return {out.begin(), out.end()};
}

namespace {

Window lemma_window(const Atlas& a, const Pattern& pat, const std::vector<Placement>& seed, int r) {
    int x0 = INT_MAX, y0 = INT_MAX, x1 = INT_MIN, y1 = INT_MIN;
    auto grow = [&](CellCoord c) {
        x0 = std::min(x0, c.x);
        y0 = std::min(y0, c.y);
        x1 = std::max(x1, c.x + 1);
        y1 = std::max(y1, c.y + 1);
    };
    for (auto& [c, pc] : pat.cells) grow(c);
    for (const Placement& p : seed)
        for (CellCoord c : a.cells_of(p)) grow(c);
    if (x0 == INT_MAX) grow({0, 0});
    return {x0 - r, y0 - r, x1 + r, y1 + r};
}


std::vector<Step> given(const std::vector<Placement>& seed) {
    DeductionTrace t;
    for (const Placement& p : seed) t.add(StepKind::GIVEN, p);
    return t.steps;
}

// Tiles covering a window cell reach at most this far past the window.
int reach(const Atlas& a) {
    int r = 0;
    for (Kind k : {Kind::TRILOBITE, Kind::CRAB})
        for (CellCoord c : a.tile(k).footprint) r = std::max({r, std::abs(c.x), std::abs(c.y)});
    return r;
}

// The board a window's cases run on: the window plus a rim where tiles may stick out.
// Rim cells need not be covered.
Window board_window(const Atlas& a, const Window& w) {
    int r = reach(a);
    return {w.x0 - r, w.y0 - r, w.x1 + r, w.y1 + r};
}

std::vector<int> window_slots(const Board& b, const Window& w) {
    std::vector<int> v;
    for (CellCoord c : w.cells()) v.push_back(b.slot(c));
    std::sort(v.begin(), v.end());
    return v;
}

// Board for the window with the seed applied; nullopt when a seed placement is illegal there.
std::optional<Board> seeded_board(const Atlas& a, const Window& w, const std::vector<Placement>& seed) {
    Board b(a, Domain::planar(board_window(a, w), true));
    for (const Placement& p : seed) {
        int pid = b.pid_of(p);
        if (pid < 0 || !b.legal(pid)) return std::nullopt;
        b.place(pid);
    }
    return b;
}

struct Attempt {
    SearchStatus status = SearchStatus::REFUTED;
    SearchOutcome out;
};

Attempt attempt(const Atlas& a, const Window& w, const std::vector<Placement>& seed, SearchMode mode, uint64_t budget,
                const RunOptions& opt, const Reducer& reducer, std::vector<Placement>* solution = nullptr) {
    Attempt at;
    auto b = seeded_board(a, w, seed);
    if (!b) {
        // The seed itself breaks a rule inside this window: refuted without search.
        at.status = SearchStatus::REFUTED;
        at.out.status = SearchStatus::REFUTED;
        at.out.nodes = 0;
        DeductionTrace t;
        t.steps = given(seed);
        t.add(StepKind::CONTRADICTION, std::nullopt, seed.back().anchor);
        at.out.proof = t;
        return at;
    }
    SearchOptions so;
    so.mode = mode;
    so.budget = budget;
    so.workers = opt.workers;
    so.record_proof = opt.record_proofs;
    so.reducer = reducer;
    at.out = search_board(*b, window_slots(*b, w), so, given(seed));
    at.status = at.out.status;
    if (solution && at.status == SearchStatus::FOUND && !at.out.solutions.empty()) *solution = at.out.solutions.front();
    return at;
}

const char* outcome_name(SearchStatus s) { return search_status_name(s); }

std::vector<int> schedule(const LemmaSpec& spec, const RunOptions& opt) {
    return opt.radii ? *opt.radii : spec.radii;
}

uint64_t budget_of(const LemmaSpec& spec, const RunOptions& opt) {
    return opt.budget ? *opt.budget : spec.budget;
}

Placement covering(const Atlas& a, const std::vector<Placement>& set, CellCoord c) {
    for (const Placement& p : set)
        for (CellCoord x : a.cells_of(p))
            if (x == c) return p;
    throw std::invalid_argument("alternative does not cover the frontier cell");
}

void run_forbidden(const Atlas& a, const LemmaSpec& spec, const RunOptions& opt, const Reducer& reducer,
                   LemmaReport& rep) {
    auto seeds = expand_wildcards(a, spec.seed);
    if (seeds.empty()) rep.notes.push_back("no legal seed: forbidden already by the placement rules");
    bool failed = false, inconclusive = false;
    for (const auto& seed : seeds) {
        CaseResult cr;
        cr.seed = seed;
        bool exhausted_last = false;
        for (int r : schedule(spec, opt)) {
            Window w = lemma_window(a, spec.seed, seed, r);
            Attempt at = attempt(a, w, seed, SearchMode::REFUTE, budget_of(spec, opt), opt, reducer);
            cr.nodes += at.out.nodes;
            cr.radius = r;
            cr.window = board_window(a, w);
            cr.outcome = outcome_name(at.status);
            exhausted_last = at.status == SearchStatus::BUDGET_EXHAUSTED;
            if (at.status == SearchStatus::REFUTED) {
                cr.subcases = at.out.subcases;
                cr.reductions = at.out.reductions;
                cr.proof = std::move(at.out.proof);
                break;
            }
        }
        if (cr.outcome != "REFUTED") {
            if (exhausted_last) inconclusive = true;
            else failed = true;
        }
        rep.nodes += cr.nodes;
        rep.subcase_count += cr.subcases;
        if (cr.outcome == "REFUTED") rep.radius_used = std::max(rep.radius_used, cr.radius);
        rep.cases.push_back(std::move(cr));
    }
    rep.verdict = failed ? Verdict::FAILED : inconclusive ? Verdict::INCONCLUSIVE : Verdict::VERIFIED;
}

void run_alternatives(const Atlas& a, const LemmaSpec& spec, const RunOptions& opt, const Reducer& reducer,
                      LemmaReport& rep) {
    CellCoord f = *spec.seed.frontier();
    std::set<Placement> expected;
    for (const Pattern& alt : spec.alternatives)
        for (const auto& set : expand_wildcards(a, alt)) expected.insert(covering(a, set, f));
    rep.alternatives_expected.assign(expected.begin(), expected.end());

    auto seeds = expand_wildcards(a, spec.seed);
    // Candidate state per (seed, placement): 0 alive, 1 refuted, 2 found, 3 exhausted.
    std::map<std::pair<size_t, Placement>, int> state;
    for (size_t i = 0; i < seeds.size(); ++i) {
        Patch p = Patch::assemble(a, std::nullopt, BoundaryPolicy::OPEN, seeds[i], true);
        for (const Placement& c : legal_completions(p, f)) state[{i, c}] = 0;
    }
    Verdict v = Verdict::FAILED;
    bool decided = false;
    for (int r : schedule(spec, opt)) {
        for (auto& [key, st] : state) {
            if (st == 1) continue;
            std::vector<Placement> seed = seeds[key.first];
            seed.push_back(key.second);
            std::sort(seed.begin(), seed.end());
            Window w = lemma_window(a, spec.seed, seed, r);
            Attempt at = attempt(a, w, seed, SearchMode::FIRST, budget_of(spec, opt), opt, reducer);
            rep.nodes += at.out.nodes;
            st = at.status == SearchStatus::REFUTED ? 1 : at.status == SearchStatus::FOUND ? 2 : 3;
        }
        std::set<Placement> alive;
        bool unknown = false;
        for (auto& [key, st] : state) {
            if (st != 1) alive.insert(key.second);
            unknown |= st == 3;
        }
        rep.radius_used = r;
        rep.alternatives_found.assign(alive.begin(), alive.end());
        bool missing = false;
        for (const Placement& e : expected) missing |= !alive.count(e);
        if (missing) {
            rep.notes.push_back("an expected alternative is refuted at radius " + std::to_string(r));
            v = Verdict::FAILED;
            decided = true;
            break;
        }
        if (!unknown && alive == expected) {
            v = Verdict::VERIFIED;
            decided = true;
            break;
        }
        v = unknown ? Verdict::INCONCLUSIVE : Verdict::FAILED;
    }
    if (!decided && v == Verdict::FAILED)
        rep.notes.push_back("surviving alternatives at the largest radius differ from the expected set");
    for (size_t i = 0; i < seeds.size(); ++i) {
        CaseResult cr;
        cr.seed = seeds[i];
        cr.outcome = "ALTERNATIVES";
        cr.radius = rep.radius_used;
        rep.cases.push_back(cr);
    }
    rep.verdict = v;
}

std::vector<NeighborCode> real_codes() {
    return {NeighborCode::TTT, NeighborCode::TTO, NeighborCode::OTT, NeighborCode::OTO,
            NeighborCode::OOT, NeighborCode::TOT, NeighborCode::TOO, NeighborCode::OOO};
}

void run_classified(const Atlas& a, const LemmaSpec& spec, const RunOptions& opt, const Reducer& reducer,
                    LemmaReport& rep) {
    bool failed = false, inconclusive = false;
    const auto& tips = a.tile(Kind::TRILOBITE).rotated_tips;
    for (const auto& seed : expand_wildcards(a, spec.seed)) {
        for (const Placement& t : seed) {
            if (t.kind != Kind::TRILOBITE) continue;
            for (NeighborCode code : real_codes()) {
                if (spec.classified.count(code)) continue;
                Pattern pat = spec.seed;
                for (const Placement& p : seed) pat.cells[p.anchor] = {CellSpec::EXACT, {{p.kind, p.rot}}};
                const char* letters = code_name(code);
                for (int i = 0; i < 3; ++i) {
                    CellCoord c = t.anchor + tips[t.rot.quarter_turns][i].contact;
                    if (letters[i] == 'T') pat.cells[c] = {CellSpec::COVERED_BY, all_of(Kind::TRILOBITE)};
                    else pat.cells[c] = {CellSpec::COVERED_BY, all_of(Kind::CRAB)};
                }
                bool realized = false, unknown = false;
                for (const auto& sub : expand_wildcards(a, pat)) {
                    CaseResult cr;
                    cr.seed = sub;
                    SearchStatus last = SearchStatus::REFUTED;
                    for (int r : schedule(spec, opt)) {
                        Window w = lemma_window(a, pat, sub, r);
                        Attempt at = attempt(a, w, sub, SearchMode::REFUTE, budget_of(spec, opt), opt, reducer);
                        cr.nodes += at.out.nodes;
                        cr.radius = r;
                        cr.window = board_window(a, w);
                        last = at.status;
                        if (last == SearchStatus::REFUTED) {
                            cr.subcases = at.out.subcases;
                            cr.reductions = at.out.reductions;
                            cr.proof = std::move(at.out.proof);
                            break;
                        }
                    }
                    cr.outcome = std::string(code_name(code)) + " " + outcome_name(last);
                    realized |= last == SearchStatus::FOUND;
                    unknown |= last == SearchStatus::BUDGET_EXHAUSTED;
                    rep.nodes += cr.nodes;
                    rep.subcase_count += cr.subcases;
                    if (last == SearchStatus::REFUTED) rep.radius_used = std::max(rep.radius_used, cr.radius);
                    rep.cases.push_back(std::move(cr));
                }
                if (realized) {
                    rep.codes_found.insert(code);
                    failed = true;
                } else if (unknown) {
                    inconclusive = true;
                }
            }
        }
    }
    rep.verdict = failed ? Verdict::FAILED : inconclusive ? Verdict::INCONCLUSIVE : Verdict::VERIFIED;
}

} // namespace

Reducer make_reducer(const ReductionBase& base, const std::vector<std::string>& names) {
    std::vector<std::pair<std::string, std::vector<Placement>>> seeds;
    for (const std::string& n : names) {
        auto it = base.seeds.find(n);
        if (it == base.seeds.end()) continue;
        for (const auto& s : it->second)
            if (!s.empty()) seeds.push_back({n, s});
    }
    if (seeds.empty()) return {};
    return [seeds](const Board& b) -> std::optional<std::string> {
        for (int pid : b.trail()) {
            Placement have = b.placement(pid);
            for (const auto& [name, seed] : seeds) {
                const Placement& pivot = seed.front();
                if (pivot.kind != have.kind) continue;
                Rotation r = have.rot + pivot.rot.inverse();
                CellCoord shift = have.anchor - rotate_point(pivot.anchor, r);
                bool all = true;
                for (const Placement& q : seed) {
                    Placement m{q.kind, q.rot + r, rotate_point(q.anchor, r) + shift};
                    int qp = b.pid_of(m);
                    if (qp < 0 || b.owner(b.slot(m.anchor)) != qp) {
                        all = false;
                        break;
                    }
                }
                if (all) return name;
            }
        }
        return std::nullopt;
    };
}

LemmaReport run_lemma(const Atlas& a, const LemmaSpec& spec, const RunOptions& opt, const ReductionBase* base) {
    if (spec.expected == Expectation::CHAIN) return run_chain_lemma(a, spec, opt);
    auto t0 = std::chrono::steady_clock::now();
    LemmaReport rep;
    rep.name = spec.name;
    rep.expected = spec.expected;
    Reducer reducer;
    if (base && !spec.reduces_to.empty()) reducer = make_reducer(*base, spec.reduces_to);
    switch (spec.expected) {
    case Expectation::FORBIDDEN: run_forbidden(a, spec, opt, reducer, rep); break;
    case Expectation::ALTERNATIVES: run_alternatives(a, spec, opt, reducer, rep); break;
    default: run_classified(a, spec, opt, reducer, rep); break;
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

LemmaReport run_chain_lemma(const Atlas& a, const LemmaSpec& spec, const RunOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    LemmaReport rep;
    rep.name = spec.name;
    rep.expected = Expectation::CHAIN;
    bool failed = false, inconclusive = false;
    for (const auto& seed : expand_wildcards(a, spec.seed)) {
        Window bb = lemma_window(a, spec.seed, seed, 0);
        int cx = (bb.x0 + bb.x1) / 2, cy = (bb.y0 + bb.y1) / 2;
        Window w{cx - spec.window / 2, cy - spec.window / 2, cx - spec.window / 2 + spec.window,
                 cy - spec.window / 2 + spec.window};
        auto b = seeded_board(a, w, seed);
        CaseResult cr;
        cr.seed = seed;
        Window bw = board_window(a, w);
        cr.window = bw;
        cr.radius = spec.window;
        if (!b) {
            cr.outcome = "REFUTED";
            rep.cases.push_back(cr);
            continue;
        }
        SearchOptions so;
        so.mode = SearchMode::FIRST;
        so.budget = budget_of(spec, opt);
        so.workers = opt.workers;
        so.record_proof = false;
        int margin = spec.margin;
        so.accept = [&a, bw, margin](const Board& bd) {
            std::vector<Placement> pls;
            for (int pid : bd.trail()) pls.push_back(bd.placement(pid));
            Patch p = Patch::assemble(a, bw, BoundaryPolicy::CLOSED, pls);
            return chain_violation(p, margin).has_value();
        };
        SearchOutcome out = search_board(*b, window_slots(*b, w), so, given(seed));
        cr.nodes = out.nodes;
        cr.subcases = out.subcases;
        rep.nodes += out.nodes;
        rep.subcase_count += out.subcases;
        if (out.status == SearchStatus::FOUND) {
            // A completed window whose chain through an interior *TO breaks.
            cr.outcome = "COUNTEREXAMPLE";
            Patch p = Patch::assemble(a, bw, BoundaryPolicy::CLOSED, out.solutions.front());
            rep.notes.push_back(spec.name + ": " + chain_violation(p, margin).value_or(""));
            failed = true;
        } else if (out.status == SearchStatus::BUDGET_EXHAUSTED) {
            cr.outcome = "BUDGET_EXHAUSTED";
            inconclusive = true;
        } else {
            cr.outcome = "REFUTED";
        }
        rep.cases.push_back(cr);
    }
    rep.radius_used = spec.window;
    rep.verdict = failed ? Verdict::FAILED : inconclusive ? Verdict::INCONCLUSIVE : Verdict::VERIFIED;
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

Verdict ProofReport::overall() const {
    bool inconclusive = false;
    for (const LemmaReport& l : lemmas) {
        if (l.verdict == Verdict::FAILED) return Verdict::FAILED;
        inconclusive |= l.verdict == Verdict::INCONCLUSIVE;
    }
    return inconclusive ? Verdict::INCONCLUSIVE : Verdict::VERIFIED;
}

ProofReport run_all(const Atlas& a, const Suite& suite, const RunOptions& opt) {
    ProofReport out;
    out.vacuous = suite.lemmas.empty();
    ReductionBase base;
    for (const LemmaSpec& spec : suite.lemmas) {
        LemmaReport rep = run_lemma(a, spec, opt, &base);
        if (opt.on_lemma) opt.on_lemma(rep);
        if (rep.verdict == Verdict::VERIFIED && spec.expected == Expectation::FORBIDDEN)
            base.seeds[spec.name] = expand_wildcards(a, spec.seed);
        out.lemmas.push_back(std::move(rep));
    }
    return out;
}

namespace {

struct Replayer {
    const Atlas& a;
    const DeductionTrace& t;
    const std::set<std::string>& known;
    size_t i = 0;
    ReplayResult res;

    bool fail(const std::string& msg) {
        res.ok = false;
        if (res.error.empty()) res.error = "step " + std::to_string(i < t.steps.size() ? t.steps[i].step_no : -1) + ": " + msg;
        return false;
    }

    static std::vector<Placement> completions(const Patch& p, CellCoord c) {
        auto v = legal_completions_reference(p, c);
        std::sort(v.begin(), v.end());
        return v;
    }

    // Replays one node: forced steps, then a closing step or a full branch.
    bool node(Patch cur) {
        while (i < t.steps.size()) {
            const Step& s = t.steps[i];
            switch (s.kind) {
            case StepKind::GIVEN:
                return fail("GIVEN after the start");
            case StepKind::FORCED: {
                if (!s.placement || !s.target) return fail("FORCED without placement or cell");
                auto c = completions(cur, *s.target);
                if (c.size() != 1 || c[0] != *s.placement) return fail("FORCED placement is not the unique completion");
                cur = cur.place(*s.placement);
                ++i;
                break;
            }
            case StepKind::CONTRADICTION:
                if (!s.target) return fail("CONTRADICTION without a cell");
                if (cur.covered(*s.target) || !completions(cur, *s.target).empty())
                    return fail("CONTRADICTION cell still has a completion");
                ++res.contradictions;
                ++i;
                return true;
            case StepKind::REDUCED_TO:
                if (!known.count(s.case_id)) return fail("reduction to unknown case " + s.case_id);
                ++res.reductions;
                ++i;
                return true;
            case StepKind::SUBCASE_OPEN: {
                CellCoord target = *s.target;
                std::vector<Placement> opened;
                while (i < t.steps.size() && t.steps[i].kind == StepKind::SUBCASE_OPEN) {
                    const Step& o = t.steps[i];
                    if (!o.target || *o.target != target || !o.placement) return fail("inconsistent branch");
                    opened.push_back(*o.placement);
                    ++i;
                    auto err = cur.check(*o.placement);
                    if (err) return fail("branch placement is illegal");
                    if (!node(cur.place(*o.placement))) return false;
                    if (i >= t.steps.size() || t.steps[i].kind != StepKind::SUBCASE_CLOSE) return fail("missing SUBCASE_CLOSE");
                    ++i;
                }
                std::sort(opened.begin(), opened.end());
                if (opened != completions(cur, target)) return fail("branch does not open every completion");
                return true;
            }
            case StepKind::SUBCASE_CLOSE:
                return fail("subcase closed without a contradiction");
            }
        }
        return fail("trace ends inside an open case");
    }
};

} // namespace

ReplayResult replay_refutation(const Atlas& a, const Window& w, bool strict, const DeductionTrace& t,
                               const std::set<std::string>& known_cases) {
    Replayer r{a, t, known_cases, 0, {}};
    Patch cur(a, w, BoundaryPolicy::CLOSED, strict);
    while (r.i < t.steps.size() && t.steps[r.i].kind == StepKind::GIVEN) {
        const Step& s = t.steps[r.i];
        if (!s.placement) {
            r.fail("GIVEN without placement");
            return r.res;
        }
        if (cur.check(*s.placement)) {
            // A seed that is illegal in the window is its own contradiction.
            if (r.i + 1 < t.steps.size() && t.steps[r.i + 1].kind == StepKind::CONTRADICTION) {
                r.res.ok = r.i + 2 == t.steps.size();
                r.res.contradictions = 1;
                if (!r.res.ok) r.res.error = "steps after an illegal seed";
                return r.res;
            }
            r.fail("GIVEN placement is illegal");
            return r.res;
        }
        cur = cur.place(*s.placement);
        ++r.i;
    }
    r.res.ok = true;
    if (r.node(cur) && r.i != t.steps.size()) r.fail("trailing steps");
    if (!r.res.error.empty()) r.res.ok = false;
    return r.res;
}

} // namespace trilocrab
