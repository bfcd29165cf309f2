#include "trilocrab/atlas.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <queue>
#include <sstream>

namespace trilocrab {

const char* kind_name(Kind k) {
    return k == Kind::TRILOBITE ? "TRILOBITE" : "CRAB";
}

std::optional<Kind> parse_kind(std::string_view s) {
    if (s == "TRILOBITE") return Kind::TRILOBITE;
    if (s == "CRAB") return Kind::CRAB;
    return std::nullopt;
}

std::string to_string(const Placement& p) {
    return std::string(kind_name(p.kind)) + "/" + std::to_string(p.rot.quarter_turns) + "@" +
           to_string(p.anchor);
}

AtlasError::AtlasError(int line, int column, const std::string& msg)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + msg),
      line(line), column(column) {}

std::optional<Label> Atlas::find_label(std::string_view s) const {
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == s) return Label(i);
    return std::nullopt;
}

Label Atlas::rotate_label(Label l, Rotation r) const {
    for (int i = 0; i < r.quarter_turns; ++i) l = act[l];
    return l;
}

CornerTuple Atlas::rotate_tuple(const CornerTuple& t, Rotation r) const {
    CornerTuple out = t;
    for (int i = 0; i < r.quarter_turns; ++i) {
        CornerTuple next;
        for (int q = 0; q < 4; ++q) next[(q + 1) % 4] = act[out[q]];
        out = next;
    }
    return out;
}

std::vector<CellCoord> Atlas::cells_of(const Placement& p) const {
    std::vector<CellCoord> out;
    for (CellCoord f : tile(p.kind).cells[p.rot.quarter_turns]) out.push_back(f + p.anchor);
    return out;
}

std::vector<Placement> Atlas::placements_covering(CellCoord c) const {
    std::vector<Placement> out;
    for (int k = 0; k < KIND_COUNT; ++k)
        for (int r = 0; r < 4; ++r)
            for (CellCoord f : tiles[k].cells[r]) out.push_back({Kind(k), Rotation(r), c - f});
    std::sort(out.begin(), out.end());
    return out;
}

bool Atlas::corner_tuple_allowed(const CornerTuple& t) const {
    return corner_rule.allowed.count(t) > 0;
}

bool Atlas::corner_completable(uint64_t masked) const {
    return completable_.count(masked) > 0;
}

int Atlas::oriented_class_count() const {
    int n = 0;
    for (const TileKind& t : tiles) {
        std::vector<std::pair<std::vector<CellCoord>, std::map<CornerCoord, Label>>> seen;
        for (int r = 0; r < 4; ++r) {
            auto cells = t.cells[r];
            std::sort(cells.begin(), cells.end());
            auto key = std::make_pair(cells, t.corner_marks[r]);
            if (std::find(seen.begin(), seen.end(), key) == seen.end()) seen.push_back(key);
        }
        n += int(seen.size());
    }
    return n;
}

void Atlas::reindex() {
    parity.mask = 0;
    for (const ParityTriple& t : parity.allowed) parity.mask |= uint64_t(1) << (16 * t.a + 4 * t.b + 2 * t.p.px + t.p.py);
    completable_.clear();
    for (const CornerTuple& t : corner_rule.allowed) {
        for (int mask = 0; mask < 16; ++mask) {
            CornerTuple m = t;
            for (int q = 0; q < 4; ++q)
                if (mask >> q & 1) m[q] = UNKNOWN_LABEL;
            completable_.insert(pack_tuple(m));
        }
    }
}

namespace {

struct Token {
    std::string text;
    int column;
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        if (line[i] == '#') break;
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != '#') ++j;
        out.push_back({line.substr(i, j - i), int(i) + 1});
        i = j;
    }
    return out;
}

std::string fnv1a_hex(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

class Parser {
public:
    explicit Parser(Atlas& a) : a_(a) {}

    void line(int no, const std::string& raw) {
        line_ = no;
        toks_ = tokenize(raw);
        if (toks_.empty()) return;
        const std::string& head = toks_[0].text;
        if (head.front() == '[') {
            section(raw);
            return;
        }
        if (section_.empty()) fail(0, "directive outside any section");
        if (section_ == "decorations") decorations();
        else if (section_ == "tile") tile();
        else if (section_ == "corner-rules") corner_rules();
        else if (section_ == "parity") parity();
        else if (section_ == "supertile") supertile();
    }

    void finish() {
        for (int k = 0; k < KIND_COUNT; ++k)
            if (!seen_tile_[k])
                throw AtlasError(line_, 1, std::string("missing section [tile ") + kind_name(Kind(k)) + "]");
        if (core_) {
            auto& body = a_.supertile.body[int(Kind::TRILOBITE)];
            for (size_t i = 0; i < body.size(); ++i)
                if (body[i].kind == Kind::TRILOBITE && body[i].anchor == *core_) a_.supertile.core = int(i);
            if (a_.supertile.core < 0) throw AtlasError(core_line_, 1, "core does not name a template trilobite");
        }
    }

private:
    [[noreturn]] void fail(size_t tok, const std::string& msg) {
        int col = tok < toks_.size() ? toks_[tok].column : 1;
        throw AtlasError(line_, col, msg);
    }

    void arity(size_t n) {
        if (toks_.size() != n)
            fail(std::min(toks_.size(), n), "expected " + std::to_string(n - 1) + " arguments to '" +
                                                toks_[0].text + "'");
    }

    int integer(size_t tok) {
        const std::string& s = toks_[tok].text;
        try {
            size_t pos = 0;
            int v = std::stoi(s, &pos);
            if (pos != s.size()) fail(tok, "bad integer '" + s + "'");
            return v;
        } catch (const std::logic_error&) {
            fail(tok, "bad integer '" + s + "'");
        }
    }

    int rotation(size_t tok) {
        int v = integer(tok);
        if (v < 0 || v > 3) fail(tok, "rotation out of range");
        return v;
    }

    Label label(size_t tok) {
        auto l = a_.find_label(toks_[tok].text);
        if (!l) fail(tok, "undeclared decoration '" + toks_[tok].text + "'");
        return *l;
    }

    Kind kind(size_t tok) {
        auto k = parse_kind(toks_[tok].text);
        if (!k) fail(tok, "unknown tile kind '" + toks_[tok].text + "'");
        return *k;
    }

    void section(const std::string& raw) {
        size_t open = raw.find('['), close = raw.find(']');
        if (close == std::string::npos) fail(0, "unterminated section header");
        std::string inner = raw.substr(open + 1, close - open - 1);
        std::istringstream ss(inner);
        std::string name, arg, extra;
        ss >> name >> arg >> extra;
        if (!extra.empty()) fail(0, "bad section header");
        if (name == "tile") {
            auto k = parse_kind(arg);
            if (!k) fail(0, "unknown tile section '" + arg + "'");
            kind_ = *k;
            if (seen_tile_[int(kind_)]) fail(0, "duplicate tile section");
            seen_tile_[int(kind_)] = true;
            a_.tiles[int(kind_)].name = arg;
        } else if (name == "decorations" || name == "corner-rules" || name == "parity" || name == "supertile") {
            if (!arg.empty()) fail(0, "section '" + name + "' takes no argument");
        } else {
            fail(0, "unknown section '" + inner + "'");
        }
        section_ = name;
    }

    void declare(size_t tok) {
        const std::string& s = toks_[tok].text;
        if (s == "BLANK") return;
        if (a_.find_label(s)) fail(tok, "decoration declared twice '" + s + "'");
        a_.labels.push_back(s);
        a_.act.push_back(Label(a_.labels.size() - 1));
    }

    void decorations() {
        if (toks_[0].text != "orbit") fail(0, "unknown directive '" + toks_[0].text + "'");
        size_t n = toks_.size() - 1;
        if (n != 1 && n != 2 && n != 4) fail(0, "orbit must list 1, 2 or 4 labels");
        bool blank = false;
        for (size_t i = 1; i <= n; ++i) blank |= toks_[i].text == "BLANK";
        if (blank && n != 1) fail(0, "BLANK is fixed by rotation");
        for (size_t i = 1; i <= n; ++i) declare(i);
        for (size_t i = 1; i <= n; ++i) a_.act[label(i)] = label(i % n + 1);
    }

    void tile() {
        TileKind& t = a_.tiles[int(kind_)];
        const std::string& d = toks_[0].text;
        if (d == "cell") {
            arity(3);
            CellCoord c{integer(1), integer(2)};
            if (std::find(t.footprint.begin(), t.footprint.end(), c) != t.footprint.end())
                fail(1, "duplicate footprint cell");
            t.footprint.push_back(c);
        } else if (d == "mark") {
            arity(4);
            CornerCoord c{integer(1), integer(2)};
            if (t.marks.count(c)) fail(1, "duplicate mark");
            t.marks[c] = label(3);
        } else if (d == "tip") {
            arity(5);
            t.tips.push_back({{integer(1), integer(2)}, {integer(3), integer(4)}});
        } else if (d == "head") {
            arity(3);
            t.head = CornerCoord{integer(1), integer(2)};
        } else {
            fail(0, "unknown directive '" + d + "'");
        }
    }

    void corner_rules() {
        if (toks_[0].text != "allow") fail(0, "unknown directive '" + toks_[0].text + "'");
        arity(5);
        a_.corner_rule.allowed.insert({label(1), label(2), label(3), label(4)});
    }

    void parity() {
        const std::string& d = toks_[0].text;
        if (d == "segment") {
            arity(5);
            CellCoord step{integer(3), integer(4)};
            if (step == CellCoord{0, 0}) fail(3, "segment step is zero");
            a_.parity.segments.push_back({{integer(1), integer(2)}, step});
        } else if (d == "pair") {
            arity(5);
            int px = integer(3), py = integer(4);
            if ((px | py) & ~1) fail(3, "parity must be 0 or 1");
            a_.parity.allowed.insert({rotation(1), rotation(2), {px, py}});
        } else {
            fail(0, "unknown directive '" + d + "'");
        }
    }

    void supertile() {
        SupertileTemplate& s = a_.supertile;
        const std::string& d = toks_[0].text;
        if (d == "scale") {
            arity(2);
            s.scale = integer(1);
            if (s.scale < 1 || s.scale % 2 == 0) fail(1, "scale must be odd and positive");
        } else if (d == "template") {
            arity(2);
            template_ = kind(1);
            if (s.present[int(*template_)]) fail(1, "duplicate template");
            s.present[int(*template_)] = true;
        } else if (d == "place") {
            arity(5);
            if (!template_) fail(0, "place before template");
            s.body[int(*template_)].push_back({kind(1), Rotation(rotation(2)), {integer(3), integer(4)}});
        } else if (d == "core") {
            arity(3);
            core_ = CellCoord{integer(1), integer(2)};
            core_line_ = line_;
        } else {
            fail(0, "unknown directive '" + d + "'");
        }
    }

    Atlas& a_;
    int line_ = 0;
    std::vector<Token> toks_;
    std::string section_;
    Kind kind_ = Kind::CRAB;
    std::array<bool, KIND_COUNT> seen_tile_{};
    std::optional<Kind> template_;
    std::optional<CellCoord> core_;
    int core_line_ = 0;
};

void materialize(Atlas& a) {
    for (TileKind& t : a.tiles) {
        for (int r = 0; r < 4; ++r) {
            Rotation rot(r);
            t.cells[r].clear();
            t.corner_marks[r].clear();
            t.contributions[r].clear();
            t.rotated_tips[r].clear();
            for (CellCoord f : t.footprint) t.cells[r].push_back(rotate_point(f, rot));
            for (auto& [c, l] : t.marks) t.corner_marks[r][rotate_corner(c, rot)] = a.rotate_label(l, rot);
            for (CellCoord c : t.cells[r]) {
                for (int q = 0; q < 4; ++q) {
                    CornerCoord k = cell_corner(c, q);
                    auto it = t.corner_marks[r].find(k);
                    t.contributions[r].push_back({k, q, it == t.corner_marks[r].end() ? BLANK : it->second});
                }
            }
            for (const Tip& tip : t.tips)
                t.rotated_tips[r].push_back({rotate_corner(tip.corner, rot), rotate_point(tip.contact, rot)});
        }
    }
}

void derive_tip_map(Atlas& a) {
    SupertileTemplate& s = a.supertile;
    const auto& tbody = s.body[int(Kind::TRILOBITE)];
    if (s.core >= 0) {
        const Placement& core = tbody[s.core];
        const auto& tips = a.tile(Kind::TRILOBITE).rotated_tips[core.rot.quarter_turns];
        for (size_t i = 0; i < tips.size() && i < 3; ++i) {
            CellCoord c = core.anchor + tips[i].contact;
            for (size_t j = 0; j < tbody.size(); ++j) {
                auto cells = a.cells_of(tbody[j]);
                if (std::find(cells.begin(), cells.end(), c) != cells.end()) s.tip_map[i] = int(j);
            }
        }
    }
    const auto& cbody = s.body[int(Kind::CRAB)];
    for (size_t i = 0; i < cbody.size(); ++i)
        if (cbody[i].kind == Kind::TRILOBITE) {
            s.kernel = int(i);
            break;
        }
}

} // namespace

Atlas load_atlas(std::string_view text, const std::string& name) {
    Atlas a;
    a.name = name;
    a.hash = fnv1a_hex(text);
    a.labels.push_back("BLANK");
    a.act.push_back(BLANK);
    Parser p(a);
    std::istringstream in{std::string(text)};
    std::string raw;
    int no = 0;
    while (std::getline(in, raw)) {
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        p.line(++no, raw);
    }
    p.finish();
    for (const TileKind& t : a.tiles) {
        if (t.footprint.empty()) throw AtlasError(no, 1, "footprint empty for " + t.name);
        if (std::find(t.footprint.begin(), t.footprint.end(), CellCoord{0, 0}) == t.footprint.end())
            throw AtlasError(no, 1, "footprint of " + t.name + " does not contain the origin");
    }
    materialize(a);
    derive_tip_map(a);
    a.reindex();
    return a;
}

Atlas load_atlas_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open atlas file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string stem = path;
    if (auto s = stem.find_last_of('/'); s != std::string::npos) stem = stem.substr(s + 1);
    if (auto d = stem.find_last_of('.'); d != std::string::npos) stem = stem.substr(0, d);
    return load_atlas(ss.str(), stem);
}

namespace {

bool connected(const std::vector<CellCoord>& cells) {
    if (cells.empty()) return false;
    std::set<CellCoord> all(cells.begin(), cells.end()), seen{cells[0]};
    std::queue<CellCoord> q;
    q.push(cells[0]);
    while (!q.empty()) {
        CellCoord c = q.front();
        q.pop();
        for (CellCoord d : {CellCoord{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
            CellCoord n = c + d;
            if (all.count(n) && seen.insert(n).second) q.push(n);
        }
    }
    return seen.size() == all.size();
}

std::string tuple_text(const Atlas& a, const CornerTuple& t) {
    return a.labels[t[0]] + " " + a.labels[t[1]] + " " + a.labels[t[2]] + " " + a.labels[t[3]];
}

} // namespace

ValidationReport validate_atlas(const Atlas& a) {
    ValidationReport rep;
    auto add = [&](std::string s) { rep.violations.push_back(std::move(s)); };

    for (Label l = 0; l < a.labels.size(); ++l)
        if (a.rotate_label(l, Rotation(0)) != l || a.rotate_label(a.rotate_label(l, Rotation(2)), Rotation(2)) != l)
            add("rotation action on '" + a.labels[l] + "' does not have order dividing 4");
    if (a.act[BLANK] != BLANK) add("BLANK is not fixed by rotation");

    for (const TileKind& t : a.tiles) {
        if (!connected(t.footprint)) add("footprint of " + t.name + " is disconnected");
        std::set<CornerCoord> closed;
        for (CellCoord c : t.footprint)
            for (CornerCoord k : cell_corners(c)) closed.insert(k);
        for (CornerCoord k : closed)
            if (!t.marks.count(k)) add("missing corner mark on " + t.name + " at " + to_string(k));
        for (auto& [k, l] : t.marks)
            if (!closed.count(k)) add("corner mark on " + t.name + " outside its footprint at " + to_string(k));
        // The materialized rotation-4 image must coincide with rotation 0.
        for (auto& [k, l] : t.corner_marks[0]) {
            auto it = t.corner_marks[3].find(rotate_corner(k, Rotation(3)));
            if (it == t.corner_marks[3].end() || a.rotate_label(it->second, Rotation(1)) != l)
                add("corner marks of " + t.name + " are not closed under rotation at " + to_string(k));
        }
    }
    const TileKind& tri = a.tile(Kind::TRILOBITE);
    if (tri.tips.size() != 3) add("trilobite must declare exactly 3 tips");
    std::set<CornerCoord> tri_closed;
    for (CellCoord c : tri.footprint)
        for (CornerCoord k : cell_corners(c)) tri_closed.insert(k);
    for (const Tip& t : tri.tips) {
        if (!tri_closed.count(t.corner)) add("tip corner " + to_string(t.corner) + " is not on the trilobite");
        if (std::find(tri.footprint.begin(), tri.footprint.end(), t.contact) != tri.footprint.end())
            add("tip contact cell " + to_string(t.contact) + " lies inside the trilobite");
    }

    CornerTuple blank{BLANK, BLANK, BLANK, BLANK};
    if (a.corner_rule.allowed.count(blank)) add("uncovered corner permitted");
    for (const CornerTuple& t : a.corner_rule.allowed) {
        CornerTuple r = a.rotate_tuple(t, Rotation(1));
        if (!a.corner_rule.allowed.count(r))
            add("corner rule not closed under rotation: " + tuple_text(a, t) + " -> " + tuple_text(a, r));
    }

    for (const ParityTriple& p : a.parity.allowed) {
        if (!a.parity.allowed.count({p.b, p.a, p.p}))
            add("parity table asymmetric: pair " + std::to_string(p.a) + " " + std::to_string(p.b) + " " +
                std::to_string(p.p.px) + " " + std::to_string(p.p.py));
        ParityTriple r{(p.a + 1) % 4, (p.b + 1) % 4, rotate_parity(p.p, Rotation(1))};
        if (!a.parity.allowed.count(r))
            add("parity table not closed under rotation: pair " + std::to_string(p.a) + " " + std::to_string(p.b) +
                " " + std::to_string(p.p.px) + " " + std::to_string(p.p.py));
    }
    if (!a.parity.allowed.empty() && a.parity.segments.empty()) add("parity table without a segment family");

    const SupertileTemplate& s = a.supertile;
    if (s.scale > 0) {
        for (int k = 0; k < KIND_COUNT; ++k) {
            if (!s.present[k]) {
                add(std::string("supertile template missing for ") + kind_name(Kind(k)));
                continue;
            }
            std::set<CellCoord> covered;
            std::set<CellCoord> block;
            for (CellCoord f : a.tiles[k].footprint)
                for (int x = 0; x < s.scale; ++x)
                    for (int y = 0; y < s.scale; ++y) block.insert({f.x * s.scale + x, f.y * s.scale + y});
            for (const Placement& p : s.body[k])
                for (CellCoord c : a.cells_of(p)) {
                    if (!covered.insert(c).second) add("supertile template overlap at " + to_string(c));
                    if (!block.count(c)) add("supertile template member outside its block at " + to_string(c));
                }
            if (covered.size() != block.size())
                add(std::string("supertile template for ") + kind_name(Kind(k)) + " does not cover its block");
        }
        if (s.core < 0) add("supertile template has no core trilobite");
        for (int i = 0; i < 3 && s.core >= 0; ++i)
            if (s.tip_map[i] < 0) add("core tip " + std::to_string(i) + " meets no template member");
    }
    return rep;
}

} // namespace trilocrab
