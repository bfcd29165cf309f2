#include "trilocrab/render.hpp"

#include <algorithm>
#include <climits>
#include <set>
#include <sstream>

namespace trilocrab {

namespace {

Window extent(const Patch& p) {
    if (p.window()) return *p.window();
    if (p.cell_index().empty()) return {0, 0, 0, 0};
    int x0 = INT_MAX, y0 = INT_MAX, x1 = INT_MIN, y1 = INT_MIN;
    for (auto& [c, id] : p.cell_index()) {
        x0 = std::min(x0, c.x);
        y0 = std::min(y0, c.y);
        x1 = std::max(x1, c.x + 1);
        y1 = std::max(y1, c.y + 1);
    }
    return {x0, y0, x1, y1};
}

struct Mark {
    Placement p;
    std::string color;
    int number = 0;  // 0: no label
};

struct Svg {
    Window w;
    int cs;
    std::ostringstream out;

    int sx(int x) const { return (x - w.x0) * cs; }
    int sy(int y) const { return (w.y1 - y) * cs; }  // lattice y to screen y

    void begin() {
        int W = std::max(1, w.width()) * cs, H = std::max(1, w.height()) * cs;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W + 2 << "\" height=\"" << H + 2
            << "\" viewBox=\"-1 -1 " << W + 2 << " " << H + 2 << "\">\n";
        out << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
        out << "<g stroke=\"#c8c8c8\" stroke-width=\"0.5\">\n";
        for (int x = w.x0; x <= w.x1; ++x)
            out << "<line x1=\"" << sx(x) << "\" y1=\"0\" x2=\"" << sx(x) << "\" y2=\"" << H << "\"/>\n";
        for (int y = w.y0; y <= w.y1; ++y)
            out << "<line x1=\"0\" y1=\"" << sy(y) << "\" x2=\"" << W << "\" y2=\"" << sy(y) << "\"/>\n";
        out << "</g>\n";
    }

    void tile(const Atlas& a, const Mark& m, bool numbers) {
        auto cells = a.cells_of(m.p);
        std::set<CellCoord> in(cells.begin(), cells.end());
        bool tri = m.p.kind == Kind::TRILOBITE;
        std::string fill = m.color == "black" ? (tri ? "#404040" : "#808080") : m.color;
        out << "<g fill=\"" << fill << "\" fill-opacity=\"" << (tri ? "0.55" : "0.35") << "\" stroke=\"none\">\n";
        for (CellCoord c : cells)
            out << "<rect x=\"" << sx(c.x) << "\" y=\"" << sy(c.y + 1) << "\" width=\"" << cs << "\" height=\"" << cs
                << "\"/>\n";
        out << "</g>\n<g stroke=\"" << m.color << "\" stroke-width=\"2\">\n";
        // Outline: cell edges not shared with another cell of the tile.
        for (CellCoord c : cells) {
            if (!in.count({c.x, c.y - 1})) edge(c.x, c.y, c.x + 1, c.y);
            if (!in.count({c.x, c.y + 1})) edge(c.x, c.y + 1, c.x + 1, c.y + 1);
            if (!in.count({c.x - 1, c.y})) edge(c.x, c.y, c.x, c.y + 1);
            if (!in.count({c.x + 1, c.y})) edge(c.x + 1, c.y, c.x + 1, c.y + 1);
        }
        out << "</g>\n";
        const TileKind& k = a.tile(m.p.kind);
        int r = m.p.rot.quarter_turns;
        if (k.head) {
            CornerCoord h = rotate_corner(*k.head, m.p.rot);
            out << "<circle cx=\"" << sx(h.x + m.p.anchor.x) << "\" cy=\"" << sy(h.y + m.p.anchor.y) << "\" r=\""
                << cs / 6 << "\" fill=\"" << m.color << "\"/>\n";
        }
        for (const Tip& t : k.rotated_tips[r]) {
            int x = sx(t.corner.x + m.p.anchor.x), y = sy(t.corner.y + m.p.anchor.y);
            out << "<path d=\"M" << x - cs / 8 << " " << y << " L" << x << " " << y - cs / 8 << " L" << x + cs / 8
                << " " << y << " L" << x << " " << y + cs / 8 << " Z\" fill=\"" << m.color << "\"/>\n";
        }
        if (numbers && m.number > 0) {
            CellCoord c = *std::min_element(cells.begin(), cells.end());
            out << "<text x=\"" << sx(c.x) + cs / 2 << "\" y=\"" << sy(c.y) - cs / 3
                << "\" font-family=\"monospace\" font-size=\"" << cs / 2
                << "\" text-anchor=\"middle\" fill=\"white\">" << m.number << "</text>\n";
        }
    }

    void edge(int x0, int y0, int x1, int y1) {
        out << "<line x1=\"" << sx(x0) << "\" y1=\"" << sy(y0) << "\" x2=\"" << sx(x1) << "\" y2=\"" << sy(y1)
            << "\"/>\n";
    }

    void cross(CellCoord c, const std::string& color) {
        int x = sx(c.x), y = sy(c.y + 1);
        out << "<g stroke=\"" << color << "\" stroke-width=\"3\">\n";
        out << "<line x1=\"" << x + 3 << "\" y1=\"" << y + 3 << "\" x2=\"" << x + cs - 3 << "\" y2=\"" << y + cs - 3
            << "\"/>\n";
        out << "<line x1=\"" << x + cs - 3 << "\" y1=\"" << y + 3 << "\" x2=\"" << x + 3 << "\" y2=\"" << y + cs - 3
            << "\"/>\n</g>\n";
    }

    void box(CellCoord c, const std::string& color, const std::string& label) {
        int x = sx(c.x), y = sy(c.y + 1);
        out << "<rect x=\"" << x + 2 << "\" y=\"" << y + 2 << "\" width=\"" << cs - 4 << "\" height=\"" << cs - 4
            << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n";
        if (!label.empty())
            out << "<text x=\"" << x + cs / 2 << "\" y=\"" << y + cs * 2 / 3 << "\" font-family=\"monospace\" font-size=\""
                << cs / 2 << "\" text-anchor=\"middle\" fill=\"" << color << "\">" << label << "</text>\n";
    }

    std::string end() {
        out << "</svg>\n";
        return out.str();
    }
};

std::string color_of(const RenderStyle& s, StepKind k) {
    auto it = s.palette.find(k);
    return it == s.palette.end() ? "black" : it->second;
}

} // namespace

std::string render_ascii(const Patch& p, const Legend& legend) {
    Window w = extent(p);
    std::string out;
    for (int y = w.y1 - 1; y >= w.y0; --y) {
        for (int x = w.x0; x < w.x1; ++x) {
            const Placement* q = p.at({x, y});
            if (!q) out += legend.empty_glyph();
            else if (q->anchor == CellCoord{x, y}) out += legend.anchor_glyph(q->kind, q->rot);
            else out += legend.covered_glyph(q->kind);
        }
        out += '\n';
    }
    return out;
}

std::string render_svg(const Patch& p, const RenderStyle& style) {
    Svg s{extent(p), style.cell_size, {}};
    s.begin();
    for (const Placement& q : p.sorted()) s.tile(p.atlas(), {q, color_of(style, StepKind::GIVEN), 0}, false);
    return s.end();
}

std::string render_trace_svg(const Atlas& a, const Window& w, const DeductionTrace& t, const RenderStyle& style) {
    Svg s{w, style.cell_size, {}};
    s.begin();
    size_t i = 0;
    int forced = 0;
    for (; i < t.steps.size(); ++i) {
        const Step& st = t.steps[i];
        if (st.kind == StepKind::GIVEN && st.placement) {
            s.tile(a, {*st.placement, color_of(style, StepKind::GIVEN), 0}, false);
        } else if (st.kind == StepKind::FORCED && st.placement) {
            s.tile(a, {*st.placement, color_of(style, StepKind::FORCED), ++forced}, style.show_step_numbers);
        } else {
            break;
        }
    }
    if (i < t.steps.size()) {
        const Step& st = t.steps[i];
        if (st.kind == StepKind::SUBCASE_OPEN && st.target) {
            // Count the sibling cases opened at this cell at the top level.
            int cases = 0, depth = 0;
            for (size_t j = i; j < t.steps.size(); ++j) {
                if (t.steps[j].kind == StepKind::SUBCASE_OPEN) {
                    if (depth == 0) ++cases;
                    ++depth;
                } else if (t.steps[j].kind == StepKind::SUBCASE_CLOSE) {
                    --depth;
                }
            }
            s.box(*st.target, color_of(style, StepKind::SUBCASE_OPEN), std::to_string(cases));
        } else if (st.kind == StepKind::CONTRADICTION && st.target) {
            s.cross(*st.target, color_of(style, StepKind::CONTRADICTION));
        } else if (st.kind == StepKind::REDUCED_TO) {
            int x = s.sx(w.x0) + 2, y = s.sy(w.y0) - 4;
            s.out << "<text x=\"" << x << "\" y=\"" << y << "\" font-family=\"monospace\" font-size=\""
                  << style.cell_size / 2 << "\" fill=\"" << color_of(style, StepKind::REDUCED_TO) << "\">"
                  << st.case_id << "</text>\n";
        }
    }
    return s.end();
}

} // namespace trilocrab
