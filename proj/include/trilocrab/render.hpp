#pragma once

#include "trilocrab/engine.hpp"
#include "trilocrab/lemmas.hpp"

#include <map>
#include <string>

namespace trilocrab {

struct RenderStyle {
    enum class Mode { ASCII, SVG } mode = Mode::SVG;
    std::map<StepKind, std::string> palette{
        {StepKind::GIVEN, "black"},         {StepKind::FORCED, "gray"},    {StepKind::SUBCASE_OPEN, "blue"},
        {StepKind::SUBCASE_CLOSE, "blue"},  {StepKind::REDUCED_TO, "green"}, {StepKind::CONTRADICTION, "red"}};
    bool show_step_numbers = true;
    int cell_size = 24;
};

// Rows from top (largest y) to bottom, one glyph per cell, newline-terminated.
// The extent is the window, or the bounding box of an OPEN patch.
std::string render_ascii(const Patch& p, const Legend& legend = default_legend());

std::string render_svg(const Patch& p, const RenderStyle& style = {});

// Figure of a proof trace: the given and forced placements before the first branch,
// the first branch cell with its case count, and the closing step when the trace has no branch.
std::string render_trace_svg(const Atlas& a, const Window& w, const DeductionTrace& t, const RenderStyle& style = {});

} // namespace trilocrab
