#pragma once

#include <string>
#include <vector>

#include "carrystate/bench.hpp"
#include "carrystate/theory.hpp"

namespace cs {

/// Heatmap of sqrt(D_q) over (B, r) with the level-1 contour points overlaid.
std::string svg_phase_diagram(const PhaseDiagram& pd);

/// Per-shell sqrt(D) curves on a log axis; NaN points are skipped.
std::string svg_shell_curves(const std::vector<ShellCurve>& curves, const std::string& title);

/// fineRel(0) bars per ladder row.
std::string svg_ladder_bars(const LadderResult& r);

/// Writes the SVG text unchanged.
void write_plot(const std::string& path, const std::string& svg);

}  // namespace cs
