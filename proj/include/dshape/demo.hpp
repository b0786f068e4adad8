#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dshape/grid_env.hpp"

namespace dshape {

enum class DemoQuality { Optimal, Good, Medium, Worst };

std::string_view to_string(DemoQuality q);
/// Parses "optimal", "good", "medium" or "worst". Throws std::invalid_argument.
DemoQuality parse_demo_quality(std::string_view name);

/// Manhattan distance between the demo's final cell and the task goal for a tier.
int goal_offset(DemoQuality q);

/// A single state-only demonstration. states[i].t == i.
struct Demonstration {
  std::vector<GridState> states;
  DemoQuality quality = DemoQuality::Optimal;
  Cell demo_goal;

  int last_index() const { return static_cast<int>(states.size()) - 1; }
};

/// Builds the bottom-edge-then-right-edge demonstration for a tier. Suboptimal
/// tiers stop on that path at Manhattan distance 2, 4 or 6 before the task
/// goal. Throws std::invalid_argument when the tier does not fit on the grid.
Demonstration make_demo(const GridSpec& spec, DemoQuality quality);

/// Lookahead goal used at timestep t: states[min(t + 1, L)].
GridState demo_goal_at(const Demonstration& demo, int t);

/// Checks start cell, unit moves and timestep labels against the grid.
/// Throws std::invalid_argument describing the first violation.
void validate_demo(const GridSpec& spec, const Demonstration& demo);

// Plain text table: a "t x y" header followed by one row per state.
void write_demo(std::ostream& os, const Demonstration& demo);
/// Reads a demo table; quality metadata is inferred from the final cell's
/// distance to the task goal (0, 2, 4 or 6), else it stays Optimal.
Demonstration read_demo(std::istream& is, const GridSpec& spec);

}  // namespace dshape
