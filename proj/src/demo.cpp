#include "dshape/demo.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace dshape {

std::string_view to_string(DemoQuality q) {
  switch (q) {
    case DemoQuality::Optimal: return "optimal";
    case DemoQuality::Good: return "good";
    case DemoQuality::Medium: return "medium";
    case DemoQuality::Worst: return "worst";
  }
  return "?";
}

DemoQuality parse_demo_quality(std::string_view name) {
  for (auto q : {DemoQuality::Optimal, DemoQuality::Good, DemoQuality::Medium, DemoQuality::Worst})
    if (name == to_string(q)) return q;
  throw std::invalid_argument(fmt::format("unknown demo quality '{}'", name));
}

int goal_offset(DemoQuality q) {
  switch (q) {
    case DemoQuality::Optimal: return 0;
    case DemoQuality::Good: return 2;
    case DemoQuality::Medium: return 4;
    case DemoQuality::Worst: return 6;
  }
  return 0;
}

namespace {

// Cells of the bottom-then-up path from start to the task goal.
std::vector<Cell> edge_path(const GridSpec& spec) {
  std::vector<Cell> path;
  Cell c = spec.start;
  path.push_back(c);
  while (c.x != spec.task_goal.x) {
    c.x += c.x < spec.task_goal.x ? 1 : -1;
    path.push_back(c);
  }
  while (c.y != spec.task_goal.y) {
    c.y += c.y < spec.task_goal.y ? 1 : -1;
    path.push_back(c);
  }
  return path;
}

}  // namespace

Demonstration make_demo(const GridSpec& spec, DemoQuality quality) {
  spec.validate();
  std::vector<Cell> path = edge_path(spec);
  const int k = goal_offset(quality);
  // The path is monotone, so dropping the last k cells leaves a cell exactly k
  // steps from the goal. On wide grids that cell is (side-1, side-1-k).
  const int keep = static_cast<int>(path.size()) - k;
  if (keep < 2)
    throw std::invalid_argument(fmt::format("{} demonstration needs a path longer than {} steps on a {}x{} grid",
                                            to_string(quality), k, spec.side, spec.side));
  path.resize(static_cast<std::size_t>(keep));

  Demonstration demo;
  demo.quality = quality;
  demo.demo_goal = path.back();
  demo.states.reserve(path.size());
  for (std::size_t i = 0; i < path.size(); ++i)
    demo.states.push_back({path[i].x, path[i].y, static_cast<int>(i)});
  return demo;
}

GridState demo_goal_at(const Demonstration& demo, int t) {
  if (demo.states.empty()) throw std::invalid_argument("empty demonstration");
  if (t < 0) throw std::invalid_argument("negative timestep");
  const int i = std::min(t + 1, demo.last_index());
  return demo.states[static_cast<std::size_t>(i)];
}

void validate_demo(const GridSpec& spec, const Demonstration& demo) {
  if (demo.states.empty()) throw std::invalid_argument("empty demonstration");
  if (demo.states.front().pos() != spec.start) throw std::invalid_argument("demonstration does not begin at start");
  for (std::size_t i = 0; i < demo.states.size(); ++i) {
    const GridState& s = demo.states[i];
    if (!spec.contains(s.pos()))
      throw std::invalid_argument(fmt::format("demo state {} at ({},{}) is off the grid", i, s.x, s.y));
    if (s.t != static_cast<int>(i))
      throw std::invalid_argument(fmt::format("demo state {} carries timestep {}", i, s.t));
    if (i > 0) {
      const Cell prev = demo.states[i - 1].pos();
      const bool legal = std::any_of(kAllActions.begin(), kAllActions.end(),
                                     [&](Action a) { return move(spec, prev, a) == s.pos(); });
      if (!legal) throw std::invalid_argument(fmt::format("demo states {} and {} are not one move apart", i - 1, i));
      if (prev == spec.task_goal) throw std::invalid_argument("demonstration continues past the task goal");
    }
  }
  if (demo.demo_goal != demo.states.back().pos()) throw std::invalid_argument("demo goal is not the final state");
}

void write_demo(std::ostream& os, const Demonstration& demo) {
  os << "t x y\n";
  for (const GridState& s : demo.states) os << s.t << ' ' << s.x << ' ' << s.y << '\n';
}

Demonstration read_demo(std::istream& is, const GridSpec& spec) {
  Demonstration demo;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    if (line.rfind("t ", 0) == 0) continue;
    std::istringstream row(line);
    GridState s;
    if (!(row >> s.t >> s.x >> s.y)) throw std::invalid_argument(fmt::format("demo line {}: expected 't x y'", lineno));
    demo.states.push_back(s);
  }
  if (demo.states.empty()) throw std::invalid_argument("demo file has no states");
  demo.demo_goal = demo.states.back().pos();
  const int d = manhattan(demo.demo_goal, spec.task_goal);
  demo.quality = DemoQuality::Optimal;
  for (auto q : {DemoQuality::Good, DemoQuality::Medium, DemoQuality::Worst})
    if (d == goal_offset(q)) demo.quality = q;
  validate_demo(spec, demo);
  return demo;
}

}  // namespace dshape
