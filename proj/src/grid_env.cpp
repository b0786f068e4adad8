#include "dshape/grid_env.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace dshape {

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Up: return "Up";
    case Action::Down: return "Down";
    case Action::Left: return "Left";
    case Action::Right: return "Right";
  }
  return "?";
}

GridSpec GridSpec::make(int side, int horizon, double gamma) {
  return make(side, {0, 0}, {side - 1, side - 1}, horizon, gamma);
}

GridSpec GridSpec::make(int side, Cell start, Cell task_goal, int horizon, double gamma) {
  GridSpec spec{side, start, task_goal, horizon, gamma};
  spec.validate();
  return spec;
}

void GridSpec::validate() const {
  if (side < 2) throw std::invalid_argument(fmt::format("grid side must be >= 2, got {}", side));
  if (!contains(start))
    throw std::invalid_argument(fmt::format("start ({},{}) outside {}x{} grid", start.x, start.y, side, side));
  if (!contains(task_goal))
    throw std::invalid_argument(
        fmt::format("task goal ({},{}) outside {}x{} grid", task_goal.x, task_goal.y, side, side));
  if (start == task_goal) throw std::invalid_argument("start and task goal coincide");
  if (horizon < 1) throw std::invalid_argument(fmt::format("horizon must be >= 1, got {}", horizon));
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument(fmt::format("gamma must lie in (0,1], got {}", gamma));
}

GridState reset(const GridSpec& spec) { return {spec.start.x, spec.start.y, 0}; }

Cell move(const GridSpec& spec, Cell c, Action a) {
  switch (a) {
    case Action::Up: c.y += 1; break;
    case Action::Down: c.y -= 1; break;
    case Action::Left: c.x -= 1; break;
    case Action::Right: c.x += 1; break;
  }
  c.x = std::clamp(c.x, 0, spec.side - 1);
  c.y = std::clamp(c.y, 0, spec.side - 1);
  return c;
}

StepOutcome step(const GridSpec& spec, const GridState& s, Action a) {
  if (s.pos() == spec.task_goal) throw std::logic_error("step called on a terminal state");
  if (s.t >= spec.horizon) throw std::logic_error("step called past the time limit");
  if (!spec.contains(s.pos())) throw std::logic_error("step called with an off-grid state");

  const Cell next = move(spec, s.pos(), a);
  StepOutcome out;
  out.next_state = {next.x, next.y, s.t + 1};
  out.terminal = next == spec.task_goal;
  out.reward = out.terminal ? 0.0 : -1.0;
  out.truncated = !out.terminal && out.next_state.t == spec.horizon;
  return out;
}

std::optional<double> optimal_return(const GridSpec& spec) {
  // Every move changes the Manhattan distance by at most one, so the shortest
  // path takes d steps and only the arriving step is free.
  const int d = manhattan(spec.start, spec.task_goal);
  if (d > spec.horizon) return std::nullopt;
  return -static_cast<double>(d - 1);
}

}  // namespace dshape
