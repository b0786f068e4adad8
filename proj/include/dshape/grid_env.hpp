#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dshape {

/// Grid cell, x to the right and y up, origin at the bottom-left corner.
struct Cell {
  int x = 0;
  int y = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

inline int manhattan(Cell a, Cell b) {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

/// Agent position plus the number of environment steps since reset.
struct GridState {
  int x = 0;
  int y = 0;
  int t = 0;

  Cell pos() const { return {x, y}; }
  friend bool operator==(const GridState&, const GridState&) = default;
};

enum class Action : std::uint8_t { Up = 0, Down = 1, Left = 2, Right = 3 };

inline constexpr int kNumActions = 4;
inline constexpr std::array<Action, kNumActions> kAllActions = {Action::Up, Action::Down,
                                                                Action::Left, Action::Right};

inline int index(Action a) { return static_cast<int>(a); }
inline Action action_from_index(int i) { return static_cast<Action>(i); }
std::string_view to_string(Action a);

struct StepOutcome {
  GridState next_state;
  double reward = 0.0;
  bool terminal = false;   // arrived at the task goal
  bool truncated = false;  // hit the time limit without arriving
  friend bool operator==(const StepOutcome&, const StepOutcome&) = default;
};

/// Configuration of one gridworld task. Use GridSpec::make to get a validated spec.
struct GridSpec {
  int side = 10;
  Cell start{0, 0};
  Cell task_goal{9, 9};
  int horizon = 500;
  double gamma = 1.0;

  /// Default corner-to-corner task on a side x side grid.
  static GridSpec make(int side, int horizon = 500, double gamma = 1.0);
  static GridSpec make(int side, Cell start, Cell task_goal, int horizon = 500, double gamma = 1.0);

  /// Throws std::invalid_argument when the GridSpec is malformed.
  void validate() const;

  bool contains(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < side && c.y < side; }
  int num_cells() const { return side * side; }
  int cell_index(Cell c) const { return c.y * side + c.x; }
  Cell cell_at(int i) const { return {i % side, i / side}; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

GridState reset(const GridSpec& spec);

/// Position reached by moving one cell in direction a, clamped to the grid.
Cell move(const GridSpec& spec, Cell c, Action a);

/// Advances one environment step. Throws std::logic_error when s is already
/// at the task goal or at the time limit.
StepOutcome step(const GridSpec& spec, const GridState& s, Action a);

/// Undiscounted optimal episode return from the start cell, or nullopt when
/// the goal cannot be reached within the horizon.
std::optional<double> optimal_return(const GridSpec& spec);

}  // namespace dshape
