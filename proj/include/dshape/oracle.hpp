#pragma once

// Exact finite-horizon backward induction over timestep-indexed states, for
// the plain gridworld and for its goal-augmented variants. Used as ground
// truth and to certify optimal-action invariance on small instances.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dshape/agent.hpp"
#include "dshape/baselines.hpp"
#include "dshape/demo.hpp"
#include "dshape/grid_env.hpp"

namespace dshape::oracle {

/// Bit i set means action i is optimal.
using ActionSet = std::uint8_t;

std::string format_actions(ActionSet set);

/// Two values within this distance count as tied when extracting argmax sets.
inline constexpr double kArgmaxTolerance = 1e-9;

/// Upper bound on stored (timestep, state) entries before a solve is refused.
inline constexpr std::size_t kStateBudget = 40'000'000;

/// Reward on the plain MDP: (s, a, outcome) -> reward.
using RewardFn = std::function<double(const GridState& s, Action a, const StepOutcome& out)>;

/// Optimal values of the plain MDP with the timestep in the state.
/// Terminal (task goal) and expired (t = horizon) states have value 0 and an
/// empty optimal set.
struct ExactSolution {
  GridSpec spec;
  std::vector<double> v;           // [(t * cells + cell)], t in [0, H]
  std::vector<double> q;           // [((t * cells + cell) * 4 + a)], t in [0, H)
  std::vector<ActionSet> optimal;  // [(t * cells + cell)], t in [0, H)

  double value(const GridState& s) const;
  double q_value(const GridState& s, Action a) const;
  ActionSet optimal_actions(const GridState& s) const;
};

/// Task reward. Throws std::length_error when the state count exceeds the budget.
ExactSolution value_iteration(const GridSpec& spec);
ExactSolution value_iteration(const GridSpec& spec, const RewardFn& reward);

/// Goal dynamics P(g' | [s, g], a) over goal cells. The kernels built here
/// depend only on g, which gives the product form P(s'|s,a) P(g'|[s,g],a).
struct GoalKernel {
  std::string name;
  std::vector<std::pair<Cell, double>> initial;
  std::function<void(Cell g, const GridState& s, Action a, std::vector<std::pair<Cell, double>>& out)> next;
};

/// Deterministic walk along the demonstration: g' is the demo state after g,
/// clamped at the last one. Starts from demo_goal_at(demo, 0).
GoalKernel demo_goal_kernel(const Demonstration& demo);

/// Relabel-style mixture: with probability demo_weight follow the demo kernel,
/// otherwise g' is g moved by a uniformly random action, the way consecutive
/// achieved states (s_k, s_k+1) are linked.
GoalKernel relabel_goal_kernel(const GridSpec& spec, const Demonstration& demo, double demo_weight = 0.5);

/// Reward on the augmented MDP: (s, g, a, outcome, g') -> reward.
using AugmentedRewardFn =
    std::function<double(const GridState& s, Cell g, Action a, const StepOutcome& out, Cell g_next)>;

struct AugmentedExactSolution {
  GridSpec spec;
  std::string kernel;
  std::vector<double> v;           // [((t * cells + cell) * cells + goal)], t in [0, H]
  std::vector<double> q;           // [(... ) * 4 + a], t in [0, H)
  std::vector<ActionSet> optimal;  // t in [0, H)
  std::vector<std::uint8_t> reachable;  // t in [0, H]

  double value(const GridState& s, Cell g) const;
  double q_value(const GridState& s, Cell g, Action a) const;
  ActionSet optimal_actions(const GridState& s, Cell g) const;
  bool is_reachable(const GridState& s, Cell g) const;

  /// Calls f(s, g) on every reachable non-terminal state with t < H.
  void for_each_reachable(const std::function<void(const GridState&, Cell)>& f) const;
};

/// Solves the goal-augmented MDP; when shaping is given the reward gets
/// F = gamma phi([s',g']) - phi([s,g]) added, with phi zeroed at task-terminal
/// and expired next states when terminal_zero is set.
AugmentedExactSolution value_iteration_augmented(const GridSpec& spec, const GoalKernel& kernel,
                                                 const std::optional<PotentialFn>& shaping = std::nullopt,
                                                 const AugmentedRewardFn& reward = {});

/// Outcome of an exact check, printable as a text report.
struct Certificate {
  std::string name;
  bool passed = true;
  std::size_t states_checked = 0;
  std::size_t violations = 0;
  std::size_t on_path_violations = 0;  // violations at time-aligned demo states
  std::vector<std::string> counterexamples;  // first few, human readable

  void add_violation(std::string description, bool on_path);
  std::string report() const;
};

/// Argmax over goal-augmented states equals argmax of the plain MDP at every
/// reachable [s, g], for the demo kernel and the relabel mixture kernel.
Certificate check_theorem1(const GridSpec& spec, const Demonstration& demo);
/// Same check with a substituted augmented reward (used to show the check can fail).
Certificate check_theorem1(const GridSpec& spec, const Demonstration& demo, const AugmentedRewardFn& reward,
                           std::string label);

/// Shaped and unshaped augmented MDPs share argmax sets at every reachable
/// state, and (for gamma = 1) Q_shaped = Q - phi([s, g]) there.
Certificate check_policy_invariance(const GridSpec& spec, const Demonstration& demo, const PotentialFn& potential);

/// SBS potential-based shaping on the plain MDP keeps every argmax set.
Certificate check_sbs_invariance(const GridSpec& spec, const Demonstration& demo, const SBSParams& params,
                                 bool terminal_zero = true);

/// Compares argmax sets of the plain MDP under the task reward and under a
/// modified reward; every state reachable from start is checked.
Certificate check_reward_invariance(const GridSpec& spec, const Demonstration& demo, const RewardFn& reward,
                                    std::string name);

/// The additive Manhattan imitation reward; not potential-based.
Certificate check_manhattan_invariance(const GridSpec& spec, const Demonstration& demo, double c);

}  // namespace dshape::oracle
