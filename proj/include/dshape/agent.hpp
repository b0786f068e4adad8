#pragma once

#include <span>
#include <vector>

#include "dshape/demo.hpp"
#include "dshape/grid_env.hpp"
#include "dshape/q_core.hpp"

namespace dshape {

/// Agent state paired with a goal state.
struct AugmentedState {
  GridState s;
  GridState g;
};

/// Goal-reaching potential: minus the Manhattan distance between agent and goal cells.
struct PotentialFn {
  bool terminal_zero = true;  // potential of a task-terminal next state is 0

  double operator()(const AugmentedState& x) const { return -static_cast<double>(manhattan(x.s.pos(), x.g.pos())); }
};

/// F = gamma * phi(to) - phi(from), with phi(to) = 0 when to is task-terminal
/// and the potential has terminal_zero set.
double shaping_term(const PotentialFn& phi, const AugmentedState& from, const AugmentedState& to, double gamma,
                    bool to_terminal);

inline double shaped_reward(double r_task, double shaping) { return r_task + shaping; }

/// Component switches. Relabelling needs both shaping and augmentation.
struct AblationFlags {
  bool relabel = true;
  bool shaping = true;
  bool augment = true;

  void validate() const;
  friend bool operator==(const AblationFlags&, const AblationFlags&) = default;
};

struct DShapeParams {
  AblationFlags flags;
  int n_goals = 3;
  double gamma = 1.0;
  PotentialFn potential;
};

/// Consecutive-pair relabelling of one finished episode: every transition is
/// copied n_goals times with goals (s_k, s_k+1) for k drawn uniformly (with
/// replacement) from [0, n - 1) of the same n-step episode; a one-step episode
/// uses its only pair. Task reward and terminal flag are kept;
/// the shaping part of the reward is recomputed for the new goals.
std::vector<Transition> relabel(std::span<const Transition> episode, int n_goals, Rng& rng, const PotentialFn& phi,
                                double gamma);

class DShapeAgent final : public Agent {
 public:
  DShapeAgent(Demonstration demo, DShapeParams params);

  bool augmented() const override { return params_.flags.augment; }
  GridState goal_at(int t) const override { return demo_goal_at(demo_, t); }
  double reward(const Transition& tr) const override;
  void relabel(std::span<const Transition> episode, Rng& rng, std::vector<Transition>& out) const override;

  const Demonstration& demo() const { return demo_; }
  const DShapeParams& params() const { return params_; }

 private:
  Demonstration demo_;
  DShapeParams params_;
};

/// Greedy action at [s, demo_goal_at(demo, s.t)] on an augmented table.
Action inference_action(const QTable& q, const GridState& s, const Demonstration& demo, Rng& rng);

}  // namespace dshape
