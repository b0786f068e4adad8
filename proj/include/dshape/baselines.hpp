#pragma once

#include <memory>
#include <vector>

#include "dshape/agent.hpp"
#include "dshape/demo.hpp"
#include "dshape/q_core.hpp"

namespace dshape {

struct SBSParams {
  double sigma = 10.0;
  double c = 1.0;

  void validate() const;
};

struct ManhattanParams {
  double c = 1.0;

  void validate() const;
};

/// Similarity-based potential: the best exp(-L1 / (2 sigma)) match against any
/// demo state, with coordinates scaled into [0, 1].
double sbs_potential(const SBSParams& params, const GridState& s, const Demonstration& demo, int side);

/// r_task + c * (gamma * phi_next - phi), with phi_next = 0 on task-terminal steps.
double sbs_reward(double r_task, double phi, double phi_next, double gamma, double c, bool terminal);

/// r_task - c * |s - demo_goal_at(demo, s.t)|_1. Not potential-based.
double manhattan_reward(double r_task, const GridState& s, const Demonstration& demo, double c);

/// Q-learning with the SBS potential-based shaping reward.
class SbsAgent final : public Agent {
 public:
  SbsAgent(const GridSpec& spec, Demonstration demo, SBSParams params, double gamma);

  bool augmented() const override { return false; }
  GridState goal_at(int t) const override { return demo_goal_at(demo_, t); }
  double reward(const Transition& tr) const override;

  double potential(Cell c) const { return potential_[static_cast<std::size_t>(c.y * side_ + c.x)]; }

 private:
  Demonstration demo_;
  SBSParams params_;
  double gamma_;
  int side_;
  std::vector<double> potential_;  // per cell, the potential is time-independent
};

/// Q-learning on the task reward plus the Manhattan imitation penalty.
class ManhattanAgent final : public Agent {
 public:
  ManhattanAgent(Demonstration demo, ManhattanParams params);

  bool augmented() const override { return false; }
  GridState goal_at(int t) const override { return demo_goal_at(demo_, t); }
  double reward(const Transition& tr) const override { return manhattan_reward(tr.r_task, tr.s, demo_, params_.c); }

 private:
  Demonstration demo_;
  ManhattanParams params_;
};

/// RIDM reduced to tabular Q-learning: demo-state augmentation with no shaping
/// and no relabelling.
std::shared_ptr<DShapeAgent> make_ridm_agent(Demonstration demo, double gamma = 1.0);

}  // namespace dshape
