#include "dshape/agent.hpp"

#include <stdexcept>

namespace dshape {

double shaping_term(const PotentialFn& phi, const AugmentedState& from, const AugmentedState& to, double gamma,
                    bool to_terminal) {
  const double phi_to = to_terminal && phi.terminal_zero ? 0.0 : phi(to);
  return gamma * phi_to - phi(from);
}

void AblationFlags::validate() const {
  if (relabel && !(shaping && augment))
    throw std::invalid_argument("goal relabelling requires both shaping and state augmentation");
}

std::vector<Transition> relabel(std::span<const Transition> episode, int n_goals, Rng& rng, const PotentialFn& phi,
                                double gamma) {
  if (n_goals < 0) throw std::invalid_argument("n_goals must be >= 0");
  std::vector<Transition> out;
  if (episode.empty() || n_goals == 0) return out;
  out.reserve(episode.size() * static_cast<std::size_t>(n_goals));

  // k in [0, n - 1): the final pair is only used when it is the sole one
  std::uniform_int_distribution<std::size_t> pick(0, episode.size() > 1 ? episode.size() - 2 : 0);
  for (const Transition& tr : episode) {
    for (int j = 0; j < n_goals; ++j) {
      const Transition& achieved = episode[pick(rng)];
      Transition r = tr;
      r.goal = achieved.s;
      r.goal_next = achieved.s_next;
      r.key = make_key(r.s.pos(), r.goal.pos(), true);
      r.next_key = make_key(r.s_next.pos(), r.goal_next.pos(), true);
      r.reward = shaped_reward(tr.r_task, shaping_term(phi, {r.s, r.goal}, {r.s_next, r.goal_next}, gamma, tr.terminal));
      out.push_back(r);
    }
  }
  return out;
}

DShapeAgent::DShapeAgent(Demonstration demo, DShapeParams params) : demo_(std::move(demo)), params_(params) {
  params_.flags.validate();
  if (demo_.states.empty()) throw std::invalid_argument("empty demonstration");
  if (params_.n_goals < 0) throw std::invalid_argument("n_goals must be >= 0");
}

double DShapeAgent::reward(const Transition& tr) const {
  if (!params_.flags.shaping) return tr.r_task;
  return shaped_reward(tr.r_task, shaping_term(params_.potential, {tr.s, tr.goal}, {tr.s_next, tr.goal_next},
                                               params_.gamma, tr.terminal));
}

void DShapeAgent::relabel(std::span<const Transition> episode, Rng& rng, std::vector<Transition>& out) const {
  if (!params_.flags.relabel) return;
  auto records = dshape::relabel(episode, params_.n_goals, rng, params_.potential, params_.gamma);
  out.insert(out.end(), records.begin(), records.end());
}

Action inference_action(const QTable& q, const GridState& s, const Demonstration& demo, Rng& rng) {
  return greedy_action(q, make_key(s.pos(), demo_goal_at(demo, s.t).pos(), true), rng);
}

}  // namespace dshape
